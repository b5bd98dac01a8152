#pragma once

#include "sge/martingale.hpp"
#include "sge/models.hpp"
#include "sge/noise.hpp"
#include "sge/paths.hpp"
#include "sge/scheme.hpp"
#include "sge/stats.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sge {

// Coefficient patterns used for initial data and load profiles.
struct ProfileCfg {
  enum class Kind { zero, coeffs, smooth_decay };
  Kind kind = Kind::zero;
  std::vector<std::pair<std::size_t, double>> coeffs;  // (coordinate, value)
  double amp = 1.0;
  double decay = 2.0;  // coordinate j gets amp * lambda_j^{-decay}
};

State build_profile(const SpacePtr& space, const ProfileCfg& cfg);

struct ForcingCfg {
  ForcingKind kind = ForcingKind::none;
  ForcingShape shape = ForcingShape::constant;
  double amp = 1.0;
  double freq = 1.0;
  double gain = 0.0;
  std::size_t window = 4;
  std::size_t source_dir = 0;
  ProfileCfg profile;
};

ForcingSpec build_forcing(const SpacePtr& space, const ForcingCfg& cfg);

// Real-valued observables of a realized path; their laws are what the weak
// convergence diagnostics compare across refinements.
struct FunctionalSpec {
  enum class Kind { energy_l2, endpoint_h_norm, mode_k_endpoint, max_h_norm };
  Kind kind = Kind::energy_l2;
  std::size_t mode_index = 0;
};

double evaluate_functional(const FunctionalSpec& f, const SchemePath& path);
std::string functional_name(const FunctionalSpec& f);

struct ExperimentConfig {
  std::string name = "experiment";
  ModelSpec model;
  NoiseCfg noise;
  SchemeConfig scheme;
  ForcingCfg forcing;
  ProfileCfg u0;

  std::vector<std::size_t> ladder;  // ascending step counts
  std::size_t master_steps = 0;     // 0: four master cells per finest step
  std::size_t ensemble = 100;
  std::uint64_t seed = 1;
  bool independent_paths = false;   // decouple rungs instead of sharing noise
  std::size_t workers = 1;

  std::vector<FunctionalSpec> functionals;
  unsigned j_max = 8;
  double fs_alpha = 0.3;
  double fs_p = 4.0;
  std::size_t fs_node_cap = 257;
  double bdg_q = 1.0;
  double bdg_stop_level = std::numeric_limits<double>::infinity();
  std::size_t axiom_samples = 1000;

  // verdict thresholds
  double decay_ratio_limit = 0.9;       // CI-adjusted per doubling
  double bounded_variation_limit = 0.5; // relative spread of a bounded stat
  double uniform_variation_limit = 0.2;
  double coupling_median_limit = 0.75;
  double recon_tol = 1e-10;
  double gap_tol = 1e-12;
};

struct Verdict {
  std::string id;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct RungSummary {
  std::size_t n_steps = 0;
  std::vector<PathStats> rows;            // one per path, index = path id
  std::vector<double> uniform_stat;
  std::vector<double> gap_closed;
  std::vector<double> gap_rel_err;
  std::vector<double> recon_resid;
  std::vector<double> min_slack;
  std::vector<double> min_summed_margin;
  std::vector<double> es_bounded;         // es_l2v + es_linfh per path
  std::size_t rejected_steps = 0;
  std::map<std::string, std::vector<double>> functional_samples;
  BdgResult bdg;
  SigmaNConditions cutoff;
  double sigma_tail_mean = 0.0;  // cutoff remainder on the shared probe states
};

struct LawDistance {
  std::size_t coarse = 0;
  std::size_t fine = 0;
  std::string functional;
  double ks = 0.0;
  double w1 = 0.0;
  double ks_tol = 0.0;
};

struct ExperimentResult {
  ExperimentConfig cfg;  // echo with resolved defaults
  AxiomReport axioms;
  Thresholds thresholds;
  std::vector<RungSummary> rungs;
  std::vector<LawDistance> law;
  std::vector<Verdict> verdicts;
  bool all_pass = false;
};

// Runs the full study: axiom gate, threshold check, per-rung Monte Carlo
// with coupled refinements, martingale suite, law distances, verdicts.
// Throws std::invalid_argument on config violations and std::runtime_error
// when the axiom gate refuses the model.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// paths_N<k>.csv per rung, summary.csv (long format), verdicts.txt.
// Rewrites files byte-identically for identical results.
void write_outputs(const ExperimentResult& res, const std::string& out_dir);

}  // namespace sge
