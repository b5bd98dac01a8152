#pragma once

#include "sge/operators.hpp"
#include "sge/space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <vector>

namespace sge {

enum class NoiseRegime {
  none,
  additive,
  nemytskii_ito,
  nemytskii_stratonovich,
  functional,
};

// Scalar saturation profile applied coordinate-wise by the Nemytskii regimes.
enum class PsiKind { identity, tanh_saturating, constant_one };

enum class AlphaProfile { flat, inverse_weight, custom };

struct NoiseCfg {
  NoiseRegime regime = NoiseRegime::none;
  std::size_t k_dims = 1;
  PsiKind psi = PsiKind::identity;
  // Multiplier on the quadratic correction drift of the Stratonovich regime.
  // 0.5 converts to the Ito drift; 1.0 reproduces the literal doubled form.
  double strat_factor = 0.5;
  AlphaProfile profile = AlphaProfile::flat;
  // Normalization: sum over all directions and coordinates of alpha^2.
  double total_hs_sq = 1.0;
  std::vector<std::vector<double>> custom_alpha;      // [k][j], custom profile
  std::vector<std::vector<double>> functional_shapes; // [k][j], functional regime
};

// Concrete diffusion built against a space. alpha column k is the amplitude
// pattern of direction k. c3 bounds |sigma(t,u)|_HS / (1+|u|), c4 the same
// for the correction drift; both are exact catalog values, not estimates.
struct NoiseSpec {
  SpacePtr space;
  NoiseRegime regime = NoiseRegime::none;
  PsiKind psi = PsiKind::identity;
  double strat_factor = 0.5;
  std::size_t k_dims = 0;
  Eigen::MatrixXd alpha;   // dim x k_dims
  Eigen::MatrixXd shapes;  // dim x k_dims, functional regime only
  double c3 = 0.0;
  double c4 = 0.0;
};

using NoisePtr = std::shared_ptr<const NoiseSpec>;

NoisePtr make_noise(const SpacePtr& space, const NoiseCfg& cfg);

// Column k of the diffusion at (t, u). All catalog entries are autonomous in
// t; the argument exists so callers can keep time-honest call sites.
void sigma_apply(const NoiseSpec& noise, double t, const State& u, std::size_t k,
                 State& out);
void xi_apply(const NoiseSpec& noise, double t, const State& u, State& out);

// Installs sigma/xi and their growth constants on an operator set.
void attach_noise(OperatorSet& ops, const NoisePtr& noise);

// Spectral cutoff of the diffusion at level N: keep coordinates with
// weight <= N. The cutoff composes after sigma, so state dependence is
// evaluated on the full state.
struct SigmaN {
  NoisePtr base;
  double level = 0.0;
  std::size_t m_modes = 0;  // retained prefix length
};

SigmaN project_sigma(const NoisePtr& noise, double level);

void sigma_n_apply(const SigmaN& sn, double t, const State& u, std::size_t k,
                   State& out);

// sum_k sigma_N,k(t,u) * eta_k, the one noise vector a step consumes.
State sigma_n_increment(const SigmaN& sn, double t, const State& u,
                        const Eigen::VectorXd& eta);

double sigma_hs_sq(const NoiseSpec& noise, double t, const State& u);
double sigma_n_hs_sq(const SigmaN& sn, double t, const State& u);
// || sigma_N ||^2 at smoothness level one (weights to the first power).
double sigma_n_v_sq(const SigmaN& sn, double t, const State& u);
// Discarded mass |sigma - sigma_N|^2_HS; monotone non-increasing in N.
double sigma_tail_sq(const SigmaN& sn, double t, const State& u);

// Margins of the two structural cutoff conditions, accumulated as grouped
// non-negative sums so they certify in floating point:
//   N |sigma(u)|^2_HS - ||sigma_N(u)||^2_V >= 0
//   |sigma(u)|^2_HS - |sigma_N(u)|^2_HS   >= 0
struct SigmaNConditions {
  double v_margin_min = 0.0;
  double h_margin_min = 0.0;
  bool pass = false;
};

SigmaNConditions sigma_n_conditions(const SigmaN& sn, std::size_t n_samples,
                                    std::uint64_t seed);

// Brownian increments on the master grid shared by every refinement level.
struct WienerPath {
  double T = 0.0;
  std::size_t master_steps = 0;
  std::size_t k_dims = 0;
  Eigen::MatrixXd dW;  // master_steps x k_dims
};

WienerPath sample_wiener(double T, std::size_t master_steps, std::size_t k_dims,
                         std::uint64_t seed);

// Sums master increments over scheme cells; requires N to divide master_steps.
Eigen::MatrixXd scheme_increments(const WienerPath& w, std::size_t n_steps);

// splitmix64-style combiner for derived stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sge
