#pragma once

#include "sge/noise.hpp"
#include "sge/operators.hpp"
#include "sge/space.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace sge {

enum class SolverKind { newton, damped_picard };

struct SchemeConfig {
  double T = 1.0;
  SolverKind solver = SolverKind::newton;
  std::size_t max_iters = 200;
  double solve_tol = 1e-11;   // step-equation residual, weakest dual norm
  double cert_tol = 1e-9;     // energy certificate slack, relative
};

// Step counts demanded by the a-priori estimates: N0 for per-step
// solvability, N1 (through c5) for the uniform moment bounds.
struct Thresholds {
  double c5 = 0.0;
  std::size_t N0 = 0;
  std::size_t N1 = 0;
};

Thresholds scheme_thresholds(double T, double c3, double c4);

// (1 + ||u||_V^2)(1 + ||u||_V2^2), the quantity the initial datum must keep
// of order N after truncation.
double initial_growth_product(const State& u);

// Truncates to the largest coordinate prefix (never more than n_steps modes)
// whose V2 norm stays within sqrt(n_steps).
State prepare_initial(const State& u0, std::size_t n_steps);

enum class ForcingKind { none, deterministic, wind_proxy };
enum class ForcingShape { constant, sine };

struct ForcingSpec {
  ForcingKind kind = ForcingKind::none;
  State profile;  // spatial pattern carrying the load
  // deterministic: amp * profile, or amp * sin(freq t) * profile
  ForcingShape shape = ForcingShape::constant;
  double amp = 1.0;
  double freq = 1.0;
  // wind_proxy: profile * (1 + gain * normalized sum of the source direction's
  // Brownian increments over the trailing window of master cells). Only
  // already-revealed increments enter, so the load is adapted.
  double gain = 0.0;
  std::size_t window = 4;
  std::size_t source_dir = 0;
};

// One value per master cell (midpoint evaluation); this sequence is the
// single quadrature source for averaging, energy budgeting, and the
// reconstruction bookkeeping, which is what makes their identities close.
std::vector<State> forcing_values(const ForcingSpec& forcing, const SpacePtr& space,
                                  const WienerPath& wiener);

struct AveragedForcing {
  std::vector<State> ell;    // ell^n, n = 1..N (index 0 is step 1)
  std::vector<double> zeta;  // per-step dissipation budget of the load
};

// Cell values averaged over scheme cells; sum(zeta) telescopes exactly to the
// whole-interval quadrature of ||ell||^2 in the weakest norm used here.
AveragedForcing average_forcing(const std::vector<State>& cell_values,
                                const SpacePtr& space, double T,
                                std::size_t n_steps);

struct StepCertificate {
  double slack = 0.0;       // energy inequality surplus, >= 0 up to round-off
  double scale = 1.0;       // 1 + |U^n|^2, the acceptance scale
  bool accepted = false;
  std::size_t iterations = 0;
  double residual = 0.0;    // final step-equation residual (V2 dual norm)
};

struct StepResult {
  State state;
  StepCertificate cert;
};

// Solves U + dt (A U + B(U) + E U - xi(t_n, U)) = U_prev + dt ell_n + noise
// and certifies the per-step energy inequality a-posteriori. Throws
// std::runtime_error if the nonlinear solver stalls.
StepResult implicit_step(const OperatorSet& ops, const SchemeConfig& cfg,
                         double t_n, double dt, const State& u_prev,
                         const State& rhs_noise, const State& ell_n);

struct SchemePath {
  SpacePtr space;
  double T = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::vector<State> states;           // U^0 .. U^N
  std::vector<State> noise_incr;       // sigma_N(t^{n-1}, U^{n-1}) eta^n
  std::vector<State> ell_incr;         // ell^n
  std::vector<double> zeta;
  std::vector<StepCertificate> certs;
  Eigen::MatrixXd eta;                 // scheme-cell Brownian increments, N x K
  bool all_accepted = false;
};

SchemePath run_path(const OperatorSet& ops, const SchemeConfig& cfg,
                    const SigmaN& sn, const WienerPath& wiener,
                    const ForcingSpec& forcing, const State& u0,
                    std::size_t n_steps);

// Pathwise residuals of the telescoped energy inequality
//   |U^n|^2 - |U^{n-1}|^2 + 1/2 |dU|^2 + dt c1 ||U^n||^2
//     <= zeta^n / c1 + 4 dt c4 (1 + |U^n|^2)
//        + 2 (noise^n, U^{n-1}) + 2 |noise^n|^2.
// margin[n] = rhs - lhs; min_margin is over all steps.
struct EnergyReport {
  std::vector<double> per_step_slack;   // from the certificates
  std::vector<double> summed_margin;
  double min_slack = 0.0;
  double min_summed_margin = 0.0;
  std::size_t rejected_steps = 0;
};

EnergyReport path_energy_report(const OperatorSet& ops, const SchemePath& path);

// max_{0<=m<=N-1} |U^m|^2 + sum_m (|U^m - U^{m-1}|^2 + dt ||U^m||^2); the
// quantity the moment bounds keep uniform across refinements.
double uniform_bound_statistic(const SchemePath& path);

}  // namespace sge
