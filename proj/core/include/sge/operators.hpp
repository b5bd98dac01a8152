#pragma once

#include "sge/space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace sge {

// Deterministic part of the evolution plus hooks for the state-dependent
// noise coupling. A and E are dense H-representations of the linear maps
// (row i = coefficient of basis vector i in the image). The advection pair
// callback realizes the bilinear map behind the trilinear form:
//   dot_h(b_pair(u, w), s) == b(u, w, s), first slot advects the second.
struct OperatorSet {
  SpacePtr space;

  Eigen::MatrixXd A;  // dissipative part, coercive against c1
  Eigen::MatrixXd E;  // rotation part, e(u,u) = 0
  std::function<void(const State& u, const State& w, State& out)> b_pair;
  // Jacobian of u -> B(u) := b_pair(u,u) at the given state.
  std::function<Eigen::MatrixXd(const State& u)> b_jacobian;

  // Noise coupling, populated by attach_noise; all three may be empty for a
  // purely deterministic model. sigma fills column k of the diffusion.
  std::function<void(double t, const State& u, State& out)> xi;
  std::function<Eigen::MatrixXd(double t, const State& u)> xi_jacobian;
  std::function<void(double t, const State& u, std::size_t k, State& out)> sigma;
  std::size_t noise_dim = 0;

  // Structural constants the estimates run on. c1 coercivity, c2 advection
  // interpolation bound, c3 diffusion growth, c4 correction growth.
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
};

// Form evaluations. apply_a/apply_e are the quadratic-form pairings of the
// matrices; apply_b evaluates the trilinear form through b_pair.
double apply_a(const OperatorSet& ops, const State& u, const State& v);
double apply_b(const OperatorSet& ops, const State& u, const State& ub,
               const State& us);
double apply_e(const OperatorSet& ops, const State& u, const State& v);

State apply_A(const OperatorSet& ops, const State& u);
State apply_E(const OperatorSet& ops, const State& u);
State apply_B(const OperatorSet& ops, const State& u);
State apply_xi(const OperatorSet& ops, double t, const State& u);

// Full drift -(A u + B(u) + E u - xi(t,u)); the forcing is handled separately
// by the stepper.
State apply_drift(const OperatorSet& ops, double t, const State& u);

// sum_k |sigma_k(t,u)|_H^2, the squared Hilbert-Schmidt size of the diffusion.
double sigma_hs_norm_sq(const OperatorSet& ops, double t, const State& u);

struct AxiomCheck {
  bool pass = true;
  double worst = 0.0;  // most adverse scaled residual seen (>= 0 is a margin)
};

struct AxiomReport {
  AxiomCheck coercivity;        // a(u,u) - c1||u||^2 >= 0
  double coercivity_eig_min;    // exact min eigenvalue of sym(A) - c1*Lambda
  AxiomCheck rotation_skew;     // e(u,u) = 0
  AxiomCheck advection_skew;    // b(u,w,w) = 0
  AxiomCheck advection_bound;   // |b| <= c2 ||u|| |w|^1/2 ||w||^1/2 ||s||_V2
  AxiomCheck noise_growth;      // |sigma(t,u)|_HS <= c3 (1 + |u|)
  AxiomCheck correction_growth; // |xi(t,u)| <= c4 (1 + |u|)
  double c1_hat = 0.0;  // tightest constants observed on the sample set
  double c2_hat = 0.0;
  double c3_hat = 0.0;
  double c4_hat = 0.0;
  bool valid = false;
};

// Monte Carlo structure check over n_samples random states drawn across
// several smoothness profiles, plus an exact eigenvalue certificate for
// coercivity. Downstream drivers refuse operator sets whose report is not
// valid. Relative tolerance applies to the cancellation residuals.
AxiomReport verify_axioms(const OperatorSet& ops, std::size_t n_samples,
                          std::uint64_t seed, double rel_tol = 1e-10);

}  // namespace sge
