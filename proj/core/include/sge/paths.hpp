#pragma once

#include "sge/noise.hpp"
#include "sge/operators.hpp"
#include "sge/scheme.hpp"
#include "sge/space.hpp"

#include <cstddef>
#include <vector>

namespace sge {

// Continuous-time bookkeeping for one realized path, sampled on the master
// grid (the grid the Brownian increments live on; every scheme node is a
// master node). Stored are the scheme data plus prefix integrals; all
// process values are reconstructed from these on demand.
//
// Conventions, fixed once and shared by every consumer:
//  - the step process is the lagged piecewise-constant interpolant (value
//    U^n on (t^n, t^{n+1}], U^0 up to t^1), the linear interpolant lags the
//    same way;
//  - deterministic prefix integrals accumulate master-cell midpoint values,
//    identical to the averaging that produced ell^n, so their telescoping
//    against the scheme is exact;
//  - stochastic prefix sums pair the cell's interior state (right node of
//    the half-open cell) with that cell's increment, which keeps them
//    adapted and makes them collapse to the scheme's own noise increments
//    on whole scheme cells;
//  - between master nodes every accumulated process is read linearly.
struct InterpolantSet {
  SpacePtr space;
  double T = 0.0;
  double dt = 0.0;  // scheme step
  double h = 0.0;   // master cell
  std::size_t n_steps = 0;
  std::size_t master_steps = 0;
  std::size_t refine = 0;  // master cells per scheme cell

  std::vector<State> states;      // U^0 .. U^N
  std::vector<State> noise_incr;  // per scheme step
  std::vector<State> ell_incr;    // per scheme step
  std::vector<State> cell_load;   // forcing value per master cell
  std::vector<State> ell_cum;     // node prefix of the load integral
  std::vector<State> stoch_cum;   // node prefix of the diffusion integral
  std::vector<State> drift_cum;   // node prefix of the full drift integral
  State drift_first;              // drift at (0, U^0), the burn-in error
};

InterpolantSet build_interpolants(const OperatorSet& ops, const SchemePath& path,
                                  const SigmaN& sn, const WienerPath& wiener,
                                  const ForcingSpec& forcing);

// Smallest scheme index n with t^n >= t. Exact integer form for master node
// i, and a grid-snapping form for raw times.
std::size_t n_star_node(std::size_t node, std::size_t refine);
std::size_t n_star_time(double t, double T, std::size_t n_steps);

// Process values at master node i (the value AT time s_i, i.e. the limit
// from the left for the discontinuous ones).
State step_at_node(const InterpolantSet& ip, std::size_t i);
State interp_at_node(const InterpolantSet& ip, std::size_t i);
State ed1_at_node(const InterpolantSet& ip, std::size_t i);
State ed2_at_node(const InterpolantSet& ip, std::size_t i);
State es1_at_node(const InterpolantSet& ip, std::size_t i);
State es2_at_node(const InterpolantSet& ip, std::size_t i);
State ustar_at_node(const InterpolantSet& ip, std::size_t i);
State ustarstar_at_node(const InterpolantSet& ip, std::size_t i);

// Linear restriction of a process to master cell i: value at the cell's
// left end (limit from the right) and at its right end.
struct CellSegment {
  State left;
  State right;
};

CellSegment gap_on_cell(const InterpolantSet& ip, std::size_t i);   // U_N - Ubar_N
CellSegment ed_on_cell(const InterpolantSet& ip, std::size_t i);    // ED1 + ED2
CellSegment es_on_cell(const InterpolantSet& ip, std::size_t i);    // ES1 + ES2
CellSegment es1_on_cell(const InterpolantSet& ip, std::size_t i);
CellSegment es2_on_cell(const InterpolantSet& ip, std::size_t i);

// Integral over [0,T] of the squared norm of a cell-linear process; Simpson
// per cell, exact for these piecewise-quadratic integrands.
double l2_sq_cell_linear(const InterpolantSet& ip,
                         CellSegment (*segment)(const InterpolantSet&, std::size_t),
                         NormLevel lvl);

// Closed forms for the step process (no quadrature involved).
double step_l2_sq(const InterpolantSet& ip, NormLevel lvl);
double step_sup_sq(const InterpolantSet& ip, NormLevel lvl);

// Interpolation gap both ways: quadrature vs (dt/3) sum |U^n - U^{n-1}|^2.
struct GapIdentity {
  double quadrature = 0.0;
  double closed_form = 0.0;
  double rel_err = 0.0;
};
GapIdentity interpolation_gap(const InterpolantSet& ip);

// Max over master nodes of the H-distance between U** and its integral
// reconstruction U^0 + int drift + int load + int diffusion, relative to
// 1 + the largest reconstruction norm.
double reconstruction_residual(const InterpolantSet& ip);

struct ErrorNorms {
  double ed_l2vdual = 0.0;   // deterministic error, L2 dual norm
  double ed_supvdual = 0.0;  // and its sup counterpart
  double es_l2h = 0.0;
  double es_l2v = 0.0;
  double es_suph = 0.0;
};
ErrorNorms error_norms(const InterpolantSet& ip);

// Time-shift compactness seminorm of the step process at window index j:
// (j * sup over admissible whole-cell offsets theta <= j^-6 of
//  int_0^{T-theta} ||U(t+theta) - U(t)||^{4/3} dt)^{3/4), dual-2 norm inside.
double shift_seminorm(const InterpolantSet& ip, unsigned j);

// Fractional time-regularity norm of the accumulated diffusion integral:
// (int |Z|^p + double sum |Z(t)-Z(s)|^p / |t-s|^{1+alpha p})^{1/p} in the
// dual-2 norm, nodes coarsened to at most node_cap points.
double frac_sobolev_norm(const InterpolantSet& ip, double alpha, double p,
                         std::size_t node_cap = 257);

// Everything a per-path CSV row carries.
struct PathStats {
  double l2h = 0.0;
  double l2v = 0.0;
  double linf_h = 0.0;
  double ed_l2vdual = 0.0;
  double es_l2h = 0.0;
  double es_l2v = 0.0;
  double es_linfh = 0.0;
  std::vector<double> shift;  // [U]_1 .. [U]_jmax
  double fracsob = 0.0;
};

PathStats compute_path_stats(const InterpolantSet& ip, unsigned j_max,
                             double alpha, double p, std::size_t node_cap = 257);

}  // namespace sge
