#include "sge/paths.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace sge {

namespace {

// Scheme-cell label of master cell i: the cell sits inside (t^m, t^{m+1}].
std::size_t cell_label(const InterpolantSet& ip, std::size_t i) {
  return i / ip.refine;
}

}  // namespace

std::size_t n_star_node(std::size_t node, std::size_t refine) {
  if (refine == 0) throw std::invalid_argument("n_star_node: refine must be positive");
  return node == 0 ? 0 : (node + refine - 1) / refine;
}

std::size_t n_star_time(double t, double T, std::size_t n_steps) {
  if (!(T > 0.0) || n_steps == 0) throw std::invalid_argument("n_star_time: bad grid");
  if (t <= 0.0) return 0;
  const double dt = T / static_cast<double>(n_steps);
  // snap to the grid before rounding up so times sitting on a node stay there
  const auto n = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
  return std::min(n, n_steps);
}

InterpolantSet build_interpolants(const OperatorSet& ops, const SchemePath& path,
                                  const SigmaN& sn, const WienerPath& wiener,
                                  const ForcingSpec& forcing) {
  if (path.space != ops.space)
    throw std::invalid_argument("build_interpolants: path/operator space mismatch");
  if (wiener.master_steps % path.n_steps != 0)
    throw std::invalid_argument("build_interpolants: scheme grid not nested in master grid");

  InterpolantSet ip;
  ip.space = path.space;
  ip.T = path.T;
  ip.dt = path.dt;
  ip.n_steps = path.n_steps;
  ip.master_steps = wiener.master_steps;
  ip.refine = wiener.master_steps / path.n_steps;
  ip.h = path.T / static_cast<double>(wiener.master_steps);
  ip.states = path.states;
  ip.noise_incr = path.noise_incr;
  ip.ell_incr = path.ell_incr;
  ip.cell_load = forcing_values(forcing, path.space, wiener);

  const std::size_t m = ip.master_steps;
  ip.ell_cum.reserve(m + 1);
  ip.stoch_cum.reserve(m + 1);
  ip.drift_cum.reserve(m + 1);
  ip.ell_cum.push_back(zero_state(ip.space));
  ip.stoch_cum.push_back(zero_state(ip.space));
  ip.drift_cum.push_back(zero_state(ip.space));

  State drift_cell = apply_drift(ops, 0.0, ip.states[0]);
  ip.drift_first = drift_cell;
  std::size_t drift_owner = 0;

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t label = cell_label(ip, i);
    if (label != drift_owner) {
      drift_owner = label;
      drift_cell = apply_drift(ops, ip.dt * static_cast<double>(label), ip.states[label]);
    }

    State next_ell{ip.space, ip.ell_cum.back().c + ip.h * ip.cell_load[i].c};
    ip.ell_cum.push_back(std::move(next_ell));

    State next_drift{ip.space, ip.drift_cum.back().c + ip.h * drift_cell.c};
    ip.drift_cum.push_back(std::move(next_drift));

    State incr = sn.base && sn.base->k_dims > 0
                     ? sigma_n_increment(sn, ip.dt * static_cast<double>(label),
                                         ip.states[label],
                                         wiener.dW.row(static_cast<Eigen::Index>(i))
                                             .transpose())
                     : zero_state(ip.space);
    State next_stoch{ip.space, ip.stoch_cum.back().c + incr.c};
    ip.stoch_cum.push_back(std::move(next_stoch));
  }
  return ip;
}

State step_at_node(const InterpolantSet& ip, std::size_t i) {
  const std::size_t ns = n_star_node(i, ip.refine);
  return ip.states[ns == 0 ? 0 : ns - 1];
}

State interp_at_node(const InterpolantSet& ip, std::size_t i) {
  if (i == 0) return ip.states[0];
  const std::size_t mlab = n_star_node(i, ip.refine) - 1;
  if (mlab == 0) return ip.states[0];
  const double theta = (static_cast<double>(i) -
                        static_cast<double>(mlab * ip.refine)) /
                       static_cast<double>(ip.refine);
  return State{ip.space, ip.states[mlab - 1].c +
                             theta * (ip.states[mlab].c - ip.states[mlab - 1].c)};
}

State ed1_at_node(const InterpolantSet& ip, std::size_t i) {
  const double s = ip.h * static_cast<double>(i);
  return State{ip.space, -std::min(ip.dt, s) * ip.drift_first.c};
}

State ed2_at_node(const InterpolantSet& ip, std::size_t i) {
  if (i == 0) return zero_state(ip.space);
  const std::size_t mlab = n_star_node(i, ip.refine) - 1;
  const std::size_t base = mlab * ip.refine;
  State out{ip.space, -(ip.ell_cum[i].c - ip.ell_cum[base].c)};
  if (i > ip.refine) {
    const double tail = ip.h * static_cast<double>((mlab + 1) * ip.refine - i);
    out.c -= tail * ip.ell_incr[mlab - 1].c;
  }
  return out;
}

State es1_at_node(const InterpolantSet& ip, std::size_t i) {
  if (i <= ip.refine) return zero_state(ip.space);
  const std::size_t mlab = n_star_node(i, ip.refine) - 1;
  const double frac = static_cast<double>((mlab + 1) * ip.refine - i) /
                      static_cast<double>(ip.refine);
  return State{ip.space, -frac * ip.noise_incr[mlab - 1].c};
}

State es2_at_node(const InterpolantSet& ip, std::size_t i) {
  if (i == 0) return zero_state(ip.space);
  const std::size_t mlab = n_star_node(i, ip.refine) - 1;
  const std::size_t base = mlab * ip.refine;
  return State{ip.space, -(ip.stoch_cum[i].c - ip.stoch_cum[base].c)};
}

State ustar_at_node(const InterpolantSet& ip, std::size_t i) {
  return State{ip.space, interp_at_node(ip, i).c - es1_at_node(ip, i).c -
                             es2_at_node(ip, i).c};
}

State ustarstar_at_node(const InterpolantSet& ip, std::size_t i) {
  return State{ip.space, ustar_at_node(ip, i).c - ed1_at_node(ip, i).c -
                             ed2_at_node(ip, i).c};
}

CellSegment gap_on_cell(const InterpolantSet& ip, std::size_t i) {
  const std::size_t mlab = cell_label(ip, i);
  if (mlab == 0) return {zero_state(ip.space), zero_state(ip.space)};
  const Eigen::VectorXd du = ip.states[mlab].c - ip.states[mlab - 1].c;
  const double right_node = static_cast<double>((mlab + 1) * ip.refine);
  const double fl = (right_node - static_cast<double>(i)) /
                    static_cast<double>(ip.refine);
  const double fr = (right_node - static_cast<double>(i + 1)) /
                    static_cast<double>(ip.refine);
  return {State{ip.space, fl * du}, State{ip.space, fr * du}};
}

CellSegment ed_on_cell(const InterpolantSet& ip, std::size_t i) {
  const std::size_t mlab = cell_label(ip, i);
  const std::size_t base = mlab * ip.refine;
  const double sl = ip.h * static_cast<double>(i);
  const double sr = ip.h * static_cast<double>(i + 1);

  State left{ip.space, -std::min(ip.dt, sl) * ip.drift_first.c -
                           (ip.ell_cum[i].c - ip.ell_cum[base].c)};
  State right{ip.space, -std::min(ip.dt, sr) * ip.drift_first.c -
                            (ip.ell_cum[i + 1].c - ip.ell_cum[base].c)};
  if (mlab >= 1) {
    const double rn = ip.h * static_cast<double>((mlab + 1) * ip.refine);
    left.c -= (rn - sl) * ip.ell_incr[mlab - 1].c;
    right.c -= (rn - sr) * ip.ell_incr[mlab - 1].c;
  }
  return {std::move(left), std::move(right)};
}

CellSegment es1_on_cell(const InterpolantSet& ip, std::size_t i) {
  const std::size_t mlab = cell_label(ip, i);
  if (mlab == 0) return {zero_state(ip.space), zero_state(ip.space)};
  const double right_node = static_cast<double>((mlab + 1) * ip.refine);
  const double fl = (right_node - static_cast<double>(i)) /
                    static_cast<double>(ip.refine);
  const double fr = (right_node - static_cast<double>(i + 1)) /
                    static_cast<double>(ip.refine);
  const Eigen::VectorXd& ni = ip.noise_incr[mlab - 1].c;
  return {State{ip.space, -fl * ni}, State{ip.space, -fr * ni}};
}

CellSegment es2_on_cell(const InterpolantSet& ip, std::size_t i) {
  const std::size_t mlab = cell_label(ip, i);
  const std::size_t base = mlab * ip.refine;
  return {State{ip.space, -(ip.stoch_cum[i].c - ip.stoch_cum[base].c)},
          State{ip.space, -(ip.stoch_cum[i + 1].c - ip.stoch_cum[base].c)}};
}

CellSegment es_on_cell(const InterpolantSet& ip, std::size_t i) {
  CellSegment a = es1_on_cell(ip, i);
  const CellSegment b = es2_on_cell(ip, i);
  a.left.c += b.left.c;
  a.right.c += b.right.c;
  return a;
}

double l2_sq_cell_linear(const InterpolantSet& ip,
                         CellSegment (*segment)(const InterpolantSet&, std::size_t),
                         NormLevel lvl) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ip.master_steps; ++i) {
    const CellSegment seg = segment(ip, i);
    const State mid{ip.space, 0.5 * (seg.left.c + seg.right.c)};
    acc += ip.h / 6.0 *
           (norm_sq(seg.left, lvl) + 4.0 * norm_sq(mid, lvl) + norm_sq(seg.right, lvl));
  }
  return acc;
}

double step_l2_sq(const InterpolantSet& ip, NormLevel lvl) {
  double acc = 0.0;
  for (std::size_t n = 0; n < ip.n_steps; ++n) acc += norm_sq(ip.states[n], lvl);
  return ip.dt * acc;
}

double step_sup_sq(const InterpolantSet& ip, NormLevel lvl) {
  double best = 0.0;
  for (std::size_t n = 0; n < ip.n_steps; ++n)
    best = std::max(best, norm_sq(ip.states[n], lvl));
  return best;
}

GapIdentity interpolation_gap(const InterpolantSet& ip) {
  GapIdentity gi;
  gi.quadrature = l2_sq_cell_linear(ip, &gap_on_cell, NormLevel::H);
  double acc = 0.0;
  for (std::size_t n = 1; n + 1 <= ip.n_steps; ++n)
    acc += (ip.states[n].c - ip.states[n - 1].c).squaredNorm();
  gi.closed_form = ip.dt / 3.0 * acc;
  const double scale = std::max(gi.closed_form, 1e-300);
  gi.rel_err = std::abs(gi.quadrature - gi.closed_form) / scale;
  return gi;
}

double reconstruction_residual(const InterpolantSet& ip) {
  double worst = 0.0;
  double biggest = 0.0;
  for (std::size_t i = 0; i <= ip.master_steps; ++i) {
    const State lhs = ustarstar_at_node(ip, i);
    const Eigen::VectorXd rhs = ip.states[0].c + ip.drift_cum[i].c +
                                ip.ell_cum[i].c + ip.stoch_cum[i].c;
    worst = std::max(worst, (lhs.c - rhs).norm());
    biggest = std::max(biggest, rhs.norm());
  }
  return worst / (1.0 + biggest);
}

ErrorNorms error_norms(const InterpolantSet& ip) {
  ErrorNorms en;
  en.ed_l2vdual = l2_sq_cell_linear(ip, &ed_on_cell, NormLevel::Vdual);
  en.es_l2h = l2_sq_cell_linear(ip, &es_on_cell, NormLevel::H);
  en.es_l2v = l2_sq_cell_linear(ip, &es_on_cell, NormLevel::V);
  for (std::size_t i = 0; i < ip.master_steps; ++i) {
    const CellSegment ed = ed_on_cell(ip, i);
    en.ed_supvdual = std::max({en.ed_supvdual, norm_sq(ed.left, NormLevel::Vdual),
                               norm_sq(ed.right, NormLevel::Vdual)});
    const CellSegment es = es_on_cell(ip, i);
    en.es_suph = std::max({en.es_suph, es.left.c.squaredNorm(),
                           es.right.c.squaredNorm()});
  }
  return en;
}

double shift_seminorm(const InterpolantSet& ip, unsigned j) {
  if (j == 0) throw std::invalid_argument("shift_seminorm: j starts at 1");
  const double theta_max = std::pow(static_cast<double>(j), -6.0);
  const auto q_max = static_cast<std::size_t>(theta_max / ip.h + 1e-9);
  if (q_max == 0) return 0.0;

  double sup = 0.0;
  for (std::size_t q = 1; q <= std::min(q_max, ip.master_steps); ++q) {
    double integral = 0.0;
    for (std::size_t i = 0; i + q < ip.master_steps; ++i) {
      const State& a = ip.states[cell_label(ip, i)];
      const State& b = ip.states[cell_label(ip, i + q)];
      const State diff{ip.space, b.c - a.c};
      integral += ip.h * std::pow(norm_sq(diff, NormLevel::V2dual), 2.0 / 3.0);
    }
    sup = std::max(sup, integral);
  }
  return std::pow(static_cast<double>(j) * sup, 0.75);
}

double frac_sobolev_norm(const InterpolantSet& ip, double alpha, double p,
                         std::size_t node_cap) {
  if (!(p > 0.0)) throw std::invalid_argument("frac_sobolev_norm: p must be positive");
  if (node_cap < 3) node_cap = 3;
  const std::size_t m = ip.master_steps;
  const std::size_t stride =
      std::max<std::size_t>(1, (m + node_cap - 2) / (node_cap - 1));

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m; i += stride) idx.push_back(i);
  idx.push_back(m);

  const std::size_t n = idx.size();
  std::vector<double> t(n), w(n);
  for (std::size_t a = 0; a < n; ++a) t[a] = ip.h * static_cast<double>(idx[a]);
  for (std::size_t a = 0; a < n; ++a) {
    const double lo = a == 0 ? t[0] : 0.5 * (t[a - 1] + t[a]);
    const double hi = a + 1 == n ? t[n - 1] : 0.5 * (t[a] + t[a + 1]);
    w[a] = hi - lo;
  }

  double lp = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    lp += w[a] * std::pow(norm_sq(ip.stoch_cum[idx[a]], NormLevel::V2dual), 0.5 * p);

  double dsum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const State diff{ip.space, ip.stoch_cum[idx[b]].c - ip.stoch_cum[idx[a]].c};
      const double dist = t[b] - t[a];
      dsum += 2.0 * w[a] * w[b] *
              std::pow(norm_sq(diff, NormLevel::V2dual), 0.5 * p) /
              std::pow(dist, 1.0 + alpha * p);
    }
  }
  return std::pow(lp + dsum, 1.0 / p);
}

PathStats compute_path_stats(const InterpolantSet& ip, unsigned j_max,
                             double alpha, double p, std::size_t node_cap) {
  PathStats st;
  st.l2h = step_l2_sq(ip, NormLevel::H);
  st.l2v = step_l2_sq(ip, NormLevel::V);
  st.linf_h = step_sup_sq(ip, NormLevel::H);
  const ErrorNorms en = error_norms(ip);
  st.ed_l2vdual = en.ed_l2vdual;
  st.es_l2h = en.es_l2h;
  st.es_l2v = en.es_l2v;
  st.es_linfh = en.es_suph;
  st.shift.reserve(j_max);
  for (unsigned j = 1; j <= j_max; ++j) st.shift.push_back(shift_seminorm(ip, j));
  st.fracsob = frac_sobolev_norm(ip, alpha, p, node_cap);
  return st;
}

}  // namespace sge
