#include "sge/scheme.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sge {

Thresholds scheme_thresholds(double T, double c3, double c4) {
  if (!(T > 0.0)) throw std::invalid_argument("scheme_thresholds: T must be positive");
  Thresholds th;
  th.c5 = 8.0 * c4 + 80.0 * c3 * c3;
  th.N0 = static_cast<std::size_t>(std::ceil(4.0 * T * c4));
  th.N1 = static_cast<std::size_t>(std::ceil(12.0 * T * th.c5));
  th.N0 = std::max<std::size_t>(th.N0, 1);
  th.N1 = std::max<std::size_t>(th.N1, 1);
  return th;
}

double initial_growth_product(const State& u) {
  return (1.0 + norm_sq(u, NormLevel::V)) * (1.0 + norm_sq(u, NormLevel::V2));
}

State prepare_initial(const State& u0, std::size_t n_steps) {
  if (!u0.space) throw std::invalid_argument("prepare_initial: empty state");
  if (n_steps == 0) throw std::invalid_argument("prepare_initial: n_steps must be positive");
  const auto dim = static_cast<Eigen::Index>(u0.space->dim);
  const auto cap = std::min<Eigen::Index>(dim, static_cast<Eigen::Index>(n_steps));
  const double budget = static_cast<double>(n_steps);  // V2 norm squared limit

  State out = zero_state(u0.space);
  double v2 = 0.0;
  for (Eigen::Index j = 0; j < cap; ++j) {
    const double w = u0.space->weights[j];
    const double add = w * w * u0.c[j] * u0.c[j];
    if (v2 + add > budget) break;
    v2 += add;
    out.c[j] = u0.c[j];
  }
  return out;
}

std::vector<State> forcing_values(const ForcingSpec& forcing, const SpacePtr& space,
                                  const WienerPath& wiener) {
  const std::size_t m = wiener.master_steps;
  const double h = wiener.T / static_cast<double>(m);
  std::vector<State> values;
  values.reserve(m);

  if (forcing.kind == ForcingKind::none) {
    for (std::size_t i = 0; i < m; ++i) values.push_back(zero_state(space));
    return values;
  }
  if (forcing.profile.space != space)
    throw std::invalid_argument("forcing_values: profile space mismatch");

  for (std::size_t i = 0; i < m; ++i) {
    const double t_mid = (static_cast<double>(i) + 0.5) * h;
    double factor = 0.0;
    switch (forcing.kind) {
      case ForcingKind::deterministic:
        factor = forcing.shape == ForcingShape::sine
                     ? forcing.amp * std::sin(forcing.freq * t_mid)
                     : forcing.amp;
        break;
      case ForcingKind::wind_proxy: {
        if (forcing.source_dir >= wiener.k_dims)
          throw std::invalid_argument("forcing_values: wind source direction out of range");
        const std::size_t w = std::max<std::size_t>(forcing.window, 1);
        const std::size_t lo = i >= w ? i - w : 0;
        double acc = 0.0;
        for (std::size_t q = lo; q < i; ++q)
          acc += wiener.dW(static_cast<Eigen::Index>(q),
                           static_cast<Eigen::Index>(forcing.source_dir));
        // normalize by the window's standard deviation so gain is O(1)
        factor = 1.0 + forcing.gain * acc / std::sqrt(h * static_cast<double>(w));
        break;
      }
      case ForcingKind::none:
        break;
    }
    values.push_back(State{space, factor * forcing.profile.c});
  }
  return values;
}

AveragedForcing average_forcing(const std::vector<State>& cell_values,
                                const SpacePtr& space, double T,
                                std::size_t n_steps) {
  const std::size_t m = cell_values.size();
  if (n_steps == 0 || m % n_steps != 0)
    throw std::invalid_argument("average_forcing: steps must divide the master grid");
  const std::size_t r = m / n_steps;
  const double h = T / static_cast<double>(m);

  AveragedForcing out;
  out.ell.reserve(n_steps);
  out.zeta.assign(n_steps, 0.0);
  for (std::size_t n = 0; n < n_steps; ++n) {
    State avg = zero_state(space);
    for (std::size_t i = 0; i < r; ++i) {
      const State& v = cell_values[n * r + i];
      avg.c += v.c;
      out.zeta[n] += h * norm_sq(v, NormLevel::Vdual);
    }
    avg.c /= static_cast<double>(r);
    out.ell.push_back(std::move(avg));
  }
  return out;
}

namespace {

// Residual of the implicit step equation at u, in place.
void step_residual(const OperatorSet& ops, double t_n, double dt, const State& u,
                   const Eigen::VectorXd& rhs, State& scratch, Eigen::VectorXd& g) {
  g = u.c + dt * (ops.A * u.c) + dt * (ops.E * u.c);
  if (ops.b_pair) {
    scratch.c.setZero();
    ops.b_pair(u, u, scratch);
    g += dt * scratch.c;
  }
  if (ops.xi) {
    scratch.c.setZero();
    ops.xi(t_n, u, scratch);
    g -= dt * scratch.c;
  }
  g -= rhs;
}

double dual2_norm(const SpacePtr& space, const Eigen::VectorXd& g) {
  return std::sqrt(g.cwiseAbs2().dot(space->weight_pow(-2)));
}

}  // namespace

StepResult implicit_step(const OperatorSet& ops, const SchemeConfig& cfg,
                         double t_n, double dt, const State& u_prev,
                         const State& rhs_noise, const State& ell_n) {
  if (!(dt > 0.0)) throw std::invalid_argument("implicit_step: dt must be positive");
  const auto& space = ops.space;
  const Eigen::VectorXd rhs = u_prev.c + dt * ell_n.c + rhs_noise.c;

  State u{space, u_prev.c};  // warm start from the previous state
  State scratch = zero_state(space);
  Eigen::VectorXd g(u.c.size());

  step_residual(ops, t_n, dt, u, rhs, scratch, g);
  double res = dual2_norm(space, g);
  std::size_t iters = 0;

  if (cfg.solver == SolverKind::newton) {
    const auto dim = u.c.size();
    Eigen::MatrixXd jac(dim, dim);
    while (res > cfg.solve_tol && iters < cfg.max_iters) {
      jac = Eigen::MatrixXd::Identity(dim, dim) + dt * ops.A + dt * ops.E;
      if (ops.b_jacobian) jac += dt * ops.b_jacobian(u);
      if (ops.xi_jacobian) jac -= dt * ops.xi_jacobian(t_n, u);
      u.c -= jac.partialPivLu().solve(g);
      step_residual(ops, t_n, dt, u, rhs, scratch, g);
      res = dual2_norm(space, g);
      ++iters;
    }
  } else {
    double omega = 1.0 / (1.0 + dt * space->weights[space->dim - 1]);
    Eigen::VectorXd best = u.c;
    double best_res = res;
    while (best_res > cfg.solve_tol && iters < cfg.max_iters) {
      u.c = best - omega * g;
      step_residual(ops, t_n, dt, u, rhs, scratch, g);
      res = dual2_norm(space, g);
      if (res < best_res) {
        best = u.c;
        best_res = res;
        omega = std::min(1.0, omega * 1.25);
      } else {
        omega *= 0.5;
        if (omega < 1e-14) break;
        u.c = best;
        step_residual(ops, t_n, dt, u, rhs, scratch, g);
        res = best_res;
      }
      ++iters;
    }
    u.c = best;
    res = best_res;
  }

  if (res > cfg.solve_tol)
    throw std::runtime_error("implicit_step: nonlinear solver did not reach tolerance");

  StepResult out;
  out.state = u;
  out.cert.iterations = iters;
  out.cert.residual = res;

  // A-posteriori energy certificate. The dissipation margin
  // dt (a(u,u) - c1 ||u||^2) plus the solver slack is what keeps it true.
  const State& un = out.state;
  State du{space, un.c - u_prev.c};
  const double lhs = dot_h(du, un) + dt * ops.c1 * norm_sq(un, NormLevel::V);
  double rhs_pair = dot_h(ell_n, un);
  if (ops.xi) {
    scratch.c.setZero();
    ops.xi(t_n, un, scratch);
    rhs_pair += dot_h(scratch, un);
  }
  const double rhs_energy = dt * rhs_pair + dot_h(rhs_noise, un);
  out.cert.slack = rhs_energy - lhs;
  out.cert.scale = 1.0 + un.c.squaredNorm();
  out.cert.accepted = out.cert.slack >= -cfg.cert_tol * out.cert.scale;
  return out;
}

SchemePath run_path(const OperatorSet& ops, const SchemeConfig& cfg,
                    const SigmaN& sn, const WienerPath& wiener,
                    const ForcingSpec& forcing, const State& u0,
                    std::size_t n_steps) {
  if (!ops.space) throw std::invalid_argument("run_path: operator set has no space");
  if (sn.base && sn.base->space != ops.space)
    throw std::invalid_argument("run_path: noise space mismatch");

  SchemePath path;
  path.space = ops.space;
  path.T = wiener.T;
  path.n_steps = n_steps;
  path.dt = wiener.T / static_cast<double>(n_steps);
  path.eta = scheme_increments(wiener, n_steps);

  const auto values = forcing_values(forcing, ops.space, wiener);
  auto avg = average_forcing(values, ops.space, wiener.T, n_steps);
  path.ell_incr = std::move(avg.ell);
  path.zeta = std::move(avg.zeta);

  path.states.reserve(n_steps + 1);
  path.states.push_back(prepare_initial(u0, n_steps));
  path.noise_incr.reserve(n_steps);
  path.certs.reserve(n_steps);
  path.all_accepted = true;

  for (std::size_t n = 1; n <= n_steps; ++n) {
    const State& prev = path.states.back();
    const double t_prev = path.dt * static_cast<double>(n - 1);
    const bool live = sn.base && sn.base->k_dims > 0;
    State noise = live ? sigma_n_increment(sn, t_prev, prev,
                                           path.eta.row(static_cast<Eigen::Index>(n - 1))
                                               .transpose())
                       : zero_state(ops.space);
    auto step = implicit_step(ops, cfg, path.dt * static_cast<double>(n), path.dt,
                              prev, noise, path.ell_incr[n - 1]);
    path.all_accepted = path.all_accepted && step.cert.accepted;
    path.states.push_back(std::move(step.state));
    path.noise_incr.push_back(std::move(noise));
    path.certs.push_back(step.cert);
  }
  return path;
}

EnergyReport path_energy_report(const OperatorSet& ops, const SchemePath& path) {
  EnergyReport rep;
  const std::size_t n_steps = path.n_steps;
  rep.per_step_slack.reserve(n_steps);
  rep.summed_margin.reserve(n_steps);
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.min_summed_margin = std::numeric_limits<double>::infinity();

  for (std::size_t n = 1; n <= n_steps; ++n) {
    const State& un = path.states[n];
    const State& up = path.states[n - 1];
    const StepCertificate& cert = path.certs[n - 1];
    rep.per_step_slack.push_back(cert.slack);
    rep.min_slack = std::min(rep.min_slack, cert.slack);
    if (!cert.accepted) ++rep.rejected_steps;

    const State& noise = path.noise_incr[n - 1];
    const double du_sq = (un.c - up.c).squaredNorm();
    const double lhs = un.c.squaredNorm() - up.c.squaredNorm() + 0.5 * du_sq +
                       path.dt * ops.c1 * norm_sq(un, NormLevel::V);
    const double rhs = path.zeta[n - 1] / ops.c1 +
                       4.0 * path.dt * ops.c4 * (1.0 + un.c.squaredNorm()) +
                       2.0 * dot_h(noise, up) + 2.0 * noise.c.squaredNorm();
    const double margin = rhs - lhs;
    rep.summed_margin.push_back(margin);
    rep.min_summed_margin = std::min(rep.min_summed_margin, margin);
  }
  return rep;
}

double uniform_bound_statistic(const SchemePath& path) {
  double max_h = 0.0;
  for (std::size_t m = 0; m + 1 <= path.n_steps; ++m)
    max_h = std::max(max_h, path.states[m].c.squaredNorm());
  double acc = max_h;
  for (std::size_t m = 1; m <= path.n_steps; ++m) {
    acc += (path.states[m].c - path.states[m - 1].c).squaredNorm();
    acc += path.dt * norm_sq(path.states[m], NormLevel::V);
  }
  return acc;
}

}  // namespace sge
