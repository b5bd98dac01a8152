#include "sge/experiment.hpp"

#include "sge/csvio.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace sge {

State build_profile(const SpacePtr& space, const ProfileCfg& cfg) {
  State out = zero_state(space);
  switch (cfg.kind) {
    case ProfileCfg::Kind::zero:
      break;
    case ProfileCfg::Kind::coeffs:
      for (const auto& [idx, val] : cfg.coeffs) {
        if (idx >= space->dim)
          throw std::invalid_argument("profile: coordinate index out of range");
        out.c[static_cast<Eigen::Index>(idx)] = val;
      }
      break;
    case ProfileCfg::Kind::smooth_decay:
      for (Eigen::Index j = 0; j < out.c.size(); ++j)
        out.c[j] = cfg.amp * std::pow(space->weights[j], -cfg.decay);
      break;
  }
  return out;
}

ForcingSpec build_forcing(const SpacePtr& space, const ForcingCfg& cfg) {
  ForcingSpec f;
  f.kind = cfg.kind;
  f.shape = cfg.shape;
  f.amp = cfg.amp;
  f.freq = cfg.freq;
  f.gain = cfg.gain;
  f.window = cfg.window;
  f.source_dir = cfg.source_dir;
  if (cfg.kind != ForcingKind::none) f.profile = build_profile(space, cfg.profile);
  return f;
}

double evaluate_functional(const FunctionalSpec& f, const SchemePath& path) {
  switch (f.kind) {
    case FunctionalSpec::Kind::energy_l2: {
      double acc = 0.0;
      for (std::size_t n = 0; n < path.n_steps; ++n)
        acc += path.states[n].c.squaredNorm();
      return path.dt * acc;
    }
    case FunctionalSpec::Kind::endpoint_h_norm:
      return path.states.back().c.norm();
    case FunctionalSpec::Kind::mode_k_endpoint:
      if (f.mode_index >= path.space->dim)
        throw std::invalid_argument("functional: mode index out of range");
      return path.states.back().c[static_cast<Eigen::Index>(f.mode_index)];
    case FunctionalSpec::Kind::max_h_norm: {
      double best = 0.0;
      for (const auto& s : path.states) best = std::max(best, s.c.norm());
      return best;
    }
  }
  throw std::invalid_argument("functional: unknown kind");
}

std::string functional_name(const FunctionalSpec& f) {
  switch (f.kind) {
    case FunctionalSpec::Kind::energy_l2: return "energy_l2";
    case FunctionalSpec::Kind::endpoint_h_norm: return "endpoint_h_norm";
    case FunctionalSpec::Kind::mode_k_endpoint:
      return "mode_" + std::to_string(f.mode_index) + "_endpoint";
    case FunctionalSpec::Kind::max_h_norm: return "max_h_norm";
  }
  return "unknown";
}

namespace {

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::vector<State> probe_states(const SpacePtr& space, std::size_t count,
                                std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<State> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    State u = zero_state(space);
    for (Eigen::Index j = 0; j < u.c.size(); ++j) u.c[j] = normal(gen);
    out.push_back(std::move(u));
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.ladder.empty())
    throw std::invalid_argument("experiment: ladder must not be empty");
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    if (cfg.ladder[i] == 0)
      throw std::invalid_argument("experiment: ladder entries must be positive");
    if (i > 0 && cfg.ladder[i] <= cfg.ladder[i - 1])
      throw std::invalid_argument("experiment: ladder must be strictly increasing");
  }
  if (cfg.ensemble == 0)
    throw std::invalid_argument("experiment: ensemble must be positive");
  if (!(cfg.scheme.T > 0.0))
    throw std::invalid_argument("experiment: horizon must be positive");
  if (cfg.forcing.kind == ForcingKind::wind_proxy &&
      cfg.noise.regime == NoiseRegime::none && cfg.forcing.source_dir != 0)
    throw std::invalid_argument("experiment: wind forcing needs Brownian direction 0");
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
  validate_config(cfg_in);

  ExperimentResult res;
  res.cfg = cfg_in;
  ExperimentConfig& cfg = res.cfg;
  if (cfg.master_steps == 0) cfg.master_steps = 4 * cfg.ladder.back();
  for (const std::size_t n : cfg.ladder)
    if (cfg.master_steps % n != 0)
      throw std::invalid_argument("experiment: every rung must divide master_steps");
  if (cfg.workers == 0) cfg.workers = 1;
  if (cfg.functionals.empty())
    cfg.functionals.push_back({FunctionalSpec::Kind::energy_l2, 0});

  OperatorSet ops = make_model(cfg.model);
  const SpacePtr space = ops.space;
  NoisePtr noise = make_noise(space, cfg.noise);
  attach_noise(ops, noise);
  const bool has_noise = noise->regime != NoiseRegime::none;

  res.axioms = verify_axioms(ops, cfg.axiom_samples, mix_seed(cfg.seed, 0xAF1));
  if (!res.axioms.valid)
    throw std::runtime_error("experiment: operator axioms failed, refusing to run");
  res.thresholds = scheme_thresholds(cfg.scheme.T, ops.c3, ops.c4);

  const State u0 = build_profile(space, cfg.u0);
  const ForcingSpec forcing = build_forcing(space, cfg.forcing);
  const std::size_t wiener_dims = std::max<std::size_t>(1, noise->k_dims);
  const auto probes = probe_states(space, 64, mix_seed(cfg.seed, 0x9B0BE));

  std::vector<std::string> fnames;
  for (const auto& f : cfg.functionals) fnames.push_back(functional_name(f));

  for (const std::size_t n_steps : cfg.ladder) {
    RungSummary rung;
    rung.n_steps = n_steps;
    rung.rows.resize(cfg.ensemble);
    rung.uniform_stat.resize(cfg.ensemble);
    rung.gap_closed.resize(cfg.ensemble);
    rung.gap_rel_err.resize(cfg.ensemble);
    rung.recon_resid.resize(cfg.ensemble);
    rung.min_slack.resize(cfg.ensemble);
    rung.min_summed_margin.resize(cfg.ensemble);
    rung.es_bounded.resize(cfg.ensemble);
    // Resolve sample slots before the parallel phase; workers only index.
    std::vector<std::vector<double>*> fslots;
    for (const auto& name : fnames) {
      auto& vec = rung.functional_samples[name];
      vec.resize(cfg.ensemble);
      fslots.push_back(&vec);
    }

    std::vector<DiscreteMartingale> marts(cfg.ensemble);
    std::vector<std::size_t> rejected(cfg.ensemble, 0);
    std::vector<std::exception_ptr> errors(cfg.ensemble);

    const SigmaN sn = project_sigma(noise, static_cast<double>(n_steps));

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= cfg.ensemble) break;
        try {
          const std::uint64_t path_seed =
              cfg.independent_paths
                  ? mix_seed(mix_seed(cfg.seed, 0x1000 + n_steps), idx)
                  : mix_seed(cfg.seed, idx);
          const WienerPath wiener =
              sample_wiener(cfg.scheme.T, cfg.master_steps, wiener_dims, path_seed);
          const SchemePath path =
              run_path(ops, cfg.scheme, sn, wiener, forcing, u0, n_steps);
          const EnergyReport erep = path_energy_report(ops, path);
          const InterpolantSet ip = build_interpolants(ops, path, sn, wiener, forcing);

          rung.rows[idx] =
              compute_path_stats(ip, cfg.j_max, cfg.fs_alpha, cfg.fs_p, cfg.fs_node_cap);
          const GapIdentity gi = interpolation_gap(ip);
          rung.gap_closed[idx] = gi.closed_form;
          rung.gap_rel_err[idx] = gi.rel_err;
          rung.recon_resid[idx] = reconstruction_residual(ip);
          rung.uniform_stat[idx] = uniform_bound_statistic(path);
          rung.min_slack[idx] = erep.min_slack;
          rung.min_summed_margin[idx] = erep.min_summed_margin;
          rung.es_bounded[idx] = rung.rows[idx].es_l2v + rung.rows[idx].es_linfh;
          rejected[idx] = erep.rejected_steps;
          for (std::size_t fi = 0; fi < cfg.functionals.size(); ++fi)
            (*fslots[fi])[idx] = evaluate_functional(cfg.functionals[fi], path);
          if (has_noise)
            marts[idx] = build_martingale(path, sn, 1, cfg.bdg_stop_level);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      }
    };

    const std::size_t n_workers = std::min(cfg.workers, cfg.ensemble);
    if (n_workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n_workers);
      for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);

    for (const std::size_t rj : rejected) rung.rejected_steps += rj;
    if (has_noise) {
      rung.bdg = bdg_check(marts, cfg.bdg_q);
      rung.cutoff = sigma_n_conditions(sn, 1000, mix_seed(cfg.seed, n_steps));
      double tail = 0.0;
      for (const auto& u : probes) tail += sigma_tail_sq(sn, 0.0, u);
      rung.sigma_tail_mean = tail / static_cast<double>(probes.size());
    }
    res.rungs.push_back(std::move(rung));
  }

  // Law distances between consecutive rungs, per functional.
  for (std::size_t ri = 0; ri + 1 < res.rungs.size(); ++ri) {
    for (const auto& name : fnames) {
      LawDistance ld;
      ld.coarse = res.rungs[ri].n_steps;
      ld.fine = res.rungs[ri + 1].n_steps;
      ld.functional = name;
      const auto& a = res.rungs[ri].functional_samples.at(name);
      const auto& b = res.rungs[ri + 1].functional_samples.at(name);
      ld.ks = ks_statistic(a, b);
      ld.w1 = wasserstein1(a, b);
      ld.ks_tol = ks_tolerance(a.size(), b.size());
      res.law.push_back(std::move(ld));
    }
  }

  // ---- verdicts ----
  auto add = [&res](std::string id, double stat, double thr, bool pass,
                    std::string note) {
    res.verdicts.push_back(
        {std::move(id), stat, thr, pass, std::move(note)});
  };

  add("axioms-valid", res.axioms.valid ? 1.0 : 0.0, 1.0, res.axioms.valid,
      "c1_hat=" + format_g17(res.axioms.c1_hat) +
          " eig_min=" + format_g17(res.axioms.coercivity_eig_min));

  const double min_rung = static_cast<double>(cfg.ladder.front());
  add("thresholds", min_rung, static_cast<double>(res.thresholds.N0),
      cfg.ladder.front() >= res.thresholds.N0,
      "N0=" + std::to_string(res.thresholds.N0) +
          " N1=" + std::to_string(res.thresholds.N1) +
          " c5=" + format_g17(res.thresholds.c5));
  if (cfg.ladder.size() >= 2)
    add("ladder-above-n1", min_rung, static_cast<double>(res.thresholds.N1),
        cfg.ladder.front() >= res.thresholds.N1, "coarsest rung vs N1");

  {
    std::size_t total_rejected = 0;
    double min_slack = 0.0;
    for (const auto& rung : res.rungs) {
      total_rejected += rung.rejected_steps;
      for (const double s : rung.min_slack) min_slack = std::min(min_slack, s);
    }
    add("certificates", static_cast<double>(total_rejected), 0.0,
        total_rejected == 0, "min per-step slack=" + format_g17(min_slack));
  }

  {
    double min_margin = std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (const auto& rung : res.rungs) {
      for (const double v : rung.min_summed_margin) min_margin = std::min(min_margin, v);
      for (const double v : rung.uniform_stat) scale = std::max(scale, 1.0 + v);
    }
    const double thr = -1e-8 * scale;
    add("energy-pathwise", min_margin, thr, min_margin >= thr,
        "telescoped inequality margin");
  }

  {
    double worst = 0.0;
    for (const auto& rung : res.rungs)
      for (const double v : rung.recon_resid) worst = std::max(worst, v);
    add("reconstruction", worst, cfg.recon_tol, worst <= cfg.recon_tol,
        "max relative node residual");
  }

  {
    double worst = 0.0;
    for (const auto& rung : res.rungs)
      for (const double v : rung.gap_rel_err) worst = std::max(worst, v);
    add("gap-identity", worst, cfg.gap_tol, worst <= cfg.gap_tol,
        "quadrature vs closed form");
  }

  if (has_noise) {
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& rung : res.rungs)
      min_margin = std::min({min_margin, rung.cutoff.v_margin_min,
                             rung.cutoff.h_margin_min});
    add("sigma-cutoff", min_margin, 0.0, min_margin >= 0.0,
        "grouped margins of the cutoff conditions");
    if (res.rungs.size() >= 2) {
      double max_increase = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < res.rungs.size(); ++i)
        max_increase = std::max(max_increase, res.rungs[i + 1].sigma_tail_mean -
                                                  res.rungs[i].sigma_tail_mean);
      add("sigma-tail-monotone", max_increase, 0.0, max_increase <= 0.0,
          "cutoff remainder must not grow with N");
    }
  }

  auto ratio_verdict = [&](const std::string& id, auto getter) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < res.rungs.size(); ++i) {
      const SummaryStat coarse = summarize(getter(res.rungs[i]));
      const SummaryStat fine = summarize(getter(res.rungs[i + 1]));
      worst = std::max(worst, decay_ratio_upper(coarse, fine));
    }
    add(id, worst, cfg.decay_ratio_limit, worst <= cfg.decay_ratio_limit,
        "CI-adjusted ratio per refinement");
  };
  auto spread_verdict = [&](const std::string& id, auto getter, double limit) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& rung : res.rungs) {
      const SummaryStat s = summarize(getter(rung));
      lo = std::min(lo, s.mean);
      hi = std::max(hi, s.mean);
    }
    const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    add(id, spread, limit, spread <= limit, "relative spread of rung means");
  };

  if (res.rungs.size() >= 2) {
    ratio_verdict("gap-decay",
                  [](const RungSummary& r) { return r.gap_closed; });
    ratio_verdict("det-error-decay", [](const RungSummary& r) {
      std::vector<double> v;
      v.reserve(r.rows.size());
      for (const auto& row : r.rows) v.push_back(row.ed_l2vdual);
      return v;
    });
    ratio_verdict("stoch-error-decay", [](const RungSummary& r) {
      std::vector<double> v;
      v.reserve(r.rows.size());
      for (const auto& row : r.rows) v.push_back(row.es_l2h);
      return v;
    });
    spread_verdict("stoch-error-bounded",
                   [](const RungSummary& r) { return r.es_bounded; },
                   cfg.bounded_variation_limit);
    spread_verdict("uniform-bound-flat",
                   [](const RungSummary& r) { return r.uniform_stat; },
                   cfg.uniform_variation_limit);
  }

  if (res.rungs.size() >= 3) {
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::string note;
    for (const auto& name : fnames) {
      for (std::size_t i = 0; i + 2 < res.rungs.size(); ++i) {
        const LawDistance* first = nullptr;
        const LawDistance* second = nullptr;
        for (const auto& ld : res.law) {
          if (ld.functional != name) continue;
          if (ld.coarse == res.rungs[i].n_steps) first = &ld;
          if (ld.coarse == res.rungs[i + 1].n_steps) second = &ld;
        }
        if (!first || !second) continue;
        const double excess = second->ks - first->ks - 0.5 * (first->ks_tol + second->ks_tol);
        worst_excess = std::max(worst_excess, excess);
      }
    }
    add("law-distance-trend", worst_excess, 0.0, worst_excess <= 0.0,
        "KS distance must not grow under refinement (tolerance-adjusted)");

    if (!cfg.independent_paths) {
      double worst_median = 0.0;
      const auto& name = fnames.front();
      for (std::size_t i = 0; i + 2 < res.rungs.size(); ++i) {
        const auto& f0 = res.rungs[i].functional_samples.at(name);
        const auto& f1 = res.rungs[i + 1].functional_samples.at(name);
        const auto& f2 = res.rungs[i + 2].functional_samples.at(name);
        std::vector<double> ratios;
        for (std::size_t p = 0; p < f0.size(); ++p) {
          const double d1 = std::abs(f1[p] - f0[p]);
          const double d2 = std::abs(f2[p] - f1[p]);
          if (d1 > 0.0) ratios.push_back(d2 / d1);
        }
        if (!ratios.empty())
          worst_median = std::max(worst_median, median_of(std::move(ratios)));
      }
      add("coupling-median", worst_median, cfg.coupling_median_limit,
          worst_median <= cfg.coupling_median_limit,
          "median pathwise contraction of " + name);
    }
  }

  if (has_noise) {
    double worst_ratio = 0.0;
    bool pass = true;
    for (const auto& rung : res.rungs) {
      worst_ratio = std::max(worst_ratio, rung.bdg.ratio);
      pass = pass && rung.bdg.pass;
    }
    add("bdg-q1", worst_ratio, 1.0, pass,
        cfg.bdg_q == 1.0 ? "max over rungs of lhs/(3 rhs)"
                         : "fitted ratio only (q != 1)");
  }

  res.all_pass = true;
  for (const auto& v : res.verdicts) res.all_pass = res.all_pass && v.pass;
  return res;
}

}  // namespace sge
