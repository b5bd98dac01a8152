#include "sge/models.hpp"
#include "sge/noise.hpp"
#include "sge/scheme.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sge;

namespace {

OperatorSet diagonal_ops(std::vector<double> weights, double nu) {
  ModelSpec spec;
  spec.kind = ModelKind::diagonal_linear;
  spec.dim = weights.size();
  spec.weights = std::move(weights);
  spec.nu = nu;
  return make_model(spec);
}

SigmaN no_noise(const SpacePtr& sp, double level) {
  return project_sigma(make_noise(sp, NoiseCfg{}), level);
}

}  // namespace

TEST_CASE("step-count thresholds carry their closed forms") {
  // growth only in the correction drift
  const Thresholds a = scheme_thresholds(1.0, 0.0, 1.0);
  CHECK(a.N0 == 4);
  CHECK(a.c5 == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(a.N1 == 96);

  // growth only in the diffusion
  const Thresholds b = scheme_thresholds(1.0, 1.0, 0.0);
  CHECK(b.N0 == 1);  // never below one step
  CHECK(b.c5 == doctest::Approx(80.0).epsilon(1e-15));
  CHECK(b.N1 == 960);

  // short horizon divides everything
  const Thresholds c = scheme_thresholds(0.5, 0.25, 0.0);
  CHECK(c.c5 == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(c.N1 == 30);
}

TEST_CASE("initial datum is truncated against the step budget") {
  const auto sp = make_space(5, {1.0, 2.0, 3.0, 4.0, 5.0});
  const State ones = make_state(sp, {1.0, 1.0, 1.0, 1.0, 1.0});

  // squared second-rung terms 1,4,9,16,25; prefix stops when the sum would
  // exceed n_steps
  const State kept = prepare_initial(ones, 20);
  CHECK(kept.c[0] == 1.0);
  CHECK(kept.c[1] == 1.0);
  CHECK(kept.c[2] == 1.0);  // 1 + 4 + 9 = 14 <= 20
  CHECK(kept.c[3] == 0.0);  // + 16 would overflow
  CHECK(kept.c[4] == 0.0);

  // the coordinate count itself is capped by the step count
  const State two = prepare_initial(ones, 2);
  CHECK(two.c[0] == 1.0);
  CHECK(two.c[1] == 0.0);  // 1 + 4 > 2

  const double v2 = norm_sq(kept, NormLevel::V2);
  CHECK(v2 <= 20.0);
}

TEST_CASE("one implicit step matches the scalar closed form") {
  const OperatorSet ops = diagonal_ops({2.0}, 1.0);
  SchemeConfig cfg;

  const State u_prev = make_state(ops.space, {1.0});
  const State zero = zero_state(ops.space);
  const StepResult res = implicit_step(ops, cfg, 0.5, 0.5, u_prev, zero, zero);

  // u1 = u0 / (1 + dt nu lambda) = 1 / 2
  CHECK(res.state.c[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(res.cert.accepted);
  CHECK(res.cert.slack >= -1e-9 * res.cert.scale);
  CHECK(res.cert.iterations <= 2);  // linear problem, one correction

  SchemeConfig picard = cfg;
  picard.solver = SolverKind::damped_picard;
  const StepResult alt = implicit_step(ops, picard, 0.5, 0.5, u_prev, zero, zero);
  CHECK(alt.state.c[0] == doctest::Approx(res.state.c[0]).epsilon(1e-10));
}

TEST_CASE("scheme reproduces the linear recursion over many steps") {
  const OperatorSet ops = diagonal_ops({1.0, 2.0, 3.0}, 0.7);
  const std::size_t N = 1000;
  const double T = 1.0;

  ForcingSpec forcing;
  forcing.kind = ForcingKind::deterministic;
  forcing.shape = ForcingShape::constant;
  forcing.amp = 1.0;
  forcing.profile = make_state(ops.space, {0.3, -0.2, 0.5});

  const WienerPath wiener = sample_wiener(T, N, 1, 7);
  const State u0 = make_state(ops.space, {1.0, 0.5, -0.25});
  const SchemePath path =
      run_path(ops, SchemeConfig{}, no_noise(ops.space, 1.0), wiener, forcing, u0, N);

  // coordinatewise: u^n = (u^{n-1} + dt ell) / (1 + dt nu lambda)
  const double dt = T / static_cast<double>(N);
  Eigen::Vector3d u{1.0, 0.5, -0.25};
  const Eigen::Vector3d ell{0.3, -0.2, 0.5};
  double worst = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    for (int j = 0; j < 3; ++j)
      u[j] = (u[j] + dt * ell[j]) / (1.0 + dt * 0.7 * ops.space->weights[j]);
    const double err = (path.states[n].c - u).norm() / (1.0 + u.norm());
    if (err > worst) worst = err;
  }
  CHECK(worst <= 1e-12);
  CHECK(path.all_accepted);
}

TEST_CASE("sinusoidal load is averaged by cell midpoints") {
  const auto sp = make_space(1, {1.0});
  ForcingSpec forcing;
  forcing.kind = ForcingKind::deterministic;
  forcing.shape = ForcingShape::sine;
  forcing.amp = 2.0;
  forcing.freq = 3.0;
  forcing.profile = make_state(sp, {1.0});

  const WienerPath wiener = sample_wiener(1.0, 8, 1, 1);
  const auto values = forcing_values(forcing, sp, wiener);
  REQUIRE(values.size() == 8);
  const double h = 1.0 / 8.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * h;
    CHECK(values[i].c[0] ==
          doctest::Approx(2.0 * std::sin(3.0 * mid)).epsilon(1e-14));
  }

  const AveragedForcing avg = average_forcing(values, sp, 1.0, 4);
  REQUIRE(avg.ell.size() == 4);
  for (std::size_t n = 0; n < 4; ++n)
    CHECK(avg.ell[n].c[0] ==
          doctest::Approx(0.5 * (values[2 * n].c[0] + values[2 * n + 1].c[0]))
              .epsilon(1e-14));
}

TEST_CASE("wind-modulated load uses only revealed increments") {
  const auto sp = make_space(1, {1.0});
  ForcingSpec forcing;
  forcing.kind = ForcingKind::wind_proxy;
  forcing.amp = 1.0;
  forcing.gain = 0.5;
  forcing.window = 2;
  forcing.source_dir = 0;
  forcing.profile = make_state(sp, {1.0});

  const WienerPath wiener = sample_wiener(1.0, 4, 1, 21);
  const auto values = forcing_values(forcing, sp, wiener);
  const double h = 0.25;

  // first cell: nothing revealed yet
  CHECK(values[0].c[0] == doctest::Approx(1.0).epsilon(1e-15));
  // third cell: increments 0 and 1, normalized by the window deviation
  const double acc = wiener.dW(0, 0) + wiener.dW(1, 0);
  CHECK(values[2].c[0] ==
        doctest::Approx(1.0 + 0.5 * acc / std::sqrt(2.0 * h)).epsilon(1e-13));
}

TEST_CASE("noisy path certifies the energy inequality stepwise") {
  const OperatorSet base = diagonal_ops({1.0, 2.0, 3.0, 4.0}, 1.0);
  OperatorSet ops = base;
  NoiseCfg ncfg;
  ncfg.regime = NoiseRegime::nemytskii_ito;
  ncfg.psi = PsiKind::tanh_saturating;
  ncfg.k_dims = 2;
  ncfg.total_hs_sq = 0.4;
  const NoisePtr noise = make_noise(ops.space, ncfg);
  attach_noise(ops, noise);

  const WienerPath wiener = sample_wiener(1.0, 64, 2, 5150);
  const State u0 = make_state(ops.space, {1.0, 0.5, 0.25, 0.0});
  const SchemePath path = run_path(ops, SchemeConfig{}, project_sigma(noise, 32.0),
                                   wiener, ForcingSpec{}, u0, 32);

  CHECK(path.all_accepted);
  const EnergyReport rep = path_energy_report(ops, path);
  CHECK(rep.rejected_steps == 0);
  CHECK(rep.min_summed_margin >= -1e-12);
  CHECK(rep.per_step_slack.size() == 32);

  const double stat = uniform_bound_statistic(path);
  CHECK(stat > 0.0);
  CHECK(std::isfinite(stat));
}
