// Microbenchmarks for the kernels that dominate ensemble runtime: the
// advection pair, the implicit step solve, whole-path integration, and the
// pathwise statistics pipeline.
#include "sge/experiment.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace sge;

OperatorSet rotating_ops(int radius) {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = radius;
  spec.nu = 1.0;
  spec.kappa = 1.0;
  spec.K_T = 1.0;
  spec.f_rot = 1.0;
  spec.c_buoy = 0.5;
  return make_model(spec);
}

OperatorSet diagonal_ops(std::size_t dim) {
  ModelSpec spec;
  spec.kind = ModelKind::diagonal_linear;
  spec.dim = dim;
  for (std::size_t j = 1; j <= dim; ++j)
    spec.weights.push_back(static_cast<double>(j));
  spec.nu = 1.0;
  return make_model(spec);
}

State random_state(const SpacePtr& space, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  State u = zero_state(space);
  for (Eigen::Index j = 0; j < u.c.size(); ++j) u.c[j] = normal(gen);
  return u;
}

void BM_AdvectionPair(benchmark::State& state) {
  const OperatorSet ops = rotating_ops(static_cast<int>(state.range(0)));
  const State u = random_state(ops.space, 1);
  const State w = random_state(ops.space, 2);
  State out = zero_state(ops.space);
  for (auto _ : state) {
    ops.b_pair(u, w, out);
    benchmark::DoNotOptimize(out.c.data());
  }
  state.SetLabel("dim=" + std::to_string(ops.space->dim));
}
BENCHMARK(BM_AdvectionPair)->Arg(2)->Arg(3)->Arg(4);

void BM_AdvectionJacobian(benchmark::State& state) {
  const OperatorSet ops = rotating_ops(static_cast<int>(state.range(0)));
  const State u = random_state(ops.space, 1);
  for (auto _ : state) {
    Eigen::MatrixXd jac = ops.b_jacobian(u);
    benchmark::DoNotOptimize(jac.data());
  }
}
BENCHMARK(BM_AdvectionJacobian)->Arg(2)->Arg(3);

void BM_ImplicitStepRotating(benchmark::State& state) {
  OperatorSet ops = rotating_ops(static_cast<int>(state.range(0)));
  NoiseCfg ncfg;
  ncfg.regime = NoiseRegime::nemytskii_ito;
  ncfg.psi = PsiKind::tanh_saturating;
  ncfg.k_dims = 2;
  ncfg.total_hs_sq = 0.5;
  const NoisePtr noise = make_noise(ops.space, ncfg);
  attach_noise(ops, noise);

  const SchemeConfig cfg;
  const State u_prev = random_state(ops.space, 3);
  const State noise_incr = zero_state(ops.space);
  State ell = zero_state(ops.space);
  ell.c[0] = 0.25;
  const double dt = 1.0 / 128.0;

  for (auto _ : state) {
    StepResult r = implicit_step(ops, cfg, dt, dt, u_prev, noise_incr, ell);
    benchmark::DoNotOptimize(r.state.c.data());
  }
}
BENCHMARK(BM_ImplicitStepRotating)->Arg(2)->Arg(3);

void BM_RunPathDiagonal(benchmark::State& state) {
  OperatorSet ops = diagonal_ops(64);
  NoiseCfg ncfg;
  ncfg.regime = NoiseRegime::additive;
  ncfg.profile = AlphaProfile::inverse_weight;
  ncfg.total_hs_sq = 0.03125;
  const NoisePtr noise = make_noise(ops.space, ncfg);
  attach_noise(ops, noise);

  const std::size_t n_steps = static_cast<std::size_t>(state.range(0));
  const WienerPath wiener = sample_wiener(0.5, 256, 1, 7);
  const SigmaN sn = project_sigma(noise, static_cast<double>(n_steps));
  ForcingSpec forcing;
  State u0 = zero_state(ops.space);
  u0.c[0] = 1.0;

  for (auto _ : state) {
    SchemePath path = run_path(ops, SchemeConfig{}, sn, wiener, forcing, u0, n_steps);
    benchmark::DoNotOptimize(path.states.back().c.data());
  }
}
BENCHMARK(BM_RunPathDiagonal)->Arg(16)->Arg(64)->Arg(256);

void BM_PathStats(benchmark::State& state) {
  OperatorSet ops = diagonal_ops(64);
  NoiseCfg ncfg;
  ncfg.regime = NoiseRegime::additive;
  ncfg.profile = AlphaProfile::inverse_weight;
  ncfg.total_hs_sq = 0.03125;
  const NoisePtr noise = make_noise(ops.space, ncfg);
  attach_noise(ops, noise);

  const WienerPath wiener = sample_wiener(0.5, 256, 1, 9);
  const SigmaN sn = project_sigma(noise, 64.0);
  ForcingSpec forcing;
  State u0 = zero_state(ops.space);
  u0.c[0] = 1.0;
  const SchemePath path =
      run_path(ops, SchemeConfig{}, sn, wiener, forcing, u0, 64);
  const InterpolantSet ip = build_interpolants(ops, path, sn, wiener, forcing);

  for (auto _ : state) {
    PathStats row = compute_path_stats(ip, 8, 0.3, 4.0, 257);
    benchmark::DoNotOptimize(&row);
  }
}
BENCHMARK(BM_PathStats);

}  // namespace

BENCHMARK_MAIN();
