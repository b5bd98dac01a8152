#include "sge/models.hpp"
#include "sge/noise.hpp"
#include "sge/operators.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace sge;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Real-space samples of the truncated fields and their gradients on a G x G
// uniform grid of the 2-torus. Used as an independent quadrature oracle for
// the spectral convolution: with G > 3 * radius the tensor trapezoid rule
// integrates the cubic trig integrand exactly.
struct GridFields {
  Eigen::MatrixXd vx, vy, th;
  Eigen::MatrixXd dxvx, dyvx, dxvy, dyvy, dxth, dyth;
};

GridFields evaluate(const BoussinesqLayout& lay, const State& u, int G) {
  GridFields f;
  for (auto* m : {&f.vx, &f.vy, &f.th, &f.dxvx, &f.dyvx, &f.dxvy, &f.dyvy,
                  &f.dxth, &f.dyth})
    m->setZero(G, G);
  const double n = 1.0 / (std::sqrt(2.0) * kPi);
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      const double x = 2.0 * kPi * a / G;
      const double y = 2.0 * kPi * b / G;
      for (const auto& rep : lay.reps) {
        const double phase = rep.kx * x + rep.ky * y;
        const double c = std::cos(phase), s = std::sin(phase);
        const double vc = u.c[static_cast<Eigen::Index>(rep.vel_cos)];
        const double vs = u.c[static_cast<Eigen::Index>(rep.vel_sin)];
        const double tc = u.c[static_cast<Eigen::Index>(rep.temp_cos)];
        const double ts = u.c[static_cast<Eigen::Index>(rep.temp_sin)];
        // velocity amplitude along perp, temperature scalar
        const double amp = n * (vc * c + vs * s);
        const double damp_dx = n * (-vc * s + vs * c) * rep.kx;
        const double damp_dy = n * (-vc * s + vs * c) * rep.ky;
        f.vx(a, b) += amp * rep.perp[0];
        f.vy(a, b) += amp * rep.perp[1];
        f.dxvx(a, b) += damp_dx * rep.perp[0];
        f.dyvx(a, b) += damp_dy * rep.perp[0];
        f.dxvy(a, b) += damp_dx * rep.perp[1];
        f.dyvy(a, b) += damp_dy * rep.perp[1];
        const double tamp = n * (tc * c + ts * s);
        f.th(a, b) += tamp;
        f.dxth(a, b) += n * (-tc * s + ts * c) * rep.kx;
        f.dyth(a, b) += n * (-tc * s + ts * c) * rep.ky;
      }
    }
  }
  return f;
}

// integral over the torus of ((u . grad) w) . s for velocity plus temperature
double quadrature_b(const BoussinesqLayout& lay, const State& u, const State& w,
                    const State& s, int G) {
  const GridFields fu = evaluate(lay, u, G);
  const GridFields fw = evaluate(lay, w, G);
  const GridFields fs = evaluate(lay, s, G);
  double acc = 0.0;
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      const double adv_x = fu.vx(a, b) * fw.dxvx(a, b) + fu.vy(a, b) * fw.dyvx(a, b);
      const double adv_y = fu.vx(a, b) * fw.dxvy(a, b) + fu.vy(a, b) * fw.dyvy(a, b);
      const double adv_t = fu.vx(a, b) * fw.dxth(a, b) + fu.vy(a, b) * fw.dyth(a, b);
      acc += adv_x * fs.vx(a, b) + adv_y * fs.vy(a, b) + adv_t * fs.th(a, b);
    }
  }
  const double cell = (2.0 * kPi / G) * (2.0 * kPi / G);
  return acc * cell;
}

State random_state(const SpacePtr& sp, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  State u = zero_state(sp);
  for (Eigen::Index j = 0; j < u.c.size(); ++j) u.c[j] = normal(gen);
  return u;
}

}  // namespace

TEST_CASE("diagonal model forms reduce to weighted sums") {
  ModelSpec spec;
  spec.kind = ModelKind::diagonal_linear;
  spec.dim = 3;
  spec.weights = {1.0, 2.0, 3.0};
  spec.nu = 0.5;
  const OperatorSet ops = make_model(spec);

  const State u = make_state(ops.space, {1.0, -2.0, 0.5});
  // a(u,u) = nu * sum lambda_j u_j^2 = 0.5 * (1 + 8 + 0.75)
  CHECK(apply_a(ops, u, u) == doctest::Approx(0.5 * 9.75).epsilon(1e-15));
  CHECK(apply_e(ops, u, u) == doctest::Approx(0.0));
  CHECK(ops.c1 == doctest::Approx(0.5));

  const State du = apply_drift(ops, 0.0, u);
  for (Eigen::Index j = 0; j < 3; ++j)
    CHECK(du.c[j] ==
          doctest::Approx(-0.5 * ops.space->weights[j] * u.c[j]).epsilon(1e-15));
}

TEST_CASE("diagonal model passes the structural gate") {
  ModelSpec spec;
  spec.kind = ModelKind::diagonal_linear;
  spec.dim = 16;
  for (std::size_t j = 1; j <= 16; ++j)
    spec.weights.push_back(static_cast<double>(j));
  spec.nu = 1.0;
  const OperatorSet ops = make_model(spec);
  const AxiomReport rep = verify_axioms(ops, 200, 11, 1e-12);
  CHECK(rep.valid);
  CHECK(rep.coercivity_eig_min >= -1e-14);
}

TEST_CASE("truncated torus layout enumerates half-plane representatives") {
  const BoussinesqLayout lay = boussinesq_layout(2);
  // |k|^2 <= 4 with kx > 0 or (kx = 0, ky > 0):
  // (0,1), (1,-1), (1,0), (1,1), (0,2), (2,0)
  CHECK(lay.reps.size() == 6);
  CHECK(lay.dim() == 24);
  std::size_t n_lambda1 = 0, n_lambda2 = 0, n_lambda4 = 0;
  for (const auto& rep : lay.reps) {
    CHECK(rep.kx * rep.kx + rep.ky * rep.ky ==
          doctest::Approx(rep.lambda).epsilon(1e-15));
    // perpendicular unit vector
    CHECK(rep.perp[0] * rep.kx + rep.perp[1] * rep.ky ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rep.perp[0] * rep.perp[0] + rep.perp[1] * rep.perp[1] ==
          doctest::Approx(1.0).epsilon(1e-15));
    if (rep.lambda == 1.0) ++n_lambda1;
    if (rep.lambda == 2.0) ++n_lambda2;
    if (rep.lambda == 4.0) ++n_lambda4;
  }
  CHECK(n_lambda1 == 2);
  CHECK(n_lambda2 == 2);
  CHECK(n_lambda4 == 2);
  // weights are non-decreasing and match the representative eigenvalues
  for (std::size_t j = 1; j < lay.weights.size(); ++j)
    CHECK(lay.weights[j] >= lay.weights[j - 1]);
  // four coordinates per representative, half velocity, half temperature
  std::size_t n_vel = 0;
  for (const auto tag : lay.tags)
    if (tag == Component::velocity) ++n_vel;
  CHECK(n_vel == 12);
}

TEST_CASE("advection form matches real-space quadrature") {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = 2;
  const OperatorSet ops = make_model(spec);
  const BoussinesqLayout lay = boussinesq_layout(2);

  std::mt19937_64 gen(314159);
  const int G = 16;  // > 3 * radius, so the tensor rule is exact
  for (int trial = 0; trial < 8; ++trial) {
    const State u = random_state(ops.space, gen);
    const State w = random_state(ops.space, gen);
    const State s = random_state(ops.space, gen);
    const double spectral = apply_b(ops, u, w, s);
    const double quad = quadrature_b(lay, u, w, s, G);
    const double scale =
        1.0 + std::abs(spectral) + std::abs(quad);
    CHECK(std::abs(spectral - quad) <= 1e-11 * scale);
  }
}

TEST_CASE("advecting a field against itself is energy neutral") {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = 3;
  const OperatorSet ops = make_model(spec);
  std::mt19937_64 gen(2718);
  for (int trial = 0; trial < 16; ++trial) {
    const State u = random_state(ops.space, gen);
    const State w = random_state(ops.space, gen);
    const double cancel = apply_b(ops, u, w, w);
    const double scale = 1.0 + norm(u, NormLevel::V) * norm_sq(w, NormLevel::V);
    CHECK(std::abs(cancel) <= 1e-12 * scale);
  }
}

TEST_CASE("rotation and buoyancy couple with the advertised structure") {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = 2;
  spec.f_rot = 0.8;
  spec.c_buoy = 0.3;
  const OperatorSet ops = make_model(spec);
  const BoussinesqLayout lay = boussinesq_layout(2);

  for (const auto& rep : lay.reps) {
    const auto vc = static_cast<Eigen::Index>(rep.vel_cos);
    const auto vs = static_cast<Eigen::Index>(rep.vel_sin);
    const auto tc = static_cast<Eigen::Index>(rep.temp_cos);
    const auto ts = static_cast<Eigen::Index>(rep.temp_sin);
    // pairwise skew rotation inside the velocity pair
    CHECK(ops.E(vc, vs) == doctest::Approx(-0.8).epsilon(1e-15));
    CHECK(ops.E(vs, vc) == doctest::Approx(0.8).epsilon(1e-15));
    // buoyancy lifts temperature into velocity with weight kx / |k|
    const double lift = rep.kx / std::sqrt(rep.lambda);
    CHECK(ops.A(vc, tc) == doctest::Approx(-0.3 * lift).epsilon(1e-12));
    CHECK(ops.A(vs, ts) == doctest::Approx(-0.3 * lift).epsilon(1e-12));
  }

  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 16; ++trial) {
    const State u = random_state(ops.space, gen);
    CHECK(std::abs(apply_e(ops, u, u)) <= 1e-12 * (1.0 + norm_sq(u, NormLevel::H)));
  }
}

TEST_CASE("rotating model passes the structural gate with noise attached") {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = 2;
  spec.f_rot = 1.0;
  spec.c_buoy = 0.5;
  OperatorSet ops = make_model(spec);

  NoiseCfg ncfg;
  ncfg.regime = NoiseRegime::nemytskii_ito;
  ncfg.psi = PsiKind::tanh_saturating;
  ncfg.k_dims = 2;
  ncfg.total_hs_sq = 0.5;
  attach_noise(ops, make_noise(ops.space, ncfg));

  const AxiomReport rep = verify_axioms(ops, 300, 5, 1e-12);
  CHECK(rep.valid);
  CHECK(rep.c2_hat <= ops.c2 + 1e-12);
}

TEST_CASE("buoyancy beyond the dissipation reserve is rejected") {
  ModelSpec spec;
  spec.kind = ModelKind::rot_boussinesq_2d;
  spec.trunc_radius = 2;
  spec.nu = 1.0;
  spec.kappa = 0.5;
  spec.K_T = 1.0;
  spec.c_buoy = 0.6;  // exceeds min(nu, K_T * kappa) = 0.5
  CHECK_THROWS_AS(make_model(spec), std::invalid_argument);
  spec.c_buoy = 0.5;
  CHECK_NOTHROW(make_model(spec));
}
