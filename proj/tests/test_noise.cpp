#include "sge/noise.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace sge;

namespace {

SpacePtr octave_space() { return make_space(4, {1.0, 2.0, 4.0, 8.0}); }

State random_state(const SpacePtr& sp, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  State u = zero_state(sp);
  for (Eigen::Index j = 0; j < u.c.size(); ++j) u.c[j] = normal(gen);
  return u;
}

}  // namespace

TEST_CASE("spectral cutoff keeps exactly the low-weight prefix") {
  const auto sp = octave_space();
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::additive;
  const NoisePtr noise = make_noise(sp, cfg);

  CHECK(project_sigma(noise, 4.0).m_modes == 3);
  CHECK(project_sigma(noise, 3.9).m_modes == 2);
  CHECK(project_sigma(noise, 0.5).m_modes == 0);
  CHECK(project_sigma(noise, 100.0).m_modes == 4);
}

TEST_CASE("additive amplitudes normalize to the requested total") {
  const auto sp = octave_space();
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::additive;
  cfg.profile = AlphaProfile::inverse_weight;
  cfg.total_hs_sq = 0.5;
  const NoisePtr noise = make_noise(sp, cfg);

  CHECK(noise->alpha.squaredNorm() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(noise->c3 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(noise->c4 == 0.0);

  // inverse-weight profile: alpha_j^2 proportional to 1 / lambda_j
  const double s = 0.5 / (1.0 + 0.5 + 0.25 + 0.125);
  for (Eigen::Index j = 0; j < 4; ++j)
    CHECK(noise->alpha(j, 0) * noise->alpha(j, 0) ==
          doctest::Approx(s / sp->weights[j]).epsilon(1e-13));

  // additive columns ignore the state
  const State u = random_state(sp, 1);
  State col = zero_state(sp);
  sigma_apply(*noise, 0.3, u, 0, col);
  for (Eigen::Index j = 0; j < 4; ++j)
    CHECK(col.c[j] == doctest::Approx(noise->alpha(j, 0)).epsilon(1e-15));
}

TEST_CASE("cutoff tail has frozen values on the octave ladder") {
  const auto sp = octave_space();
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::additive;
  cfg.profile = AlphaProfile::inverse_weight;
  cfg.total_hs_sq = 0.5;
  const NoisePtr noise = make_noise(sp, cfg);
  const State u = random_state(sp, 2);

  // discarded mass: s * (sum of 1/lambda over dropped modes), s = 0.5/1.875
  CHECK(sigma_tail_sq(project_sigma(noise, 2.0), 0.0, u) ==
        doctest::Approx(0.1).epsilon(1e-13));
  CHECK(sigma_tail_sq(project_sigma(noise, 4.0), 0.0, u) ==
        doctest::Approx(0.5 * 0.125 / 1.875).epsilon(1e-13));
  CHECK(sigma_tail_sq(project_sigma(noise, 8.0), 0.0, u) == 0.0);

  // tail + retained mass reproduces the full size
  const SigmaN sn = project_sigma(noise, 2.0);
  CHECK(sigma_n_hs_sq(sn, 0.0, u) + sigma_tail_sq(sn, 0.0, u) ==
        doctest::Approx(sigma_hs_sq(*noise, 0.0, u)).epsilon(1e-13));
}

TEST_CASE("pointwise noise scales the state coordinatewise") {
  const auto sp = make_space(2, {1.0, 3.0});
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::nemytskii_ito;
  cfg.k_dims = 1;
  cfg.total_hs_sq = 2.0;  // flat: alpha_j = 1
  const NoisePtr noise = make_noise(sp, cfg);

  const State u = make_state(sp, {0.25, -1.5});
  State col = zero_state(sp);
  sigma_apply(*noise, 0.0, u, 0, col);
  CHECK(col.c[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(col.c[1] == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(noise->c3 == doctest::Approx(1.0).epsilon(1e-14));

  // saturating profile caps the same column at one
  NoiseCfg tcfg = cfg;
  tcfg.psi = PsiKind::tanh_saturating;
  const NoisePtr tnoise = make_noise(sp, tcfg);
  sigma_apply(*tnoise, 0.0, u, 0, col);
  CHECK(col.c[0] == doctest::Approx(std::tanh(0.25)).epsilon(1e-14));
  CHECK(col.c[1] == doctest::Approx(std::tanh(-1.5)).epsilon(1e-14));
}

TEST_CASE("quadratic correction drift has its catalog closed form") {
  const auto sp = make_space(1, {1.0});
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::nemytskii_stratonovich;
  cfg.k_dims = 1;
  cfg.total_hs_sq = 1.0;
  cfg.strat_factor = 0.5;
  const NoisePtr noise = make_noise(sp, cfg);

  State out = zero_state(sp);
  xi_apply(*noise, 0.0, make_state(sp, {2.0}), out);
  CHECK(out.c[0] == doctest::Approx(1.0).epsilon(1e-14));  // 0.5 * u * 1
  CHECK(noise->c4 == doctest::Approx(0.5).epsilon(1e-14));

  NoiseCfg tanh_cfg = cfg;
  tanh_cfg.psi = PsiKind::tanh_saturating;
  const NoisePtr tn = make_noise(sp, tanh_cfg);
  const double u0 = 0.3;
  const double t = std::tanh(u0);
  xi_apply(*tn, 0.0, make_state(sp, {u0}), out);
  CHECK(out.c[0] == doctest::Approx(0.5 * t * (1.0 - t * t)).epsilon(1e-13));

  // literal doubled form via the factor switch
  NoiseCfg lit = cfg;
  lit.strat_factor = 1.0;
  xi_apply(*make_noise(sp, lit), 0.0, make_state(sp, {2.0}), out);
  CHECK(out.c[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("projection-level inequalities certify with nonnegative margins") {
  const auto sp = make_space(8, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0});
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::nemytskii_ito;
  cfg.k_dims = 3;
  cfg.total_hs_sq = 1.5;
  const NoisePtr noise = make_noise(sp, cfg);

  for (const double level : {2.0, 4.0, 8.0}) {
    const SigmaNConditions cond =
        sigma_n_conditions(project_sigma(noise, level), 200, 77);
    CHECK(cond.pass);
    CHECK(cond.v_margin_min >= 0.0);
    CHECK(cond.h_margin_min >= 0.0);
  }
}

TEST_CASE("observable-driven diffusion pairs shapes with amplitudes") {
  const auto sp = make_space(2, {1.0, 2.0});
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::functional;
  cfg.k_dims = 1;
  cfg.total_hs_sq = 1.0;
  cfg.functional_shapes = {{1.0, 1.0}};  // one direction, shape (1,1)
  const NoisePtr noise = make_noise(sp, cfg);

  const State u = make_state(sp, {2.0, 3.0});
  State col = zero_state(sp);
  sigma_apply(*noise, 0.0, u, 0, col);
  // sigma^0(u) = <u, shape> * alpha^0, |alpha^0|^2 = 1
  const double pairing = 5.0;
  CHECK(col.c.norm() == doctest::Approx(pairing).epsilon(1e-13));
}

TEST_CASE("master-grid increments aggregate exactly onto scheme cells") {
  const WienerPath w = sample_wiener(1.0, 8, 2, 42);
  CHECK(w.dW.rows() == 8);
  CHECK(w.dW.cols() == 2);

  const Eigen::MatrixXd eta = scheme_increments(w, 4);
  CHECK(eta.rows() == 4);
  for (int n = 0; n < 4; ++n)
    for (int k = 0; k < 2; ++k)
      CHECK(eta(n, k) ==
            doctest::Approx(w.dW(2 * n, k) + w.dW(2 * n + 1, k)).epsilon(1e-15));

  CHECK_THROWS_AS(scheme_increments(w, 3), std::invalid_argument);

  // same seed, same path; different seed, different path
  const WienerPath w2 = sample_wiener(1.0, 8, 2, 42);
  CHECK((w.dW - w2.dW).norm() == 0.0);
  const WienerPath w3 = sample_wiener(1.0, 8, 2, 43);
  CHECK((w.dW - w3.dW).norm() > 0.0);
}

TEST_CASE("seed mixing separates stream families") {
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(0, 0) != 0);
  CHECK(mix_seed(7, 9) == mix_seed(7, 9));
}

TEST_CASE("noise construction rejects inconsistent requests") {
  const auto sp = make_space(2, {1.0, 2.0});
  NoiseCfg cfg;
  cfg.regime = NoiseRegime::additive;
  cfg.total_hs_sq = -1.0;
  CHECK_THROWS_AS(make_noise(sp, cfg), std::invalid_argument);

  NoiseCfg custom;
  custom.regime = NoiseRegime::additive;
  custom.profile = AlphaProfile::custom;
  custom.custom_alpha = {{1.0, 2.0, 3.0}};  // wrong coordinate count
  CHECK_THROWS_AS(make_noise(sp, custom), std::invalid_argument);

  NoiseCfg fshape;
  fshape.regime = NoiseRegime::functional;
  fshape.k_dims = 2;
  fshape.functional_shapes = {{1.0, 0.0}};  // one shape for two directions
  CHECK_THROWS_AS(make_noise(sp, fshape), std::invalid_argument);
}
