#include "sge/space.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sge;

TEST_CASE("norm ladder on a two-mode space") {
  const auto sp = make_space(2, {1.0, 4.0});
  const State u = make_state(sp, {1.0, 1.0});

  CHECK(norm_sq(u, NormLevel::H) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(norm_sq(u, NormLevel::V) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norm_sq(u, NormLevel::V2) == doctest::Approx(17.0).epsilon(1e-15));
  CHECK(norm_sq(u, NormLevel::V3) == doctest::Approx(65.0).epsilon(1e-15));
  CHECK(norm_sq(u, NormLevel::Vdual) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(norm_sq(u, NormLevel::V2dual) ==
        doctest::Approx(1.0 + 1.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("dual norm discounts by the weight") {
  const auto sp = make_space(2, {1.0, 2.0});
  const State u = make_state(sp, {0.0, 1.0});
  CHECK(norm_sq(u, NormLevel::Vdual) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm(u, NormLevel::Vdual) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("third rung on a single mode") {
  const auto sp = make_space(1, {2.0});
  const State u = make_state(sp, {3.0});
  CHECK(norm_sq(u, NormLevel::V3) == doctest::Approx(72.0).epsilon(1e-15));
  CHECK(norm(u, NormLevel::V3) ==
        doctest::Approx(3.0 * std::pow(2.0, 1.5)).epsilon(1e-15));
}

TEST_CASE("pivot inner product and the mode-one embedding constant") {
  const auto sp = make_space(2, {4.0, 9.0});
  const State a = make_state(sp, {1.0, 2.0});
  const State b = make_state(sp, {-3.0, 0.5});
  CHECK(dot_h(a, b) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(poincare_constant(*sp) == doctest::Approx(0.5).epsilon(1e-15));

  // |u| <= lambda_1^{-1/2} ||u||, equality on the lowest mode
  const State lowest = make_state(sp, {1.0, 0.0});
  CHECK(norm(lowest, NormLevel::H) ==
        doctest::Approx(poincare_constant(*sp) * norm(lowest, NormLevel::V))
            .epsilon(1e-15));
}

TEST_CASE("weight power cache matches direct powers") {
  const auto sp = make_space(3, {1.0, 4.0, 9.0});
  for (int p = -3; p <= 3; ++p) {
    const Eigen::VectorXd w = sp->weight_pow(p);
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(w[j] == doctest::Approx(std::pow(sp->weights[j], p)).epsilon(1e-14));
  }
}

TEST_CASE("space construction rejects bad weight sequences") {
  CHECK_THROWS_AS(make_space(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_space(2, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_space(2, {1.0, 0.5}), std::invalid_argument);  // decreasing
  CHECK_THROWS_AS(make_space(2, {-1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_space(2, {0.0, 2.0}), std::invalid_argument);
  CHECK_NOTHROW(make_space(2, {1.0, 1.0}));  // plateaus are fine
}

TEST_CASE("state helpers enforce the space") {
  const auto sp = make_space(2, {1.0, 2.0});
  CHECK_THROWS_AS(make_state(sp, {1.0}), std::invalid_argument);
  const State z = zero_state(sp);
  CHECK(z.c.size() == 2);
  CHECK(norm_sq(z, NormLevel::V3) == 0.0);

  const auto other = make_space(2, {1.0, 2.0});
  const State a = zero_state(sp);
  const State b = zero_state(other);
  CHECK_THROWS_AS(check_same_space(a, b), std::invalid_argument);
}
