#include "sgecli/config.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

using sgecli::config_echo_json;
using sgecli::parse_config_text;

namespace {

std::string minimal() {
  return R"({"model": {"kind": "diagonal_linear", "dim": 2}, "ladder": [4]})";
}

bool throws_mentioning(const std::string& text, const std::string& needle) {
  try {
    parse_config_text(text);
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal config resolves catalog defaults") {
  const sge::ExperimentConfig cfg = parse_config_text(minimal());
  CHECK(cfg.model.kind == sge::ModelKind::diagonal_linear);
  CHECK(cfg.model.dim == 2);
  REQUIRE(cfg.model.weights.size() == 2);
  CHECK(cfg.model.weights[0] == 1.0);
  CHECK(cfg.model.weights[1] == 2.0);
  CHECK(cfg.noise.regime == sge::NoiseRegime::none);
  CHECK(cfg.ensemble == 100);
  CHECK(cfg.ladder == std::vector<std::size_t>{4});
  CHECK(std::isinf(cfg.bdg_stop_level));
}

TEST_CASE("unknown keys are rejected wherever they appear") {
  CHECK(throws_mentioning(
      R"({"model": {"kind": "diagonal_linear", "dim": 2}, "ladder": [4], "typo": 1})",
      "typo"));
  CHECK(throws_mentioning(
      R"({"model": {"kind": "diagonal_linear", "dim": 2, "bogus": 3}, "ladder": [4]})",
      "bogus"));
  CHECK(throws_mentioning(
      R"({"model": {"kind": "diagonal_linear", "dim": 2},
          "noise": {"regime": "additive", "spelling": 1}, "ladder": [4]})",
      "spelling"));
}

TEST_CASE("enum domains are closed") {
  CHECK(throws_mentioning(
      R"({"model": {"kind": "diagonal", "dim": 2}, "ladder": [4]})",
      "diagonal_linear"));  // the error lists the valid options
  CHECK(throws_mentioning(
      R"({"model": {"kind": "diagonal_linear", "dim": 2},
          "noise": {"regime": "additiv"}, "ladder": [4]})",
      "additive"));
}

TEST_CASE("type errors and missing requirements are loud") {
  CHECK_THROWS_AS(parse_config_text(R"({"ladder": [4]})"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"model": {"kind": "diagonal_linear", "dim": 2}, "ladder": "4"})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"model": {"kind": "diagonal_linear"}, "ladder": [4]})"),
      std::invalid_argument);  // dim required for the diagonal model
  CHECK_THROWS_AS(parse_config_text("not json at all"), std::invalid_argument);
  // boussinesq rejects explicit weights, its layout owns them
  CHECK_THROWS_AS(
      parse_config_text(
          R"({"model": {"kind": "rot_boussinesq_2d", "weights": [1]}, "ladder": [4]})"),
      std::invalid_argument);
}

TEST_CASE("full config round-trips through its echo") {
  const std::string text = R"({
    "name": "round_trip",
    "model": {"kind": "rot_boussinesq_2d", "trunc_radius": 2, "f_rot": 0.5,
              "c_buoy": 0.25, "kappa": 1.0, "K_T": 1.0, "nu": 1.0},
    "noise": {"regime": "nemytskii_stratonovich", "k_dims": 2,
              "psi": "tanh_saturating", "strat_factor": 0.5,
              "profile": "inverse_weight", "total_hs_sq": 0.75},
    "scheme": {"T": 0.5, "solver": "damped_picard", "max_iters": 300},
    "forcing": {"kind": "wind_proxy", "amp": 0.3, "gain": 0.2, "window": 8,
                "source_dir": 1,
                "profile": {"kind": "coeffs", "coeffs": [[0, 1.0]]}},
    "u0": {"kind": "smooth_decay", "amp": 0.9, "decay": 1.5},
    "ladder": [16, 32],
    "master_steps": 128,
    "ensemble": 50,
    "seed": 99,
    "workers": 2,
    "functionals": [{"kind": "mode_k_endpoint", "mode_index": 3}],
    "bdg_stop_level": "inf",
    "limits": {"decay_ratio": 0.85}
  })";
  const sge::ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.scheme.solver == sge::SolverKind::damped_picard);
  CHECK(cfg.noise.psi == sge::PsiKind::tanh_saturating);
  CHECK(cfg.forcing.source_dir == 1);
  CHECK(cfg.decay_ratio_limit == 0.85);
  CHECK(cfg.coupling_median_limit == 0.75);  // untouched default

  // echo -> parse -> echo is a fixed point
  const std::string echo1 = config_echo_json(cfg);
  const sge::ExperimentConfig cfg2 = parse_config_text(echo1);
  const std::string echo2 = config_echo_json(cfg2);
  CHECK(echo1 == echo2);
  CHECK(cfg2.model.f_rot == cfg.model.f_rot);
  CHECK(std::isinf(cfg2.bdg_stop_level));
}
