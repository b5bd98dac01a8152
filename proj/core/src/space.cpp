#include "sge/space.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace sge {

void GalerkinSpace::build_pow_cache() const {
  pow_cache_[3] = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim));
  for (int p = 1; p <= 3; ++p) {
    pow_cache_[3 + p] = pow_cache_[3 + p - 1].cwiseProduct(weights);
    pow_cache_[3 - p] = pow_cache_[3 - p + 1].cwiseQuotient(weights);
  }
}

Eigen::VectorXd GalerkinSpace::weight_pow(int p) const {
  if (p < -3 || p > 3) throw std::invalid_argument("weight_pow: power out of range");
  return pow_cache_[p + 3];
}

SpacePtr make_space(std::size_t dim, std::vector<double> weights,
                    std::vector<Component> tags) {
  if (dim == 0) throw std::invalid_argument("make_space: dim must be positive");
  if (weights.size() != dim)
    throw std::invalid_argument("make_space: weights size does not match dim");
  if (!tags.empty() && tags.size() != dim)
    throw std::invalid_argument("make_space: tags size does not match dim");

  for (std::size_t j = 0; j < dim; ++j) {
    if (!(weights[j] > 0.0))
      throw std::invalid_argument("make_space: weights must be positive");
    if (j > 0 && weights[j] < weights[j - 1])
      throw std::invalid_argument("make_space: weights must be non-decreasing");
  }

  auto space = std::make_shared<GalerkinSpace>();
  space->dim = dim;
  space->weights =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(dim));
  space->tags = tags.empty() ? std::vector<Component>(dim, Component::velocity)
                             : std::move(tags);
  space->build_pow_cache();
  return space;
}

State zero_state(const SpacePtr& space) {
  if (!space) throw std::invalid_argument("zero_state: null space");
  return State{space, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->dim))};
}

State make_state(const SpacePtr& space, std::vector<double> coeffs) {
  if (!space) throw std::invalid_argument("make_state: null space");
  if (coeffs.size() != space->dim)
    throw std::invalid_argument("make_state: coefficient count does not match dim");
  return State{space, Eigen::Map<const Eigen::VectorXd>(
                          coeffs.data(), static_cast<Eigen::Index>(coeffs.size()))};
}

void check_same_space(const State& a, const State& b) {
  if (a.space != b.space)
    throw std::invalid_argument("states live in different spaces");
}

double dot_h(const State& a, const State& b) {
  check_same_space(a, b);
  return a.c.dot(b.c);
}

double norm_sq(const State& u, NormLevel lvl) {
  assert(u.space);
  const int p = level_power(lvl);
  if (p == 0) return u.c.squaredNorm();
  return u.c.cwiseAbs2().dot(u.space->weight_pow(p));
}

double norm(const State& u, NormLevel lvl) { return std::sqrt(norm_sq(u, lvl)); }

double poincare_constant(const GalerkinSpace& space) {
  return 1.0 / std::sqrt(space.weights[0]);
}

}  // namespace sge
