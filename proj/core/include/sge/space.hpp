#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <vector>

namespace sge {

// Coordinate labels. The abstract machinery never branches on these; concrete
// models use them to address blocks (e.g. the buoyancy coupling acts from
// temperature coordinates into velocity coordinates).
enum class Component : unsigned char { velocity, temperature };

// Rungs of the discrete smoothness scale around the pivot space H.
// Level k weights coefficient j by lambda_j^k; dual rungs use -k.
enum class NormLevel : int {
  H = 0,
  V = 1,
  V2 = 2,
  V3 = 3,
  Vdual = -1,
  V2dual = -2,
  V3dual = -3,
};

constexpr int level_power(NormLevel lvl) { return static_cast<int>(lvl); }

// Finite-dimensional coefficient space with a fixed diagonal spectral weight
// per coordinate. weights must be positive and non-decreasing; weights[0] is
// the smallest eigenvalue and drives the Poincare constant.
struct GalerkinSpace {
  std::size_t dim = 0;
  Eigen::VectorXd weights;
  std::vector<Component> tags;

  // weights^p cached for p in {-3..3}; avoids std::pow in the norm kernels.
  Eigen::VectorXd weight_pow(int p) const;

private:
  friend std::shared_ptr<const GalerkinSpace>
  make_space(std::size_t, std::vector<double>, std::vector<Component>);
  mutable Eigen::VectorXd pow_cache_[7];  // index p + 3
  void build_pow_cache() const;
};

using SpacePtr = std::shared_ptr<const GalerkinSpace>;

// Validates and freezes a coefficient space. Throws std::invalid_argument on
// dim mismatch, empty space, non-positive or decreasing weights.
SpacePtr make_space(std::size_t dim, std::vector<double> weights,
                    std::vector<Component> tags = {});

// One element of the space: coefficients against the fixed orthonormal basis.
struct State {
  SpacePtr space;
  Eigen::VectorXd c;

  std::size_t dim() const { return space ? space->dim : 0; }
};

State zero_state(const SpacePtr& space);
State make_state(const SpacePtr& space, std::vector<double> coeffs);

// Pivot inner product; doubles as the duality pairing between any rung and
// its dual since coefficients are held against the same basis throughout.
double dot_h(const State& a, const State& b);

double norm_sq(const State& u, NormLevel lvl);
double norm(const State& u, NormLevel lvl);

// lambda_min^{-1/2}, the constant in |u| <= C ||u||.
double poincare_constant(const GalerkinSpace& space);

// In-place BLAS-1 style helpers; all require matching spaces.
void check_same_space(const State& a, const State& b);

}  // namespace sge
