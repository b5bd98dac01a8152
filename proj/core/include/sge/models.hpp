#pragma once

#include "sge/operators.hpp"
#include "sge/space.hpp"

#include <array>
#include <string>
#include <vector>

namespace sge {

enum class ModelKind { diagonal_linear, rot_boussinesq_2d };

// Everything needed to assemble either model. Fields not used by the chosen
// kind are ignored. Invariants are enforced by make_model.
struct ModelSpec {
  ModelKind kind = ModelKind::diagonal_linear;

  // diagonal-linear: A = nu * diag(weights), no advection, no rotation.
  std::size_t dim = 0;
  std::vector<double> weights;

  // rot-boussinesq-2d: spectral truncation |k|^2 <= trunc_radius^2 on the 2-torus.
  int trunc_radius = 2;
  double kappa = 1.0;    // thermal diffusivity
  double K_T = 1.0;      // temperature block scaling
  double f_rot = 0.0;    // inertial rotation rate
  double c_buoy = 0.0;   // buoyancy coupling strength

  double nu = 1.0;  // viscosity (both kinds)
};

// Static mode bookkeeping for the truncated 2-torus model. One retained
// wavevector representative (half-plane: kx > 0, or kx == 0 and ky > 0)
// carries four coordinates: velocity cos/sin along the unit vector
// perpendicular to k, temperature cos/sin. The zero wavevector is excluded,
// so every field has zero mean and the smallest weight is 1.
struct BoussinesqLayout {
  struct Rep {
    int kx = 0, ky = 0;
    double lambda = 0.0;          // |k|^2
    std::array<double, 2> perp{}; // (-ky, kx)/|k|
    // coordinate indices of this representative's four modes
    std::size_t vel_cos = 0, vel_sin = 0, temp_cos = 0, temp_sin = 0;
  };
  int radius = 0;
  std::vector<Rep> reps;
  std::vector<double> weights;        // per coordinate, non-decreasing
  std::vector<Component> tags;
  std::size_t dim() const { return weights.size(); }
};

BoussinesqLayout boussinesq_layout(int trunc_radius);

// Assembles the operator set (space, A, E, advection, structural constants).
// Noise hooks are left empty; attach_noise fills them. Throws on invalid
// parameters, in particular when c_buoy exceeds min(nu, K_T * kappa), which
// would break the advertised coercivity constant.
OperatorSet make_model(const ModelSpec& spec);

std::string model_kind_name(ModelKind kind);

}  // namespace sge
