#include "sge/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace sge {

namespace {

using cplx = std::complex<double>;

// L2(T^2) normalization of the trig basis: integral of (n cos(k.x))^2 is 1.
constexpr double kBasisNorm = 0.7071067811865475 / std::numbers::pi; // 1/(sqrt(2) pi)
// Pairing prefactor (2 pi)^2 * n used when reading convolution output back
// into coefficients.
const double kPairPref = 2.0 * std::numbers::sqrt2 * std::numbers::pi;

// Injective for |kx|, |ky| < 512, far beyond any usable truncation radius.
long long pack_wavevector(int kx, int ky) {
  return (static_cast<long long>(kx) + 512) * 1024 + (static_cast<long long>(ky) + 512);
}

OperatorSet make_diagonal(const ModelSpec& spec) {
  if (!(spec.nu > 0.0))
    throw std::invalid_argument("diagonal model: nu must be positive");
  auto space = make_space(spec.dim, spec.weights);

  OperatorSet ops;
  ops.space = space;
  const auto n = static_cast<Eigen::Index>(space->dim);
  ops.A = spec.nu * Eigen::MatrixXd(space->weight_pow(1).asDiagonal());
  ops.E = Eigen::MatrixXd::Zero(n, n);
  ops.c1 = spec.nu;  // a(u,u) = nu ||u||^2 exactly
  ops.c2 = 0.0;
  return ops;
}

// Immutable lattice bookkeeping for the convolutions. Amplitudes are indexed
// by the full lattice (every representative and its negative), so conjugate
// symmetry lets the accumulation target only the representatives. All
// per-call scratch lives on the caller's stack frame; the table itself is
// safe to share across threads.
struct ConvTable {
  struct Slot {
    int kx, ky;
  };
  std::shared_ptr<const BoussinesqLayout> layout;
  std::vector<Slot> slots;                    // slot 2r = +k_r, 2r+1 = -k_r
  std::unordered_map<long long, int> rep_of;  // packed wavevector -> rep id

  explicit ConvTable(std::shared_ptr<const BoussinesqLayout> lay)
      : layout(std::move(lay)) {
    const auto& reps = layout->reps;
    slots.resize(2 * reps.size());
    for (std::size_t r = 0; r < reps.size(); ++r) {
      slots[2 * r] = {reps[r].kx, reps[r].ky};
      slots[2 * r + 1] = {-reps[r].kx, -reps[r].ky};
      rep_of.emplace(pack_wavevector(reps[r].kx, reps[r].ky), static_cast<int>(r));
    }
  }
};

void load_velocity(const BoussinesqLayout& layout, const State& u,
                   std::vector<cplx>& out_x, std::vector<cplx>& out_y) {
  const auto& reps = layout.reps;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& rep = reps[r];
    const cplx z(0.5 * kBasisNorm * u.c[static_cast<Eigen::Index>(rep.vel_cos)],
                 -0.5 * kBasisNorm * u.c[static_cast<Eigen::Index>(rep.vel_sin)]);
    out_x[2 * r] = z * rep.perp[0];
    out_y[2 * r] = z * rep.perp[1];
    out_x[2 * r + 1] = std::conj(out_x[2 * r]);
    out_y[2 * r + 1] = std::conj(out_y[2 * r]);
  }
}

void load_temperature(const BoussinesqLayout& layout, const State& u,
                      std::vector<cplx>& out) {
  const auto& reps = layout.reps;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& rep = reps[r];
    const cplx z(0.5 * kBasisNorm * u.c[static_cast<Eigen::Index>(rep.temp_cos)],
                 -0.5 * kBasisNorm * u.c[static_cast<Eigen::Index>(rep.temp_sin)]);
    out[2 * r] = z;
    out[2 * r + 1] = std::conj(z);
  }
}

// out += B(u, w) in coefficient form: (u . grad) applied to both the
// velocity and the temperature carried by w, paired back against the basis.
void accumulate_pair(const ConvTable& tbl, const State& u, const State& w,
                     State& out) {
  const auto& layout = *tbl.layout;
  const auto& reps = layout.reps;
  const std::size_t m = tbl.slots.size();

  std::vector<cplx> vel_x(m), vel_y(m), adv_x(m), adv_y(m), theta(m);
  load_velocity(layout, u, vel_x, vel_y);
  load_velocity(layout, w, adv_x, adv_y);
  load_temperature(layout, w, theta);
  std::vector<cplx> acc_x(reps.size()), acc_y(reps.size()), acc_t(reps.size());

  for (std::size_t i = 0; i < m; ++i) {
    const cplx ux = vel_x[i], uy = vel_y[i];
    if (ux == cplx(0) && uy == cplx(0)) continue;
    for (std::size_t j = 0; j < m; ++j) {
      const auto it = tbl.rep_of.find(
          pack_wavevector(tbl.slots[i].kx + tbl.slots[j].kx,
                          tbl.slots[i].ky + tbl.slots[j].ky));
      if (it == tbl.rep_of.end()) continue;
      // i (u(q1) . q2), the symbol of the directional derivative
      const cplx s = cplx(0.0, 1.0) *
                     (ux * static_cast<double>(tbl.slots[j].kx) +
                      uy * static_cast<double>(tbl.slots[j].ky));
      const auto r = static_cast<std::size_t>(it->second);
      acc_x[r] += s * adv_x[j];
      acc_y[r] += s * adv_y[j];
      acc_t[r] += s * theta[j];
    }
  }

  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& rep = reps[r];
    const cplx vel_amp = acc_x[r] * rep.perp[0] + acc_y[r] * rep.perp[1];
    out.c[static_cast<Eigen::Index>(rep.vel_cos)] += kPairPref * vel_amp.real();
    out.c[static_cast<Eigen::Index>(rep.vel_sin)] -= kPairPref * vel_amp.imag();
    out.c[static_cast<Eigen::Index>(rep.temp_cos)] += kPairPref * acc_t[r].real();
    out.c[static_cast<Eigen::Index>(rep.temp_sin)] -= kPairPref * acc_t[r].imag();
  }
}

OperatorSet make_boussinesq(const ModelSpec& spec) {
  if (spec.trunc_radius < 1)
    throw std::invalid_argument("rot-boussinesq model: trunc_radius must be >= 1");
  if (!(spec.nu > 0.0) || !(spec.kappa > 0.0) || !(spec.K_T > 0.0))
    throw std::invalid_argument("rot-boussinesq model: nu, kappa, K_T must be positive");
  if (spec.c_buoy < 0.0)
    throw std::invalid_argument("rot-boussinesq model: c_buoy must be non-negative");
  const double diss = std::min(spec.nu, spec.K_T * spec.kappa);
  if (spec.c_buoy > diss)
    throw std::invalid_argument(
        "rot-boussinesq model: c_buoy exceeds min(nu, K_T*kappa); coercivity lost");

  auto layout = std::make_shared<BoussinesqLayout>(boussinesq_layout(spec.trunc_radius));
  auto space = make_space(layout->dim(), layout->weights, layout->tags);

  OperatorSet ops;
  ops.space = space;
  const auto n = static_cast<Eigen::Index>(space->dim);
  ops.A = Eigen::MatrixXd::Zero(n, n);
  ops.E = Eigen::MatrixXd::Zero(n, n);

  for (const auto& rep : layout->reps) {
    const auto vc = static_cast<Eigen::Index>(rep.vel_cos);
    const auto vs = static_cast<Eigen::Index>(rep.vel_sin);
    const auto tc = static_cast<Eigen::Index>(rep.temp_cos);
    const auto ts = static_cast<Eigen::Index>(rep.temp_sin);

    ops.A(vc, vc) = spec.nu * rep.lambda;
    ops.A(vs, vs) = spec.nu * rep.lambda;
    ops.A(tc, tc) = spec.K_T * spec.kappa * rep.lambda;
    ops.A(ts, ts) = spec.K_T * spec.kappa * rep.lambda;

    // Buoyancy pulls temperature into the vertical velocity component; the
    // projection of e_2 onto the divergence-free direction of k is kx/|k|.
    const double lift = rep.kx / std::sqrt(rep.lambda);
    ops.A(vc, tc) = -spec.c_buoy * lift;
    ops.A(vs, ts) = -spec.c_buoy * lift;

    // Inertial rotation acts inside each velocity (cos, sin) pair.
    ops.E(vc, vs) = -spec.f_rot;
    ops.E(vs, vc) = spec.f_rot;
  }

  auto tbl = std::make_shared<const ConvTable>(layout);
  ops.b_pair = [tbl](const State& u, const State& w, State& out) {
    accumulate_pair(*tbl, u, w, out);
  };
  ops.b_jacobian = [tbl, space](const State& u) {
    const auto dim = static_cast<Eigen::Index>(space->dim);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    State basis = zero_state(space);
    State col = zero_state(space);
    for (Eigen::Index j = 0; j < dim; ++j) {
      basis.c.setZero();
      basis.c[j] = 1.0;
      col.c.setZero();
      accumulate_pair(*tbl, u, basis, col);
      accumulate_pair(*tbl, basis, u, col);
      jac.col(j) = col.c;
    }
    return jac;
  };

  // a(u,u) >= min(nu, K_T kappa) ||u||^2 - (c_buoy/2) |u|^2 and lambda_min = 1,
  // so c_buoy <= diss leaves half the dissipation.
  ops.c1 = 0.5 * diss;

  // Finite-dimensional advection bound via l1-l2 splits of the convolution:
  // |b| <= sqrt(#lattice)/(2 pi) |u| ||w|| |s|, then norm interpolation with
  // lambda_min = 1 and lambda_max = R^2.
  const double m_full = 2.0 * static_cast<double>(layout->reps.size());
  const double lam_max = layout->weights.back();
  ops.c2 = std::sqrt(m_full) / (2.0 * std::numbers::pi) * std::pow(lam_max, 0.25);
  return ops;
}

}  // namespace

BoussinesqLayout boussinesq_layout(int trunc_radius) {
  if (trunc_radius < 1)
    throw std::invalid_argument("boussinesq_layout: trunc_radius must be >= 1");
  BoussinesqLayout layout;
  layout.radius = trunc_radius;

  const int R2 = trunc_radius * trunc_radius;
  for (int kx = 0; kx <= trunc_radius; ++kx) {
    for (int ky = -trunc_radius; ky <= trunc_radius; ++ky) {
      if (kx == 0 && ky <= 0) continue;  // half-plane representatives only
      const int k2 = kx * kx + ky * ky;
      if (k2 == 0 || k2 > R2) continue;
      BoussinesqLayout::Rep rep;
      rep.kx = kx;
      rep.ky = ky;
      rep.lambda = static_cast<double>(k2);
      const double len = std::sqrt(rep.lambda);
      rep.perp = {-ky / len, kx / len};
      layout.reps.push_back(rep);
    }
  }
  std::sort(layout.reps.begin(), layout.reps.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.lambda, a.kx, a.ky) < std::tie(b.lambda, b.kx, b.ky);
            });

  for (auto& rep : layout.reps) {
    rep.vel_cos = layout.weights.size();
    rep.vel_sin = rep.vel_cos + 1;
    rep.temp_cos = rep.vel_cos + 2;
    rep.temp_sin = rep.vel_cos + 3;
    for (int i = 0; i < 4; ++i) layout.weights.push_back(rep.lambda);
    layout.tags.insert(layout.tags.end(),
                       {Component::velocity, Component::velocity,
                        Component::temperature, Component::temperature});
  }
  return layout;
}

OperatorSet make_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::diagonal_linear:
      return make_diagonal(spec);
    case ModelKind::rot_boussinesq_2d:
      return make_boussinesq(spec);
  }
  throw std::invalid_argument("make_model: unknown model kind");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::diagonal_linear: return "diagonal-linear";
    case ModelKind::rot_boussinesq_2d: return "rot-boussinesq-2d";
  }
  return "unknown";
}

}  // namespace sge
