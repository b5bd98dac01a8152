#include "sge/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sge {

namespace {

double psi_value(PsiKind kind, double u) {
  switch (kind) {
    case PsiKind::identity: return u;
    case PsiKind::tanh_saturating: return std::tanh(u);
    case PsiKind::constant_one: return 1.0;
  }
  return 0.0;
}

double psi_deriv(PsiKind kind, double u) {
  switch (kind) {
    case PsiKind::identity: return 1.0;
    case PsiKind::tanh_saturating: {
      const double th = std::tanh(u);
      return 1.0 - th * th;
    }
    case PsiKind::constant_one: return 0.0;
  }
  return 0.0;
}

double psi_second(PsiKind kind, double u) {
  switch (kind) {
    case PsiKind::identity: return 0.0;
    case PsiKind::tanh_saturating: {
      const double th = std::tanh(u);
      return -2.0 * th * (1.0 - th * th);
    }
    case PsiKind::constant_one: return 0.0;
  }
  return 0.0;
}

Eigen::MatrixXd build_alpha(const SpacePtr& space, const NoiseCfg& cfg) {
  const auto dim = static_cast<Eigen::Index>(space->dim);
  const auto kdims = static_cast<Eigen::Index>(cfg.k_dims);
  Eigen::MatrixXd alpha(dim, kdims);

  switch (cfg.profile) {
    case AlphaProfile::flat:
      alpha.setOnes();
      break;
    case AlphaProfile::inverse_weight:
      // alpha_{jk}^2 proportional to 1/lambda_j: every retained spectral shell
      // contributes the same amount at smoothness level one.
      for (Eigen::Index j = 0; j < dim; ++j)
        alpha.row(j).setConstant(1.0 / std::sqrt(space->weights[j]));
      break;
    case AlphaProfile::custom: {
      if (cfg.custom_alpha.size() != cfg.k_dims)
        throw std::invalid_argument("noise: custom_alpha needs one row per direction");
      for (Eigen::Index k = 0; k < kdims; ++k) {
        const auto& row = cfg.custom_alpha[static_cast<std::size_t>(k)];
        if (row.size() != space->dim)
          throw std::invalid_argument("noise: custom_alpha row size != dim");
        for (Eigen::Index j = 0; j < dim; ++j) alpha(j, k) = row[static_cast<std::size_t>(j)];
      }
      break;
    }
  }

  const double raw = alpha.squaredNorm();
  if (!(raw > 0.0)) throw std::invalid_argument("noise: alpha profile is zero");
  if (!(cfg.total_hs_sq > 0.0))
    throw std::invalid_argument("noise: total_hs_sq must be positive");
  alpha *= std::sqrt(cfg.total_hs_sq / raw);
  return alpha;
}

}  // namespace

NoisePtr make_noise(const SpacePtr& space, const NoiseCfg& cfg) {
  if (!space) throw std::invalid_argument("make_noise: null space");
  auto spec = std::make_shared<NoiseSpec>();
  spec->space = space;
  spec->regime = cfg.regime;
  spec->psi = cfg.psi;
  spec->strat_factor = cfg.strat_factor;

  if (cfg.regime == NoiseRegime::none) {
    spec->k_dims = 0;
    return spec;
  }
  if (cfg.k_dims == 0)
    throw std::invalid_argument("make_noise: need at least one direction");

  spec->k_dims = cfg.k_dims;
  spec->alpha = build_alpha(space, cfg);

  const auto dim = static_cast<Eigen::Index>(space->dim);
  const double total = spec->alpha.squaredNorm();
  const double max_row = spec->alpha.rowwise().squaredNorm().maxCoeff();

  switch (cfg.regime) {
    case NoiseRegime::additive:
      spec->c3 = std::sqrt(total);
      spec->c4 = 0.0;
      break;
    case NoiseRegime::nemytskii_ito:
      // |Psi(u)| <= |u| for identity/tanh and <= 1 for the constant profile.
      spec->c3 = cfg.psi == PsiKind::constant_one ? std::sqrt(total)
                                                  : std::sqrt(max_row);
      spec->c4 = 0.0;
      break;
    case NoiseRegime::nemytskii_stratonovich:
      spec->c3 = cfg.psi == PsiKind::constant_one ? std::sqrt(total)
                                                  : std::sqrt(max_row);
      // |Psi Psi'| <= |u| for identity and tanh, and vanishes for constant.
      spec->c4 = cfg.psi == PsiKind::constant_one ? 0.0
                                                  : cfg.strat_factor * max_row;
      break;
    case NoiseRegime::functional: {
      if (cfg.functional_shapes.size() != cfg.k_dims)
        throw std::invalid_argument("noise: functional_shapes needs one row per direction");
      spec->shapes.resize(dim, static_cast<Eigen::Index>(cfg.k_dims));
      for (std::size_t k = 0; k < cfg.k_dims; ++k) {
        if (cfg.functional_shapes[k].size() != space->dim)
          throw std::invalid_argument("noise: functional shape size != dim");
        for (Eigen::Index j = 0; j < dim; ++j)
          spec->shapes(j, static_cast<Eigen::Index>(k)) =
              cfg.functional_shapes[k][static_cast<std::size_t>(j)];
      }
      double c3_sq = 0.0;
      for (Eigen::Index k = 0; k < spec->alpha.cols(); ++k)
        c3_sq += spec->shapes.col(k).squaredNorm() * spec->alpha.col(k).squaredNorm();
      spec->c3 = std::sqrt(c3_sq);
      spec->c4 = 0.0;
      break;
    }
    case NoiseRegime::none:
      break;
  }
  return spec;
}

void sigma_apply(const NoiseSpec& noise, double /*t*/, const State& u,
                 std::size_t k, State& out) {
  if (u.space != noise.space)
    throw std::invalid_argument("sigma_apply: state space mismatch");
  if (k >= noise.k_dims) throw std::invalid_argument("sigma_apply: direction out of range");
  const auto kk = static_cast<Eigen::Index>(k);
  out.space = noise.space;
  switch (noise.regime) {
    case NoiseRegime::additive:
      out.c = noise.alpha.col(kk);
      break;
    case NoiseRegime::nemytskii_ito:
    case NoiseRegime::nemytskii_stratonovich:
      out.c = noise.alpha.col(kk);
      for (Eigen::Index j = 0; j < out.c.size(); ++j)
        out.c[j] *= psi_value(noise.psi, u.c[j]);
      break;
    case NoiseRegime::functional:
      out.c = noise.shapes.col(kk).dot(u.c) * noise.alpha.col(kk);
      break;
    case NoiseRegime::none:
      out.c.setZero(static_cast<Eigen::Index>(noise.space->dim));
      break;
  }
}

void xi_apply(const NoiseSpec& noise, double /*t*/, const State& u, State& out) {
  if (u.space != noise.space)
    throw std::invalid_argument("xi_apply: state space mismatch");
  out.space = noise.space;
  out.c.setZero(static_cast<Eigen::Index>(noise.space->dim));
  if (noise.regime != NoiseRegime::nemytskii_stratonovich) return;
  for (Eigen::Index j = 0; j < out.c.size(); ++j) {
    const double row_sq = noise.alpha.row(j).squaredNorm();
    out.c[j] = noise.strat_factor * psi_value(noise.psi, u.c[j]) *
               psi_deriv(noise.psi, u.c[j]) * row_sq;
  }
}

void attach_noise(OperatorSet& ops, const NoisePtr& noise) {
  if (!noise) throw std::invalid_argument("attach_noise: null noise");
  if (noise->space != ops.space)
    throw std::invalid_argument("attach_noise: noise built for a different space");
  ops.noise_dim = noise->k_dims;
  ops.c3 = noise->c3;
  ops.c4 = noise->c4;
  if (noise->regime == NoiseRegime::none) return;

  ops.sigma = [noise](double t, const State& u, std::size_t k, State& out) {
    sigma_apply(*noise, t, u, k, out);
  };
  if (noise->regime == NoiseRegime::nemytskii_stratonovich) {
    ops.xi = [noise](double t, const State& u, State& out) {
      xi_apply(*noise, t, u, out);
    };
    ops.xi_jacobian = [noise](double /*t*/, const State& u) {
      const auto dim = static_cast<Eigen::Index>(noise->space->dim);
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double row_sq = noise->alpha.row(j).squaredNorm();
        const double v = u.c[j];
        const double d = psi_deriv(noise->psi, v);
        jac(j, j) = noise->strat_factor * row_sq *
                    (d * d + psi_value(noise->psi, v) * psi_second(noise->psi, v));
      }
      return jac;
    };
  }
}

SigmaN project_sigma(const NoisePtr& noise, double level) {
  if (!noise) throw std::invalid_argument("project_sigma: null noise");
  if (!(level > 0.0)) throw std::invalid_argument("project_sigma: level must be positive");
  SigmaN sn;
  sn.base = noise;
  sn.level = level;
  const auto& w = noise->space->weights;
  std::size_t m = 0;
  while (m < noise->space->dim && w[static_cast<Eigen::Index>(m)] <= level) ++m;
  sn.m_modes = m;
  return sn;
}

void sigma_n_apply(const SigmaN& sn, double t, const State& u, std::size_t k,
                   State& out) {
  sigma_apply(*sn.base, t, u, k, out);
  const auto dim = out.c.size();
  for (auto j = static_cast<Eigen::Index>(sn.m_modes); j < dim; ++j) out.c[j] = 0.0;
}

State sigma_n_increment(const SigmaN& sn, double t, const State& u,
                        const Eigen::VectorXd& eta) {
  if (static_cast<std::size_t>(eta.size()) != sn.base->k_dims)
    throw std::invalid_argument("sigma_n_increment: eta size != noise directions");
  State acc = zero_state(sn.base->space);
  State col = zero_state(sn.base->space);
  for (std::size_t k = 0; k < sn.base->k_dims; ++k) {
    sigma_n_apply(sn, t, u, k, col);
    acc.c += eta[static_cast<Eigen::Index>(k)] * col.c;
  }
  return acc;
}

double sigma_hs_sq(const NoiseSpec& noise, double t, const State& u) {
  double total = 0.0;
  State col = zero_state(noise.space);
  for (std::size_t k = 0; k < noise.k_dims; ++k) {
    sigma_apply(noise, t, u, k, col);
    total += col.c.squaredNorm();
  }
  return total;
}

double sigma_n_hs_sq(const SigmaN& sn, double t, const State& u) {
  double total = 0.0;
  State col = zero_state(sn.base->space);
  for (std::size_t k = 0; k < sn.base->k_dims; ++k) {
    sigma_apply(*sn.base, t, u, k, col);
    total += col.c.head(static_cast<Eigen::Index>(sn.m_modes)).squaredNorm();
  }
  return total;
}

double sigma_n_v_sq(const SigmaN& sn, double t, const State& u) {
  double total = 0.0;
  State col = zero_state(sn.base->space);
  const auto& w = sn.base->space->weights;
  for (std::size_t k = 0; k < sn.base->k_dims; ++k) {
    sigma_apply(*sn.base, t, u, k, col);
    for (std::size_t j = 0; j < sn.m_modes; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      total += w[jj] * col.c[jj] * col.c[jj];
    }
  }
  return total;
}

double sigma_tail_sq(const SigmaN& sn, double t, const State& u) {
  double total = 0.0;
  State col = zero_state(sn.base->space);
  const auto dim = static_cast<Eigen::Index>(sn.base->space->dim);
  for (std::size_t k = 0; k < sn.base->k_dims; ++k) {
    sigma_apply(*sn.base, t, u, k, col);
    for (auto j = static_cast<Eigen::Index>(sn.m_modes); j < dim; ++j)
      total += col.c[j] * col.c[j];
  }
  return total;
}

SigmaNConditions sigma_n_conditions(const SigmaN& sn, std::size_t n_samples,
                                    std::uint64_t seed) {
  const auto& space = sn.base->space;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);

  SigmaNConditions res;
  res.v_margin_min = std::numeric_limits<double>::infinity();
  res.h_margin_min = std::numeric_limits<double>::infinity();

  State u = zero_state(space);
  State col = zero_state(space);
  const auto dim = static_cast<Eigen::Index>(space->dim);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double amp = std::exp(unif(gen));
    for (Eigen::Index j = 0; j < dim; ++j) u.c[j] = amp * normal(gen);

    // Grouped sums: every addend is individually non-negative because the
    // retained weights satisfy lambda_j <= N, so round-off cannot flip signs.
    double v_margin = 0.0;
    double h_margin = 0.0;
    for (std::size_t k = 0; k < sn.base->k_dims; ++k) {
      sigma_apply(*sn.base, 0.0, u, k, col);
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double sq = col.c[j] * col.c[j];
        if (j < static_cast<Eigen::Index>(sn.m_modes)) {
          v_margin += (sn.level - space->weights[j]) * sq;
        } else {
          v_margin += sn.level * sq;
          h_margin += sq;
        }
      }
    }
    res.v_margin_min = std::min(res.v_margin_min, v_margin);
    res.h_margin_min = std::min(res.h_margin_min, h_margin);
  }
  res.pass = res.v_margin_min >= 0.0 && res.h_margin_min >= 0.0;
  return res;
}

WienerPath sample_wiener(double T, std::size_t master_steps, std::size_t k_dims,
                         std::uint64_t seed) {
  if (!(T > 0.0)) throw std::invalid_argument("sample_wiener: T must be positive");
  if (master_steps == 0) throw std::invalid_argument("sample_wiener: need steps");
  WienerPath w;
  w.T = T;
  w.master_steps = master_steps;
  w.k_dims = k_dims;
  w.dW.resize(static_cast<Eigen::Index>(master_steps), static_cast<Eigen::Index>(k_dims));

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqrt_h = std::sqrt(T / static_cast<double>(master_steps));
  for (Eigen::Index i = 0; i < w.dW.rows(); ++i)
    for (Eigen::Index k = 0; k < w.dW.cols(); ++k) w.dW(i, k) = sqrt_h * normal(gen);
  return w;
}

Eigen::MatrixXd scheme_increments(const WienerPath& w, std::size_t n_steps) {
  if (n_steps == 0 || w.master_steps % n_steps != 0)
    throw std::invalid_argument("scheme_increments: steps must divide master grid");
  const std::size_t r = w.master_steps / n_steps;
  Eigen::MatrixXd eta =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_steps),
                            static_cast<Eigen::Index>(w.k_dims));
  for (std::size_t n = 0; n < n_steps; ++n)
    for (std::size_t i = 0; i < r; ++i)
      eta.row(static_cast<Eigen::Index>(n)) +=
          w.dW.row(static_cast<Eigen::Index>(n * r + i));
  return eta;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sge
