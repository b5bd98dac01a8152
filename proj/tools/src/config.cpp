#include "sgecli/config.hpp"

#include "sge/csvio.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace sgecli {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config " + where + ": " + what);
}

// Object wrapper that consumes keys; anything left at the end is an error.
class StrictObj {
 public:
  StrictObj(json obj, std::string where) : obj_(std::move(obj)), where_(std::move(where)) {
    if (!obj_.is_object()) fail(where_, "expected a JSON object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  json take(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(where_, std::string("missing required key '") + key + "'");
    json v = std::move(*it);
    obj_.erase(it);
    return v;
  }

  template <typename T>
  T get(const char* key, T fallback) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return fallback;
    T out;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(where_, std::string("key '") + key + "' has the wrong type");
    }
    obj_.erase(it);
    return out;
  }

  json sub(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return json();
    json v = std::move(*it);
    obj_.erase(it);
    return v;
  }

  void done() const {
    if (obj_.empty()) return;
    std::string keys;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!keys.empty()) keys += ", ";
      keys += it.key();
    }
    fail(where_, "unknown key(s): " + keys);
  }

  const std::string& where() const { return where_; }

 private:
  json obj_;
  std::string where_;
};

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

template <typename E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  const std::string s = v.get<std::string>();
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string opts;
  for (const auto& e : table) {
    if (!opts.empty()) opts += "|";
    opts += e.name;
  }
  fail(where, "'" + s + "' is not one of " + opts);
}

template <typename E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

constexpr EnumName<sge::ModelKind> kModelKinds[] = {
    {sge::ModelKind::diagonal_linear, "diagonal_linear"},
    {sge::ModelKind::rot_boussinesq_2d, "rot_boussinesq_2d"},
};
constexpr EnumName<sge::NoiseRegime> kRegimes[] = {
    {sge::NoiseRegime::none, "none"},
    {sge::NoiseRegime::additive, "additive"},
    {sge::NoiseRegime::nemytskii_ito, "nemytskii_ito"},
    {sge::NoiseRegime::nemytskii_stratonovich, "nemytskii_stratonovich"},
    {sge::NoiseRegime::functional, "functional"},
};
constexpr EnumName<sge::PsiKind> kPsis[] = {
    {sge::PsiKind::identity, "identity"},
    {sge::PsiKind::tanh_saturating, "tanh_saturating"},
    {sge::PsiKind::constant_one, "constant_one"},
};
constexpr EnumName<sge::AlphaProfile> kProfiles[] = {
    {sge::AlphaProfile::flat, "flat"},
    {sge::AlphaProfile::inverse_weight, "inverse_weight"},
    {sge::AlphaProfile::custom, "custom"},
};
constexpr EnumName<sge::SolverKind> kSolvers[] = {
    {sge::SolverKind::newton, "newton"},
    {sge::SolverKind::damped_picard, "damped_picard"},
};
constexpr EnumName<sge::ForcingKind> kForcingKinds[] = {
    {sge::ForcingKind::none, "none"},
    {sge::ForcingKind::deterministic, "deterministic"},
    {sge::ForcingKind::wind_proxy, "wind_proxy"},
};
constexpr EnumName<sge::ForcingShape> kForcingShapes[] = {
    {sge::ForcingShape::constant, "constant"},
    {sge::ForcingShape::sine, "sine"},
};
constexpr EnumName<sge::ProfileCfg::Kind> kProfileKinds[] = {
    {sge::ProfileCfg::Kind::zero, "zero"},
    {sge::ProfileCfg::Kind::coeffs, "coeffs"},
    {sge::ProfileCfg::Kind::smooth_decay, "smooth_decay"},
};
constexpr EnumName<sge::FunctionalSpec::Kind> kFunctionalKinds[] = {
    {sge::FunctionalSpec::Kind::energy_l2, "energy_l2"},
    {sge::FunctionalSpec::Kind::endpoint_h_norm, "endpoint_h_norm"},
    {sge::FunctionalSpec::Kind::mode_k_endpoint, "mode_k_endpoint"},
    {sge::FunctionalSpec::Kind::max_h_norm, "max_h_norm"},
};

sge::ProfileCfg parse_profile(const json& v, const std::string& where) {
  sge::ProfileCfg p;
  if (v.is_null()) return p;
  StrictObj o(v, where);
  p.kind = parse_enum(kProfileKinds, o.take("kind"), where + ".kind");
  if (o.has("coeffs")) {
    const json arr = o.sub("coeffs");
    if (!arr.is_array()) fail(where + ".coeffs", "expected an array of [index, value]");
    for (const auto& e : arr) {
      if (!e.is_array() || e.size() != 2)
        fail(where + ".coeffs", "entries must be [index, value] pairs");
      p.coeffs.emplace_back(e[0].get<std::size_t>(), e[1].get<double>());
    }
  }
  p.amp = o.get("amp", p.amp);
  p.decay = o.get("decay", p.decay);
  o.done();
  if (p.kind == sge::ProfileCfg::Kind::coeffs && p.coeffs.empty())
    fail(where, "kind 'coeffs' requires a non-empty coeffs array");
  return p;
}

std::vector<std::vector<double>> parse_matrix(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) {
    if (!row.is_array()) fail(where, "rows must be arrays of numbers");
    out.push_back(row.get<std::vector<double>>());
  }
  return out;
}

double parse_maybe_inf(StrictObj& o, const char* key, double fallback) {
  if (!o.has(key)) return fallback;
  const json v = o.sub(key);
  if (v.is_string() && v.get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  if (v.is_number()) return v.get<double>();
  fail(o.where(), std::string("key '") + key + "' must be a number or \"inf\"");
}

}  // namespace

sge::ExperimentConfig parse_config_text(const std::string& text,
                                        const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("not valid JSON: ") + e.what());
  }
  try {
  StrictObj o(root, origin);
  sge::ExperimentConfig cfg;

  cfg.name = o.get<std::string>("name", cfg.name);

  {
    StrictObj m(o.take("model"), origin + ".model");
    cfg.model.kind = parse_enum(kModelKinds, m.take("kind"), origin + ".model.kind");
    if (cfg.model.kind == sge::ModelKind::diagonal_linear) {
      cfg.model.dim = m.get<std::size_t>("dim", 0);
      if (cfg.model.dim == 0) fail(origin + ".model", "diagonal_linear requires dim >= 1");
      cfg.model.weights = m.get("weights", std::vector<double>{});
      if (cfg.model.weights.empty())
        for (std::size_t j = 1; j <= cfg.model.dim; ++j)
          cfg.model.weights.push_back(static_cast<double>(j));
      if (cfg.model.weights.size() != cfg.model.dim)
        fail(origin + ".model", "weights length must equal dim");
    } else {
      cfg.model.trunc_radius = m.get("trunc_radius", cfg.model.trunc_radius);
      cfg.model.kappa = m.get("kappa", cfg.model.kappa);
      cfg.model.K_T = m.get("K_T", cfg.model.K_T);
      cfg.model.f_rot = m.get("f_rot", cfg.model.f_rot);
      cfg.model.c_buoy = m.get("c_buoy", cfg.model.c_buoy);
    }
    cfg.model.nu = m.get("nu", cfg.model.nu);
    m.done();
  }

  if (o.has("noise")) {
    StrictObj n(o.take("noise"), origin + ".noise");
    cfg.noise.regime = parse_enum(kRegimes, n.take("regime"), origin + ".noise.regime");
    cfg.noise.k_dims = n.get("k_dims", cfg.noise.k_dims);
    if (n.has("psi"))
      cfg.noise.psi = parse_enum(kPsis, n.sub("psi"), origin + ".noise.psi");
    cfg.noise.strat_factor = n.get("strat_factor", cfg.noise.strat_factor);
    if (n.has("profile"))
      cfg.noise.profile =
          parse_enum(kProfiles, n.sub("profile"), origin + ".noise.profile");
    cfg.noise.total_hs_sq = n.get("total_hs_sq", cfg.noise.total_hs_sq);
    if (n.has("custom_alpha"))
      cfg.noise.custom_alpha =
          parse_matrix(n.sub("custom_alpha"), origin + ".noise.custom_alpha");
    if (n.has("functional_shapes"))
      cfg.noise.functional_shapes =
          parse_matrix(n.sub("functional_shapes"), origin + ".noise.functional_shapes");
    n.done();
  }

  if (o.has("scheme")) {
    StrictObj s(o.take("scheme"), origin + ".scheme");
    cfg.scheme.T = s.get("T", cfg.scheme.T);
    if (s.has("solver"))
      cfg.scheme.solver =
          parse_enum(kSolvers, s.sub("solver"), origin + ".scheme.solver");
    cfg.scheme.max_iters = s.get("max_iters", cfg.scheme.max_iters);
    cfg.scheme.solve_tol = s.get("solve_tol", cfg.scheme.solve_tol);
    cfg.scheme.cert_tol = s.get("cert_tol", cfg.scheme.cert_tol);
    s.done();
  }

  if (o.has("forcing")) {
    StrictObj f(o.take("forcing"), origin + ".forcing");
    cfg.forcing.kind =
        parse_enum(kForcingKinds, f.take("kind"), origin + ".forcing.kind");
    if (f.has("shape"))
      cfg.forcing.shape =
          parse_enum(kForcingShapes, f.sub("shape"), origin + ".forcing.shape");
    cfg.forcing.amp = f.get("amp", cfg.forcing.amp);
    cfg.forcing.freq = f.get("freq", cfg.forcing.freq);
    cfg.forcing.gain = f.get("gain", cfg.forcing.gain);
    cfg.forcing.window = f.get("window", cfg.forcing.window);
    cfg.forcing.source_dir = f.get("source_dir", cfg.forcing.source_dir);
    if (f.has("profile"))
      cfg.forcing.profile = parse_profile(f.sub("profile"), origin + ".forcing.profile");
    else if (cfg.forcing.kind != sge::ForcingKind::none)
      fail(origin + ".forcing", "non-trivial forcing requires a profile");
    f.done();
  }

  if (o.has("u0")) cfg.u0 = parse_profile(o.sub("u0"), origin + ".u0");

  cfg.ladder = o.take("ladder").get<std::vector<std::size_t>>();
  cfg.master_steps = o.get("master_steps", cfg.master_steps);
  cfg.ensemble = o.get("ensemble", cfg.ensemble);
  cfg.seed = o.get("seed", cfg.seed);
  cfg.independent_paths = o.get("independent_paths", cfg.independent_paths);
  cfg.workers = o.get("workers", cfg.workers);

  if (o.has("functionals")) {
    const json arr = o.sub("functionals");
    if (!arr.is_array()) fail(origin + ".functionals", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = origin + ".functionals[" + std::to_string(i) + "]";
      StrictObj fo(arr[i], where);
      sge::FunctionalSpec fs;
      fs.kind = parse_enum(kFunctionalKinds, fo.take("kind"), where + ".kind");
      fs.mode_index = fo.get("mode_index", fs.mode_index);
      fo.done();
      cfg.functionals.push_back(fs);
    }
  }

  cfg.j_max = o.get("j_max", cfg.j_max);
  cfg.fs_alpha = o.get("fs_alpha", cfg.fs_alpha);
  cfg.fs_p = o.get("fs_p", cfg.fs_p);
  cfg.fs_node_cap = o.get("fs_node_cap", cfg.fs_node_cap);
  cfg.bdg_q = o.get("bdg_q", cfg.bdg_q);
  cfg.bdg_stop_level = parse_maybe_inf(o, "bdg_stop_level", cfg.bdg_stop_level);
  cfg.axiom_samples = o.get("axiom_samples", cfg.axiom_samples);

  if (o.has("limits")) {
    StrictObj l(o.take("limits"), origin + ".limits");
    cfg.decay_ratio_limit = l.get("decay_ratio", cfg.decay_ratio_limit);
    cfg.bounded_variation_limit =
        l.get("bounded_variation", cfg.bounded_variation_limit);
    cfg.uniform_variation_limit =
        l.get("uniform_variation", cfg.uniform_variation_limit);
    cfg.coupling_median_limit = l.get("coupling_median", cfg.coupling_median_limit);
    cfg.recon_tol = l.get("recon_tol", cfg.recon_tol);
    cfg.gap_tol = l.get("gap_tol", cfg.gap_tol);
    l.done();
  }

  o.done();
  return cfg;
  } catch (const json::exception& e) {
    fail(origin, std::string("wrong value type: ") + e.what());
  }
}

sge::ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string config_echo_json(const sge::ExperimentConfig& cfg) {
  ordered root;
  root["name"] = cfg.name;

  ordered model;
  model["kind"] = enum_name(kModelKinds, cfg.model.kind);
  if (cfg.model.kind == sge::ModelKind::diagonal_linear) {
    model["dim"] = cfg.model.dim;
    model["weights"] = cfg.model.weights;
  } else {
    model["trunc_radius"] = cfg.model.trunc_radius;
    model["kappa"] = cfg.model.kappa;
    model["K_T"] = cfg.model.K_T;
    model["f_rot"] = cfg.model.f_rot;
    model["c_buoy"] = cfg.model.c_buoy;
  }
  model["nu"] = cfg.model.nu;
  root["model"] = model;

  ordered noise;
  noise["regime"] = enum_name(kRegimes, cfg.noise.regime);
  noise["k_dims"] = cfg.noise.k_dims;
  noise["psi"] = enum_name(kPsis, cfg.noise.psi);
  noise["strat_factor"] = cfg.noise.strat_factor;
  noise["profile"] = enum_name(kProfiles, cfg.noise.profile);
  noise["total_hs_sq"] = cfg.noise.total_hs_sq;
  if (!cfg.noise.custom_alpha.empty()) noise["custom_alpha"] = cfg.noise.custom_alpha;
  if (!cfg.noise.functional_shapes.empty())
    noise["functional_shapes"] = cfg.noise.functional_shapes;
  root["noise"] = noise;

  ordered scheme;
  scheme["T"] = cfg.scheme.T;
  scheme["solver"] = enum_name(kSolvers, cfg.scheme.solver);
  scheme["max_iters"] = cfg.scheme.max_iters;
  scheme["solve_tol"] = cfg.scheme.solve_tol;
  scheme["cert_tol"] = cfg.scheme.cert_tol;
  root["scheme"] = scheme;

  auto profile_json = [](const sge::ProfileCfg& p) {
    ordered j;
    j["kind"] = enum_name(kProfileKinds, p.kind);
    if (p.kind == sge::ProfileCfg::Kind::coeffs) {
      ordered arr = ordered::array();
      for (const auto& [idx, val] : p.coeffs) arr.push_back({idx, val});
      j["coeffs"] = arr;
    } else if (p.kind == sge::ProfileCfg::Kind::smooth_decay) {
      j["amp"] = p.amp;
      j["decay"] = p.decay;
    }
    return j;
  };

  ordered forcing;
  forcing["kind"] = enum_name(kForcingKinds, cfg.forcing.kind);
  if (cfg.forcing.kind != sge::ForcingKind::none) {
    forcing["shape"] = enum_name(kForcingShapes, cfg.forcing.shape);
    forcing["amp"] = cfg.forcing.amp;
    forcing["freq"] = cfg.forcing.freq;
    forcing["gain"] = cfg.forcing.gain;
    forcing["window"] = cfg.forcing.window;
    forcing["source_dir"] = cfg.forcing.source_dir;
    forcing["profile"] = profile_json(cfg.forcing.profile);
  }
  root["forcing"] = forcing;
  root["u0"] = profile_json(cfg.u0);

  root["ladder"] = cfg.ladder;
  root["master_steps"] = cfg.master_steps;
  root["ensemble"] = cfg.ensemble;
  root["seed"] = cfg.seed;
  root["independent_paths"] = cfg.independent_paths;
  root["workers"] = cfg.workers;

  ordered functionals = ordered::array();
  for (const auto& f : cfg.functionals) {
    ordered j;
    j["kind"] = enum_name(kFunctionalKinds, f.kind);
    if (f.kind == sge::FunctionalSpec::Kind::mode_k_endpoint)
      j["mode_index"] = f.mode_index;
    functionals.push_back(j);
  }
  root["functionals"] = functionals;

  root["j_max"] = cfg.j_max;
  root["fs_alpha"] = cfg.fs_alpha;
  root["fs_p"] = cfg.fs_p;
  root["fs_node_cap"] = cfg.fs_node_cap;
  root["bdg_q"] = cfg.bdg_q;
  if (std::isfinite(cfg.bdg_stop_level))
    root["bdg_stop_level"] = cfg.bdg_stop_level;
  else
    root["bdg_stop_level"] = "inf";
  root["axiom_samples"] = cfg.axiom_samples;

  ordered limits;
  limits["decay_ratio"] = cfg.decay_ratio_limit;
  limits["bounded_variation"] = cfg.bounded_variation_limit;
  limits["uniform_variation"] = cfg.uniform_variation_limit;
  limits["coupling_median"] = cfg.coupling_median_limit;
  limits["recon_tol"] = cfg.recon_tol;
  limits["gap_tol"] = cfg.gap_tol;
  root["limits"] = limits;

  return root.dump(2) + "\n";
}

}  // namespace sgecli
