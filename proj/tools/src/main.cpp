// Command line front end: validate a model/noise configuration, run the
// Monte Carlo study, and inspect convergence or martingale diagnostics.
#include "sgecli/config.hpp"

#include "sge/csvio.hpp"
#include "sge/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> ensemble;
  bool independent_paths = false;
};

void add_overrides(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "override the config seed");
  cmd->add_option("--workers", ov.workers, "override the worker thread count");
  cmd->add_option("--ensemble", ov.ensemble, "override the ensemble size");
  cmd->add_flag("--independent-paths", ov.independent_paths,
                "redraw noise per rung instead of sharing the master path");
}

sge::ExperimentConfig resolve(const std::string& config_path, const Overrides& ov) {
  sge::ExperimentConfig cfg = sgecli::load_config(config_path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.workers) cfg.workers = *ov.workers;
  if (ov.ensemble) cfg.ensemble = *ov.ensemble;
  if (ov.independent_paths) cfg.independent_paths = true;
  return cfg;
}

void print_verdicts(const sge::ExperimentResult& res) {
  for (const auto& v : res.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.id
              << " statistic=" << sge::format_g17(v.statistic)
              << " threshold=" << sge::format_g17(v.threshold) << " :: " << v.note
              << "\n";
  std::cout << (res.all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
}

void write_manifest(const sge::ExperimentResult& res, const std::string& out_dir) {
  nlohmann::ordered_json manifest;
  manifest["config"] = nlohmann::ordered_json::parse(sgecli::config_echo_json(res.cfg));
  manifest["versions"] = {
      {"sge", SGE_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)}};
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const auto& v : res.verdicts)
    verdicts.push_back({{"id", v.id},
                        {"statistic", v.statistic},
                        {"threshold", v.threshold},
                        {"pass", v.pass}});
  manifest["verdicts"] = verdicts;
  manifest["all_pass"] = res.all_pass;
  std::ofstream f(std::filesystem::path(out_dir) / "manifest.json",
                  std::ios::binary | std::ios::trunc);
  f << manifest.dump(2) << "\n";
}

int cmd_validate(const std::string& config_path, std::uint64_t seed_salt) {
  const sge::ExperimentConfig cfg = sgecli::load_config(config_path);
  sge::OperatorSet ops = sge::make_model(cfg.model);
  sge::NoisePtr noise = sge::make_noise(ops.space, cfg.noise);
  sge::attach_noise(ops, noise);
  const sge::AxiomReport rep =
      sge::verify_axioms(ops, cfg.axiom_samples, sge::mix_seed(cfg.seed, seed_salt));
  const sge::Thresholds thr = sge::scheme_thresholds(cfg.scheme.T, ops.c3, ops.c4);

  auto line = [](const char* name, const sge::AxiomCheck& c) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << name
              << " worst_margin=" << sge::format_g17(c.worst) << "\n";
  };
  std::cout << "model=" << sge::model_kind_name(cfg.model.kind)
            << " dim=" << ops.space->dim << "\n";
  line("coercivity", rep.coercivity);
  line("rotation-skew", rep.rotation_skew);
  line("advection-skew", rep.advection_skew);
  line("advection-bound", rep.advection_bound);
  line("noise-growth", rep.noise_growth);
  line("correction-growth", rep.correction_growth);
  std::cout << "constants c1=" << sge::format_g17(rep.c1_hat)
            << " c2=" << sge::format_g17(rep.c2_hat)
            << " c3=" << sge::format_g17(rep.c3_hat)
            << " c4=" << sge::format_g17(rep.c4_hat) << "\n";
  std::cout << "thresholds c5=" << sge::format_g17(thr.c5) << " N0=" << thr.N0
            << " N1=" << thr.N1 << "\n";
  std::cout << (rep.valid ? "VALID" : "INVALID") << "\n";
  return rep.valid ? 0 : 2;
}

int run_and_report(const std::string& config_path, const Overrides& ov,
                   const std::string& out_dir, bool print_table, bool bdg_only) {
  const sge::ExperimentConfig cfg = resolve(config_path, ov);
  const sge::ExperimentResult res = sge::run_experiment(cfg);

  if (print_table) {
    std::cout << "rung statistics (ensemble means)\n";
    std::cout << "N,ed_l2vdual,es_l2h,gap,uniform,es_bounded\n";
    for (const auto& rung : res.rungs) {
      auto mean = [](const std::vector<double>& v) {
        return sge::summarize(v).mean;
      };
      std::vector<double> ed, es;
      for (const auto& r : rung.rows) {
        ed.push_back(r.ed_l2vdual);
        es.push_back(r.es_l2h);
      }
      std::cout << rung.n_steps << ',' << sge::format_g17(mean(ed)) << ','
                << sge::format_g17(mean(es)) << ','
                << sge::format_g17(mean(rung.gap_closed)) << ','
                << sge::format_g17(mean(rung.uniform_stat)) << ','
                << sge::format_g17(mean(rung.es_bounded)) << "\n";
    }
    for (const auto& ld : res.law)
      std::cout << "law " << ld.functional << " N" << ld.coarse << "->N" << ld.fine
                << " ks=" << sge::format_g17(ld.ks)
                << " w1=" << sge::format_g17(ld.w1)
                << " ks_tol=" << sge::format_g17(ld.ks_tol) << "\n";
  }

  if (bdg_only) {
    for (const auto& rung : res.rungs) {
      const sge::BdgResult& b = rung.bdg;
      if (!b.checked) {
        std::cout << "N=" << rung.n_steps << " no martingale (noise disabled)\n";
        continue;
      }
      std::cout << "N=" << rung.n_steps << " q=" << sge::format_g17(b.q)
                << " lhs=" << sge::format_g17(b.lhs_mean)
                << " rhs=" << sge::format_g17(b.rhs_mean)
                << " constant=" << sge::format_g17(b.constant)
                << " ratio=" << sge::format_g17(b.ratio)
                << (b.pass ? " PASS" : " FAIL") << "\n";
    }
  }

  if (!out_dir.empty()) {
    sge::write_outputs(res, out_dir);
    write_manifest(res, out_dir);
    std::cout << "outputs written to " << out_dir << "\n";
  }
  if (!bdg_only) print_verdicts(res);
  return res.all_pass ? 0 : 3;
}

int cmd_report(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::ifstream v(dir / "verdicts.txt");
  if (!v) {
    std::cerr << "no verdicts.txt under " << out_dir << "\n";
    return 1;
  }
  std::cout << "verdicts (" << (dir / "verdicts.txt").string() << ")\n";
  std::string linebuf;
  bool all_pass = false;
  while (std::getline(v, linebuf)) {
    std::cout << "  " << linebuf << "\n";
    if (linebuf == "ALL PASS") all_pass = true;
  }
  std::ifstream s(dir / "summary.csv");
  if (s) {
    std::size_t rows = 0;
    while (std::getline(s, linebuf)) ++rows;
    std::cout << "summary.csv rows: " << rows << "\n";
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic geophysical flow scheme: simulator and certifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  Overrides ov;

  auto* validate = app.add_subcommand("validate", "check operator axioms and thresholds");
  validate->add_option("--config", config_path, "JSON experiment config")->required();

  auto* simulate = app.add_subcommand("simulate", "run the study and write outputs");
  simulate->add_option("--config", config_path, "JSON experiment config")->required();
  simulate->add_option("--out", out_dir, "output directory (default out/<name>)");
  add_overrides(simulate, ov);

  auto* converge = app.add_subcommand("converge", "run the study and print rung tables");
  converge->add_option("--config", config_path, "JSON experiment config")->required();
  converge->add_option("--out", out_dir, "also write outputs here");
  add_overrides(converge, ov);

  auto* bdg = app.add_subcommand("bdg", "run the study and print martingale diagnostics");
  bdg->add_option("--config", config_path, "JSON experiment config")->required();
  add_overrides(bdg, ov);

  auto* report = app.add_subcommand("report", "summarize a finished output directory");
  report->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config_path, 0xAF1);
    if (simulate->parsed()) {
      std::string dir = out_dir;
      if (dir.empty())
        dir = (std::filesystem::path("out") /
               sgecli::load_config(config_path).name).string();
      return run_and_report(config_path, ov, dir, false, false);
    }
    if (converge->parsed()) return run_and_report(config_path, ov, out_dir, true, false);
    if (bdg->parsed()) return run_and_report(config_path, ov, "", false, true);
    if (report->parsed()) return cmd_report(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
