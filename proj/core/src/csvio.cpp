#include "sge/csvio.hpp"

#include "sge/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sge {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file: " + p.string());
  return f;
}

void summary_row(std::ofstream& f, std::size_t n_steps, const std::string& stat,
                 const SummaryStat& s) {
  f << n_steps << ',' << csv_escape(stat) << ',' << format_g17(s.mean) << ','
    << format_g17(s.se) << ',' << format_g17(s.lo95) << ','
    << format_g17(s.hi95) << ',' << s.n << '\n';
}

void summary_scalar(std::ofstream& f, std::size_t n_steps,
                    const std::string& stat, double value) {
  f << n_steps << ',' << csv_escape(stat) << ',' << format_g17(value) << ','
    << format_g17(0.0) << ',' << format_g17(value) << ',' << format_g17(value)
    << ",1\n";
}

std::vector<double> column(const std::vector<PathStats>& rows,
                           double PathStats::* field) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.*field);
  return v;
}

}  // namespace

void write_outputs(const ExperimentResult& res, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const unsigned j_max = res.cfg.j_max;
  std::vector<std::string> fnames;
  for (const auto& fspec : res.cfg.functionals)
    fnames.push_back(functional_name(fspec));

  for (const auto& rung : res.rungs) {
    auto f = open_out(dir / ("paths_N" + std::to_string(rung.n_steps) + ".csv"));
    f << "path_id,N,l2H,l2V,linfH,ed_l2vdual,es_l2h,es_l2v,es_linfh";
    for (unsigned j = 1; j <= j_max; ++j) f << ",shift_j" << j;
    f << ",fracsob\n";
    for (std::size_t p = 0; p < rung.rows.size(); ++p) {
      const PathStats& r = rung.rows[p];
      f << p << ',' << rung.n_steps << ',' << format_g17(r.l2h) << ','
        << format_g17(r.l2v) << ',' << format_g17(r.linf_h) << ','
        << format_g17(r.ed_l2vdual) << ',' << format_g17(r.es_l2h) << ','
        << format_g17(r.es_l2v) << ',' << format_g17(r.es_linfh);
      for (unsigned j = 0; j < j_max; ++j)
        f << ',' << format_g17(j < r.shift.size() ? r.shift[j] : 0.0);
      f << ',' << format_g17(r.fracsob) << '\n';
    }
  }

  {
    auto f = open_out(dir / "summary.csv");
    f << "N,statistic,value,se,lo95,hi95,n\n";
    for (const auto& rung : res.rungs) {
      const std::size_t n = rung.n_steps;
      summary_row(f, n, "l2H", summarize(column(rung.rows, &PathStats::l2h)));
      summary_row(f, n, "l2V", summarize(column(rung.rows, &PathStats::l2v)));
      summary_row(f, n, "linfH", summarize(column(rung.rows, &PathStats::linf_h)));
      summary_row(f, n, "ed_l2vdual",
                  summarize(column(rung.rows, &PathStats::ed_l2vdual)));
      summary_row(f, n, "es_l2h", summarize(column(rung.rows, &PathStats::es_l2h)));
      summary_row(f, n, "es_l2v", summarize(column(rung.rows, &PathStats::es_l2v)));
      summary_row(f, n, "es_linfh",
                  summarize(column(rung.rows, &PathStats::es_linfh)));
      summary_row(f, n, "fracsob", summarize(column(rung.rows, &PathStats::fracsob)));
      for (unsigned j = 0; j < j_max; ++j) {
        std::vector<double> v;
        v.reserve(rung.rows.size());
        for (const auto& r : rung.rows)
          v.push_back(j < r.shift.size() ? r.shift[j] : 0.0);
        summary_row(f, n, "shift_j" + std::to_string(j + 1), summarize(v));
      }
      summary_row(f, n, "uniform_stat", summarize(rung.uniform_stat));
      summary_row(f, n, "gap_closed", summarize(rung.gap_closed));
      summary_row(f, n, "es_bounded", summarize(rung.es_bounded));
      summary_row(f, n, "min_summed_margin", summarize(rung.min_summed_margin));
      for (const auto& name : fnames)
        summary_row(f, n, "F_" + name, summarize(rung.functional_samples.at(name)));
      summary_scalar(f, n, "rejected_steps",
                     static_cast<double>(rung.rejected_steps));
      if (rung.bdg.checked) {
        summary_scalar(f, n, "bdg_lhs", rung.bdg.lhs_mean);
        summary_scalar(f, n, "bdg_rhs", rung.bdg.rhs_mean);
        summary_scalar(f, n, "bdg_ratio", rung.bdg.ratio);
      }
      summary_scalar(f, n, "sigma_tail_mean", rung.sigma_tail_mean);
    }
    for (const auto& ld : res.law) {
      summary_scalar(f, ld.fine, "ks_" + ld.functional + "_vs_N" +
                                     std::to_string(ld.coarse), ld.ks);
      summary_scalar(f, ld.fine, "w1_" + ld.functional + "_vs_N" +
                                     std::to_string(ld.coarse), ld.w1);
    }
  }

  {
    auto f = open_out(dir / "verdicts.txt");
    for (const auto& v : res.verdicts) {
      f << (v.pass ? "PASS" : "FAIL") << ' ' << v.id
        << " statistic=" << format_g17(v.statistic)
        << " threshold=" << format_g17(v.threshold) << " :: " << v.note << '\n';
    }
    f << (res.all_pass ? "ALL PASS" : "FAILURES PRESENT") << '\n';
  }
}

}  // namespace sge
