#pragma once

#include <cstddef>
#include <vector>

namespace sge {

struct SummaryStat {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

SummaryStat summarize(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// 1-Wasserstein distance via the quantile coupling; exact for the empirical
// measures, sample sizes may differ.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// 95% fluctuation scale of the two-sample KS statistic.
double ks_tolerance(std::size_t na, std::size_t nb);

// Upper 95% confidence bound on mean(fine)/mean(coarse); infinity when the
// coarse lower bound is not positive.
double decay_ratio_upper(const SummaryStat& coarse, const SummaryStat& fine);

}  // namespace sge
