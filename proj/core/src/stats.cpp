#include "sge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sge {

SummaryStat summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
  SummaryStat s;
  s.n = xs.size();
  double acc = 0.0;
  for (const double x : xs) acc += x;
  s.mean = acc / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (const double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(s.n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  s.lo95 = s.mean - 1.96 * s.se;
  s.hi95 = s.mean + 1.96 * s.se;
  return s;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  std::size_t i = 0, j = 0;
  double u = 0.0;
  double acc = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next_a = static_cast<double>(i + 1) / na;
    const double next_b = static_cast<double>(j + 1) / nb;
    const double next = std::min(next_a, next_b);
    acc += (next - u) * std::abs(a[i] - b[j]);
    u = next;
    if (next_a <= next) ++i;
    if (next_b <= next) ++j;
  }
  return acc;
}

double ks_tolerance(std::size_t na, std::size_t nb) {
  const double fa = static_cast<double>(na);
  const double fb = static_cast<double>(nb);
  return 1.36 * std::sqrt((fa + fb) / (fa * fb));
}

double decay_ratio_upper(const SummaryStat& coarse, const SummaryStat& fine) {
  const double denom = coarse.lo95;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return fine.hi95 / denom;
}

}  // namespace sge
