#ifndef FLUCTLAB_STATS_HPP
#define FLUCTLAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fluctlab/rng.hpp"

namespace fl {

inline double mean(const std::vector<double> &xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double> &xs) {
  const double m = mean(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double residual_rms = 0;
};

inline LinearFit linear_fit(const std::vector<double> &xs,
                            const std::vector<double> &ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssres = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssres += r * r;
  }
  fit.r_squared = (syy > 0) ? 1.0 - ssres / syy : 1.0;
  fit.residual_rms = std::sqrt(ssres / n);
  return fit;
}

inline double pearson_correlation(const std::vector<double> &xs,
                                  const std::vector<double> &ys) {
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Lilliefors statistic: Kolmogorov distance between the empirical CDF and the
// normal fitted to the same sample.
inline double lilliefors_statistic(std::vector<double> xs) {
  const std::size_t n = xs.size();
  if (n < 4) throw std::invalid_argument("lilliefors: need >= 4 samples");
  const double m = mean(xs);
  double sd = std::sqrt(variance(xs));
  if (sd == 0) throw std::invalid_argument("lilliefors: degenerate sample");
  std::sort(xs.begin(), xs.end());
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf((xs[i] - m) / sd);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return d;
}

struct GaussianityResult {
  double statistic = 0;
  double critical_value = 0;
  bool pass = false;
};

// Distribution-free normality check: the critical value is resampled from
// pure-normal samples of the same size, with parameters re-fitted each time.
inline GaussianityResult gaussianity(const std::vector<double> &xs,
                                     double alpha = 0.01,
                                     int resamples = 400,
                                     std::uint64_t seed = 0x5eedf00dULL) {
  if (xs.size() < 100)
    throw std::invalid_argument("gaussianity: need >= 100 samples");
  GaussianityResult res;
  res.statistic = lilliefors_statistic(xs);
  std::vector<double> stats(resamples);
  Rng rng(derive_seed(seed, 17));
  std::vector<double> sample(xs.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto &s : sample) s = rng.gaussian();
    stats[r] = lilliefors_statistic(sample);
  }
  std::sort(stats.begin(), stats.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::min<double>(resamples - 1, std::ceil((1.0 - alpha) * resamples)));
  res.critical_value = stats[idx];
  res.pass = res.statistic <= res.critical_value;
  return res;
}

// percentile bootstrap for the mean of a sample
struct BootstrapCI {
  double estimate = 0;
  double lo = 0;
  double hi = 0;
};

inline BootstrapCI bootstrap_mean_ci(const std::vector<double> &xs,
                                     double level = 0.95, int resamples = 1000,
                                     std::uint64_t seed = 0xb007ULL) {
  BootstrapCI ci;
  ci.estimate = mean(xs);
  std::vector<double> ms(resamples);
  Rng rng(derive_seed(seed, 23));
  const std::size_t n = xs.size();
  for (int r = 0; r < resamples; ++r) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += xs[rng.uniform_index(n)];
    ms[r] = s / static_cast<double>(n);
  }
  std::sort(ms.begin(), ms.end());
  const double tail = (1.0 - level) / 2;
  ci.lo = ms[static_cast<std::size_t>(tail * resamples)];
  ci.hi = ms[static_cast<std::size_t>((1.0 - tail) * resamples) - 1];
  return ci;
}

}  // namespace fl

#endif
