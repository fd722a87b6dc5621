#include "rectify/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <boost/math/distributions/normal.hpp>

#include "rectify/error.hpp"

namespace rectify::stats {

double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  require(n >= 2, Errc::DegenerateSample,
          "sample variance needs at least 2 observations");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - m;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), Errc::InvalidStudy,
          "covariance inputs differ in length");
  const std::size_t n = a.size();
  require(n >= 2, Errc::DegenerateSample,
          "sample covariance needs at least 2 observations");
  const double ma = mean(a);
  const double mb = mean(b);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (a[i] - ma) * (b[i] - mb);
  return ss / static_cast<double>(n - 1);
}

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, Errc::InvalidLevel,
          "normal quantile defined on (0,1)");
  static const boost::math::normal_distribution<double> unit{};
  return boost::math::quantile(unit, p);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), Errc::DegenerateSample,
          "KS statistic needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace rectify::stats
