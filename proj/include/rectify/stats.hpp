#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rectify::stats {

double mean(std::span<const double> values);

/// Unbiased sample variance (divisor n-1). Requires n >= 2.
double sample_variance(std::span<const double> values);

/// Unbiased sample covariance (divisor n-1). Requires equal lengths, n >= 2.
double sample_covariance(std::span<const double> a, std::span<const double> b);

/// Standard normal quantile, Phi^{-1}(p) for p in (0,1).
double normal_quantile(double p);

/// Two-sample Kolmogorov-Smirnov statistic, sup_x |F_a(x) - F_b(x)|.
/// Inputs are copied and sorted internally.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace rectify::stats
