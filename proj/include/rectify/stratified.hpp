#pragma once

#include <cstddef>
#include <vector>

#include "rectify/estimator.hpp"
#include "rectify/study.hpp"

namespace rectify {

/// Stratum-weighted combined estimate: point = sum_h W_h * ppi_point(h),
/// variance = sum_h W_h^2 * design variance(h). Design-based only.
EstimateReport stratified_ppi_mean(const StratifiedStudy& study,
                                   const EstimateOptions& opts = {});

struct StratumDispersion {
  std::size_t population = 0;  // N_h
  double dispersion = 0.0;     // s_h, residual standard deviation
};

struct AllocationPlan {
  std::vector<std::size_t> labels_per_stratum;  // n_h, sums to budget
  std::vector<StratumDispersion> inputs;
  std::size_t budget = 0;
  std::size_t min_per_stratum = 2;
  /// True when every dispersion was zero and the split fell back to
  /// proportional-to-population.
  bool proportional_fallback = false;
};

/// Splits a labeling budget across strata proportionally to N_h * s_h
/// (largest-remainder rounding), then repairs the result to satisfy
/// min_per_stratum <= n_h <= N_h while keeping the total fixed.
AllocationPlan neyman_allocation(const std::vector<StratumDispersion>& strata,
                                 std::size_t budget,
                                 std::size_t min_per_stratum = 2);

/// Convenience stratifier: K equal-frequency bins of the pool predictions.
StratifiedStudy stratify_by_prediction_quantiles(const StudyData& data,
                                                 std::size_t bins = 4);

}  // namespace rectify
