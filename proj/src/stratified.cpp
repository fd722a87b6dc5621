#include "rectify/stratified.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rectify {

EstimateReport stratified_ppi_mean(const StratifiedStudy& study,
                                   const EstimateOptions& opts) {
  const VarianceMode mode =
      opts.variance_mode.value_or(VarianceMode::DesignSrswor);
  require(mode == VarianceMode::DesignSrswor, Errc::WrongMode,
          "stratified estimation reports design variance only");

  double point = 0.0;
  double variance = 0.0;
  for (std::size_t h = 0; h < study.stratum_count(); ++h) {
    const Stratum& s = study.strata()[h];
    require(s.data.labeled_count() >= 1, Errc::NoLabels,
            "stratum '" + s.id + "' has no labeled units");
    const double w = study.weight(h);
    point += w * ppi_point(s.data);
    variance += w * w * variance_design(s.data, sample_moments(s.data));
  }

  EstimateReport r;
  r.point = point;
  r.variance = variance;
  r.std_error = std::sqrt(variance);
  std::tie(r.ci_low, r.ci_high) =
      confidence_interval(point, variance, opts.level);
  r.method = Method::Ppi;
  r.variance_mode = mode;
  r.lambda = 1.0;
  r.n = study.total_labeled();
  r.N = study.total_units();
  r.level = opts.level;
  return r;
}

namespace {

// Integer split of `total` proportional to `weights`: floor the shares, then
// hand out the leftover units by descending fractional remainder (ties to
// the lower index).
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights,
                                           std::size_t total) {
  const std::size_t H = weights.size();
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> alloc(H, 0);
  std::vector<double> remainder(H, 0.0);
  std::size_t assigned = 0;
  for (std::size_t h = 0; h < H; ++h) {
    const double raw = static_cast<double>(total) * weights[h] / wsum;
    const double fl = std::floor(raw);
    alloc[h] = static_cast<std::size_t>(fl);
    remainder[h] = raw - fl;
    assigned += alloc[h];
  }
  std::vector<std::size_t> order(H);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  std::size_t k = 0;
  while (assigned < total) {
    ++alloc[order[k % H]];
    ++assigned;
    ++k;
  }
  return alloc;
}

}  // namespace

AllocationPlan neyman_allocation(const std::vector<StratumDispersion>& strata,
                                 std::size_t budget,
                                 std::size_t min_per_stratum) {
  const std::size_t H = strata.size();
  require(H >= 1, Errc::InfeasibleBudget, "no strata to allocate over");
  std::size_t cap_sum = 0;
  for (const StratumDispersion& s : strata) {
    require(s.population >= 1, Errc::ConfigError, "empty stratum population");
    require(s.dispersion >= 0.0 && std::isfinite(s.dispersion),
            Errc::ConfigError, "dispersion must be a finite nonnegative value");
    require(s.population >= min_per_stratum, Errc::InfeasibleBudget,
            "stratum smaller than the per-stratum minimum");
    cap_sum += s.population;
  }
  require(budget >= H * min_per_stratum, Errc::InfeasibleBudget,
          "budget below the per-stratum minimum total");
  require(budget <= cap_sum, Errc::InfeasibleBudget,
          "budget exceeds the total population");

  AllocationPlan plan;
  plan.inputs = strata;
  plan.budget = budget;
  plan.min_per_stratum = min_per_stratum;

  std::vector<double> weights(H);
  double wsum = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    weights[h] = static_cast<double>(strata[h].population) * strata[h].dispersion;
    wsum += weights[h];
  }
  if (wsum == 0.0) {
    plan.proportional_fallback = true;
    for (std::size_t h = 0; h < H; ++h)
      weights[h] = static_cast<double>(strata[h].population);
  }

  // Allocate by largest remainder over the unfixed strata; pin any stratum
  // that lands outside [min, N_h] to its bound and re-split the rest.
  std::vector<std::size_t> alloc(H, 0);
  std::vector<bool> fixed(H, false);
  for (;;) {
    std::vector<std::size_t> free_idx;
    std::size_t fixed_total = 0;
    for (std::size_t h = 0; h < H; ++h) {
      if (fixed[h])
        fixed_total += alloc[h];
      else
        free_idx.push_back(h);
    }
    if (free_idx.empty()) break;
    const std::size_t remaining = budget - fixed_total;

    std::vector<double> free_weights(free_idx.size());
    double free_wsum = 0.0;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      free_weights[k] = weights[free_idx[k]];
      free_wsum += free_weights[k];
    }
    if (free_wsum == 0.0) {
      // Only zero-dispersion strata left; split what remains by size.
      for (std::size_t k = 0; k < free_idx.size(); ++k)
        free_weights[k] = static_cast<double>(strata[free_idx[k]].population);
    }

    const std::vector<std::size_t> split =
        largest_remainder(free_weights, remaining);
    bool violated = false;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      const std::size_t h = free_idx[k];
      alloc[h] = split[k];
      if (alloc[h] < min_per_stratum) {
        alloc[h] = min_per_stratum;
        fixed[h] = true;
        violated = true;
      } else if (alloc[h] > strata[h].population) {
        alloc[h] = strata[h].population;
        fixed[h] = true;
        violated = true;
      }
    }
    if (!violated) break;
  }

  // Pinning can leave the total off budget; settle the difference against
  // strata that still have slack, preferring heavier weights.
  std::size_t total = std::accumulate(alloc.begin(), alloc.end(), std::size_t{0});
  while (total != budget) {
    std::size_t best = H;
    for (std::size_t h = 0; h < H; ++h) {
      if (total < budget && alloc[h] < strata[h].population &&
          (best == H || weights[h] > weights[best]))
        best = h;
      if (total > budget && alloc[h] > min_per_stratum &&
          (best == H || weights[h] < weights[best]))
        best = h;
    }
    require(best != H, Errc::InfeasibleBudget,
            "cannot satisfy bounds at this budget");
    if (total < budget) {
      ++alloc[best];
      ++total;
    } else {
      --alloc[best];
      --total;
    }
  }

  plan.labels_per_stratum = std::move(alloc);
  return plan;
}

StratifiedStudy stratify_by_prediction_quantiles(const StudyData& data,
                                                 std::size_t bins) {
  require(data.pool_kind() == PoolKind::NestedCensus, Errc::WrongMode,
          "quantile stratification requires a nested pool");
  require(bins >= 1, Errc::ConfigError, "need at least one bin");
  const std::size_t N = data.pool_size();
  require(N >= bins, Errc::ConfigError, "fewer units than bins");

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.predictions()[a] < data.predictions()[b];
  });

  std::vector<Stratum> strata;
  strata.reserve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * N / bins;
    const std::size_t hi = (b + 1) * N / bins;
    std::vector<double> preds;
    std::vector<std::optional<double>> outs;
    std::size_t labeled = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = order[k];
      preds.push_back(data.predictions()[i]);
      outs.push_back(data.outcomes()[i]);
      labeled += data.labeled_mask()[i] ? 1 : 0;
    }
    const std::string id = "q" + std::to_string(b + 1);
    require(labeled >= 1, Errc::NoLabels,
            "stratum '" + id + "' has no labeled units");
    strata.push_back({id, StudyData::nested(std::move(preds), std::move(outs))});
  }
  return StratifiedStudy(std::move(strata));
}

}  // namespace rectify
