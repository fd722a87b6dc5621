#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "rectify/study.hpp"

namespace testutil {

// |a - b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Advances idx to the next k-combination of {0..n-1}; false when exhausted.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

struct Population {
  std::vector<double> y;
  std::vector<double> yhat;

  double mean_y() const {
    return std::accumulate(y.begin(), y.end(), 0.0) /
           static_cast<double>(y.size());
  }

  // Finite-population residual variance, divisor N-1.
  double residual_variance() const {
    const std::size_t N = y.size();
    std::vector<double> e(N);
    for (std::size_t i = 0; i < N; ++i) e[i] = y[i] - yhat[i];
    const double m =
        std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(N);
    double ss = 0.0;
    for (double v : e) ss += (v - m) * (v - m);
    return ss / static_cast<double>(N - 1);
  }
};

inline Population d1_population() {
  return {{1.0, 2.0, 3.0, 4.0}, {2.0, 1.0, 4.0, 3.0}};
}

// D1 with units 0 and 1 labeled.
inline rectify::StudyData d1_study() {
  const Population pop = d1_population();
  return rectify::StudyData::nested_with_labels(pop.yhat, {0, 1},
                                                {pop.y[0], pop.y[1]});
}

inline rectify::StudyData subset_study(const Population& pop,
                                       const std::vector<std::size_t>& labeled) {
  std::vector<double> outcomes(labeled.size());
  for (std::size_t k = 0; k < labeled.size(); ++k)
    outcomes[k] = pop.y[labeled[k]];
  return rectify::StudyData::nested_with_labels(pop.yhat, labeled, outcomes);
}

// Mean and population variance (divisor = count) of f over all C(N,n)
// labeled subsets of pop.
template <typename F>
std::pair<double, double> enumerate_subsets(const Population& pop,
                                            std::size_t n, F&& estimate) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> values;
  do {
    values.push_back(estimate(subset_study(pop, idx)));
  } while (next_combination(idx, pop.y.size()));
  const double m = std::accumulate(values.begin(), values.end(), 0.0) /
                   static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return {m, ss / static_cast<double>(values.size())};
}

// Random nested study with continuous outcomes/predictions (so labeled
// predictions are almost surely non-constant) and 2 <= n <= N labeled units.
inline rectify::StudyData random_study(std::mt19937_64& gen,
                                       std::size_t max_units = 200) {
  std::uniform_int_distribution<std::size_t> size_dist(3, max_units);
  const std::size_t N = size_dist(gen);
  std::uniform_int_distribution<std::size_t> label_dist(2, N);
  const std::size_t n = label_dist(gen);

  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> slope(-2.0, 2.0);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  const double a = slope(gen);
  const double b = shift(gen);

  std::vector<double> y(N), yhat(N);
  for (std::size_t i = 0; i < N; ++i) {
    y[i] = shift(gen) + noise(gen);
    yhat[i] = a * y[i] + b + 0.5 * noise(gen);
  }

  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), gen);
  idx.resize(n);
  std::vector<double> labeled(n);
  for (std::size_t k = 0; k < n; ++k) labeled[k] = y[idx[k]];
  return rectify::StudyData::nested_with_labels(yhat, idx, labeled);
}

}  // namespace testutil
