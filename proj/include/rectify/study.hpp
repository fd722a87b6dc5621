#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rectify/error.hpp"

namespace rectify {

/// Relationship between the labeled units and the prediction pool.
/// NestedCensus: the labeled set is a subsample of the pool; predictions
/// cover the whole finite population of interest.
/// IndependentSample: the labeled pairs were drawn separately from the pool
/// and are stored as a block appended after the pool units.
enum class PoolKind { NestedCensus, IndependentSample };

/// Prediction errors e_i = y_i - yhat_i over the labeled units, in labeled
/// storage order.
struct Residuals {
  std::vector<double> values;
  double mean = 0.0;
  double sample_variance = 0.0;  // divisor n-1; NaN when n < 2
};

/// A study frame: predictions for every stored unit, outcomes for the
/// labeled subset. All estimators consume this type.
class StudyData {
 public:
  /// Nested study: one row per population unit, outcome present iff labeled.
  static StudyData nested(std::vector<double> predictions,
                          std::vector<std::optional<double>> outcomes);

  /// Nested study with every unit labeled (census).
  static StudyData fully_labeled(std::vector<double> outcomes,
                                 std::vector<double> predictions);

  /// Nested study built from a full prediction vector plus the labeled
  /// subset given as (index, outcome) pairs.
  static StudyData nested_with_labels(std::vector<double> predictions,
                                      const std::vector<std::size_t>& labeled_indices,
                                      const std::vector<double>& labeled_outcomes);

  /// Disjoint pool and labeled sample; the labeled block is appended after
  /// the pool predictions.
  static StudyData independent(std::vector<double> pool_predictions,
                               std::vector<double> labeled_outcomes,
                               std::vector<double> labeled_predictions);

  PoolKind pool_kind() const noexcept { return pool_kind_; }

  /// Number of stored rows (pool plus appended labeled block when disjoint).
  std::size_t unit_count() const noexcept { return predictions_.size(); }

  /// n: number of labeled units.
  std::size_t labeled_count() const noexcept { return labeled_count_; }

  /// N: size of the prediction pool. For nested studies this is every unit;
  /// for independent studies the appended labeled block is excluded.
  std::size_t pool_size() const noexcept;

  double labeling_fraction() const noexcept {
    return static_cast<double>(labeled_count_) /
           static_cast<double>(pool_size());
  }

  const std::vector<double>& predictions() const noexcept { return predictions_; }
  const std::vector<std::optional<double>>& outcomes() const noexcept { return outcomes_; }
  const std::vector<bool>& labeled_mask() const noexcept { return labeled_mask_; }

  std::vector<std::size_t> labeled_indices() const;
  std::vector<double> labeled_outcome_values() const;
  std::vector<double> labeled_prediction_values() const;

  double pool_prediction_mean() const;
  double labeled_outcome_mean() const;
  double labeled_prediction_mean() const;

  Residuals residuals() const;

 private:
  StudyData(PoolKind kind, std::vector<double> predictions,
            std::vector<std::optional<double>> outcomes,
            std::vector<bool> labeled_mask);

  void validate() const;

  PoolKind pool_kind_;
  std::vector<double> predictions_;
  std::vector<std::optional<double>> outcomes_;
  std::vector<bool> labeled_mask_;
  std::size_t labeled_count_ = 0;
};

/// A randomized two-arm experiment; each arm is a nested study with its own
/// labeling fraction.
struct TwoArmStudy {
  StudyData arm0;
  StudyData arm1;

  TwoArmStudy(StudyData a0, StudyData a1);

  const StudyData& arm(int z) const { return z == 0 ? arm0 : arm1; }
  double labeling_fraction(int z) const { return arm(z).labeling_fraction(); }
};

struct Stratum {
  std::string id;
  StudyData data;
};

/// Nested studies partitioned by stratum; weights are N_h / N.
class StratifiedStudy {
 public:
  explicit StratifiedStudy(std::vector<Stratum> strata);

  const std::vector<Stratum>& strata() const noexcept { return strata_; }
  std::size_t stratum_count() const noexcept { return strata_.size(); }
  std::size_t total_units() const noexcept { return total_units_; }
  std::size_t total_labeled() const noexcept { return total_labeled_; }

  double weight(std::size_t h) const {
    return static_cast<double>(strata_[h].data.pool_size()) /
           static_cast<double>(total_units_);
  }

 private:
  std::vector<Stratum> strata_;
  std::size_t total_units_ = 0;
  std::size_t total_labeled_ = 0;
};

}  // namespace rectify
