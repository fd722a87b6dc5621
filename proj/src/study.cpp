#include "rectify/study.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "rectify/stats.hpp"

namespace rectify {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

StudyData::StudyData(PoolKind kind, std::vector<double> predictions,
                     std::vector<std::optional<double>> outcomes,
                     std::vector<bool> labeled_mask)
    : pool_kind_(kind),
      predictions_(std::move(predictions)),
      outcomes_(std::move(outcomes)),
      labeled_mask_(std::move(labeled_mask)) {
  for (bool b : labeled_mask_) labeled_count_ += b ? 1 : 0;
  validate();
}

void StudyData::validate() const {
  const std::size_t total = predictions_.size();
  require(total > 0, Errc::InvalidStudy, "study has no units");
  require(outcomes_.size() == total && labeled_mask_.size() == total,
          Errc::InvalidStudy, "study columns differ in length");
  require(all_finite(predictions_), Errc::InvalidStudy,
          "non-finite prediction");
  for (std::size_t i = 0; i < total; ++i) {
    require(outcomes_[i].has_value() == static_cast<bool>(labeled_mask_[i]),
            Errc::InvalidStudy, "outcome presence must match the labeled mask");
    if (outcomes_[i])
      require(std::isfinite(*outcomes_[i]), Errc::InvalidStudy,
              "non-finite outcome");
  }
  require(labeled_count_ >= 1, Errc::NoLabels, "study has no labeled units");
  if (pool_kind_ == PoolKind::IndependentSample) {
    // Appended-block layout: the labeled units are exactly the trailing rows.
    const std::size_t pool = total - labeled_count_;
    require(pool >= 1, Errc::InvalidStudy, "independent study has empty pool");
    for (std::size_t i = 0; i < total; ++i)
      require(static_cast<bool>(labeled_mask_[i]) == (i >= pool),
              Errc::InvalidStudy,
              "independent study must store labeled pairs as a trailing block");
  }
  require(labeled_count_ <= pool_size(), Errc::InvalidStudy,
          "more labeled units than pool units");
}

StudyData StudyData::nested(std::vector<double> predictions,
                            std::vector<std::optional<double>> outcomes) {
  std::vector<bool> mask(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    mask[i] = outcomes[i].has_value();
  return StudyData(PoolKind::NestedCensus, std::move(predictions),
                   std::move(outcomes), std::move(mask));
}

StudyData StudyData::fully_labeled(std::vector<double> outcomes,
                                   std::vector<double> predictions) {
  std::vector<std::optional<double>> opt(outcomes.begin(), outcomes.end());
  return nested(std::move(predictions), std::move(opt));
}

StudyData StudyData::nested_with_labels(
    std::vector<double> predictions,
    const std::vector<std::size_t>& labeled_indices,
    const std::vector<double>& labeled_outcomes) {
  require(labeled_indices.size() == labeled_outcomes.size(), Errc::InvalidStudy,
          "labeled index/outcome lengths differ");
  std::vector<std::optional<double>> outcomes(predictions.size());
  for (std::size_t k = 0; k < labeled_indices.size(); ++k) {
    const std::size_t i = labeled_indices[k];
    require(i < predictions.size(), Errc::InvalidStudy,
            "labeled index out of range");
    require(!outcomes[i].has_value(), Errc::InvalidStudy,
            "duplicate labeled index");
    outcomes[i] = labeled_outcomes[k];
  }
  return nested(std::move(predictions), std::move(outcomes));
}

StudyData StudyData::independent(std::vector<double> pool_predictions,
                                 std::vector<double> labeled_outcomes,
                                 std::vector<double> labeled_predictions) {
  require(labeled_outcomes.size() == labeled_predictions.size(),
          Errc::InvalidStudy, "labeled outcome/prediction lengths differ");
  const std::size_t pool = pool_predictions.size();
  const std::size_t n = labeled_outcomes.size();
  std::vector<double> predictions = std::move(pool_predictions);
  predictions.insert(predictions.end(), labeled_predictions.begin(),
                     labeled_predictions.end());
  std::vector<std::optional<double>> outcomes(pool + n);
  std::vector<bool> mask(pool + n, false);
  for (std::size_t k = 0; k < n; ++k) {
    outcomes[pool + k] = labeled_outcomes[k];
    mask[pool + k] = true;
  }
  return StudyData(PoolKind::IndependentSample, std::move(predictions),
                   std::move(outcomes), std::move(mask));
}

std::size_t StudyData::pool_size() const noexcept {
  return pool_kind_ == PoolKind::NestedCensus
             ? predictions_.size()
             : predictions_.size() - labeled_count_;
}

std::vector<std::size_t> StudyData::labeled_indices() const {
  std::vector<std::size_t> out;
  out.reserve(labeled_count_);
  for (std::size_t i = 0; i < labeled_mask_.size(); ++i)
    if (labeled_mask_[i]) out.push_back(i);
  return out;
}

std::vector<double> StudyData::labeled_outcome_values() const {
  std::vector<double> out;
  out.reserve(labeled_count_);
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (labeled_mask_[i]) out.push_back(*outcomes_[i]);
  return out;
}

std::vector<double> StudyData::labeled_prediction_values() const {
  std::vector<double> out;
  out.reserve(labeled_count_);
  for (std::size_t i = 0; i < predictions_.size(); ++i)
    if (labeled_mask_[i]) out.push_back(predictions_[i]);
  return out;
}

double StudyData::pool_prediction_mean() const {
  const std::size_t limit = pool_kind_ == PoolKind::NestedCensus
                                ? predictions_.size()
                                : pool_size();
  double sum = 0.0;
  for (std::size_t i = 0; i < limit; ++i) sum += predictions_[i];
  return sum / static_cast<double>(limit);
}

double StudyData::labeled_outcome_mean() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (labeled_mask_[i]) sum += *outcomes_[i];
  return sum / static_cast<double>(labeled_count_);
}

double StudyData::labeled_prediction_mean() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions_.size(); ++i)
    if (labeled_mask_[i]) sum += predictions_[i];
  return sum / static_cast<double>(labeled_count_);
}

Residuals StudyData::residuals() const {
  Residuals r;
  r.values.reserve(labeled_count_);
  for (std::size_t i = 0; i < predictions_.size(); ++i)
    if (labeled_mask_[i]) r.values.push_back(*outcomes_[i] - predictions_[i]);
  r.mean = stats::mean(r.values);
  r.sample_variance = r.values.size() >= 2
                          ? stats::sample_variance(r.values)
                          : std::numeric_limits<double>::quiet_NaN();
  return r;
}

TwoArmStudy::TwoArmStudy(StudyData a0, StudyData a1)
    : arm0(std::move(a0)), arm1(std::move(a1)) {
  require(arm0.pool_kind() == PoolKind::NestedCensus &&
              arm1.pool_kind() == PoolKind::NestedCensus,
          Errc::WrongMode, "two-arm studies require nested pools");
}

StratifiedStudy::StratifiedStudy(std::vector<Stratum> strata)
    : strata_(std::move(strata)) {
  require(!strata_.empty(), Errc::InvalidStudy, "no strata");
  std::set<std::string> seen;
  for (const Stratum& s : strata_) {
    require(s.data.pool_kind() == PoolKind::NestedCensus, Errc::WrongMode,
            "stratified studies require nested pools");
    require(seen.insert(s.id).second, Errc::InvalidStudy,
            "duplicate stratum id '" + s.id + "'");
    total_units_ += s.data.pool_size();
    total_labeled_ += s.data.labeled_count();
  }
}

}  // namespace rectify
