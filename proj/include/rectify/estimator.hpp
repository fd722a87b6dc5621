#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rectify/study.hpp"

namespace rectify {

enum class Method { LabeledOnly, PredictionOnly, Ppi, PpiPlusPlus };

enum class VarianceMode { DesignSrswor, SuperpopIndependent, SuperpopNested };

const char* method_name(Method m) noexcept;
const char* variance_mode_name(VarianceMode m) noexcept;
std::optional<Method> method_from_name(const std::string& s) noexcept;
std::optional<VarianceMode> variance_mode_from_name(const std::string& s) noexcept;

/// Second moments of the labeled sample (divisor n-1 throughout), plus the
/// population residual variance (divisor N-1) when the study is a census.
struct MomentSummary {
  double sigma_e2 = 0.0;     // residual variance
  double sigma_yhat2 = 0.0;  // prediction variance
  double cov_y_yhat = 0.0;   // outcome-prediction covariance
  double var_y = 0.0;        // outcome variance
  std::optional<double> population_s_e2;  // only when every unit is labeled
  std::size_t n = 0;
  std::size_t N = 0;
};

MomentSummary sample_moments(const StudyData& data);

struct EstimateOptions {
  /// Defaults to DesignSrswor for nested pools, SuperpopIndependent for
  /// independent pools.
  std::optional<VarianceMode> variance_mode;
  double level = 0.95;
};

struct EstimateReport {
  double point = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Method method = Method::Ppi;
  VarianceMode variance_mode = VarianceMode::DesignSrswor;
  std::optional<double> lambda;
  std::size_t n = 0;
  std::size_t N = 0;
  double level = 0.95;
  std::vector<std::string> notes;
};

// Point estimators. These accept a single labeled unit; the report builders
// below additionally need n >= 2 for their variance terms.
double ppi_point(const StudyData& data);
double ppi_pp_point(const StudyData& data, double lambda);
double labeled_only_point(const StudyData& data);
double prediction_only_point(const StudyData& data);

/// Variance-minimizing weight on the predictions: the sample regression
/// slope of outcome on prediction over the labeled set. Unclipped.
double lambda_hat(const StudyData& data);
double lambda_hat(const MomentSummary& moments);

EstimateReport ppi_mean(const StudyData& data, const EstimateOptions& opts = {});
EstimateReport ppi_pp_mean(const StudyData& data,
                           std::optional<double> lambda = std::nullopt,
                           const EstimateOptions& opts = {});
EstimateReport labeled_only_mean(const StudyData& data,
                                 const EstimateOptions& opts = {});

/// SRSWOR design variance (1 - n/N) * sigma_e2 / n. Nested pools only.
double variance_design(const StudyData& data, const MomentSummary& moments);
double variance_design_formula(double residual_variance, std::size_t n,
                               std::size_t N);

/// Superpopulation variance; the formula follows the study's pool kind.
/// The nested form carries a -sigma_e2/N correction and is clamped at zero
/// (clamp reported through the optional flag).
double variance_superpop(const StudyData& data, const MomentSummary& moments,
                         bool* clamped_to_zero = nullptr);
double variance_superpop_independent(const MomentSummary& moments);
double variance_superpop_nested(const MomentSummary& moments,
                                bool* clamped_to_zero = nullptr);

/// Normal-approximation interval point +/- z_{(1+level)/2} * sqrt(variance).
std::pair<double, double> confidence_interval(double point, double variance,
                                              double level);

}  // namespace rectify
