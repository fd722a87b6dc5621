#include "rectify/estimator.hpp"

#include <cmath>

#include "rectify/stats.hpp"

// Mean estimation combining a labeled subsample with predictions over a
// pool. The same formulas go by different names in different communities:
// ppi_point is the classical difference estimator (prediction average plus
// the mean prediction error of the labeled units), and ppi_pp_point with the
// regression slope lambda_hat is the generalized regression (GREG)
// estimator. Both are kept as single implementations so the identities hold
// bit for bit.

namespace rectify {

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::LabeledOnly: return "labeled_only";
    case Method::PredictionOnly: return "prediction_only";
    case Method::Ppi: return "ppi";
    case Method::PpiPlusPlus: return "ppipp";
  }
  return "?";
}

const char* variance_mode_name(VarianceMode m) noexcept {
  switch (m) {
    case VarianceMode::DesignSrswor: return "design";
    case VarianceMode::SuperpopIndependent: return "superpop-indep";
    case VarianceMode::SuperpopNested: return "superpop-nested";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& s) noexcept {
  if (s == "labeled_only" || s == "labeled-only") return Method::LabeledOnly;
  if (s == "prediction_only" || s == "prediction-only")
    return Method::PredictionOnly;
  if (s == "ppi") return Method::Ppi;
  if (s == "ppipp") return Method::PpiPlusPlus;
  return std::nullopt;
}

std::optional<VarianceMode> variance_mode_from_name(
    const std::string& s) noexcept {
  if (s == "design") return VarianceMode::DesignSrswor;
  if (s == "superpop-indep") return VarianceMode::SuperpopIndependent;
  if (s == "superpop-nested") return VarianceMode::SuperpopNested;
  return std::nullopt;
}

MomentSummary sample_moments(const StudyData& data) {
  require(data.labeled_count() >= 2, Errc::DegenerateSample,
          "sample moments need at least 2 labeled units");
  const Residuals res = data.residuals();
  const std::vector<double> y = data.labeled_outcome_values();
  const std::vector<double> yhat = data.labeled_prediction_values();

  MomentSummary m;
  m.n = data.labeled_count();
  m.N = data.pool_size();
  m.sigma_e2 = stats::sample_variance(res.values);
  m.sigma_yhat2 = stats::sample_variance(yhat);
  m.cov_y_yhat = stats::sample_covariance(y, yhat);
  m.var_y = stats::sample_variance(y);

  if (data.pool_kind() == PoolKind::NestedCensus &&
      data.labeled_count() == data.pool_size()) {
    // Census: the labeled residual variance already has divisor N-1.
    m.population_s_e2 = m.sigma_e2;
  }
  return m;
}

double ppi_point(const StudyData& data) {
  require(data.labeled_count() >= 1, Errc::NoLabels,
          "estimator needs at least one labeled unit");
  return data.pool_prediction_mean() + data.residuals().mean;
}

double ppi_pp_point(const StudyData& data, double lambda) {
  require(data.labeled_count() >= 1, Errc::NoLabels,
          "estimator needs at least one labeled unit");
  return data.labeled_outcome_mean() +
         lambda * (data.pool_prediction_mean() - data.labeled_prediction_mean());
}

double labeled_only_point(const StudyData& data) {
  require(data.labeled_count() >= 1, Errc::NoLabels,
          "estimator needs at least one labeled unit");
  return data.labeled_outcome_mean();
}

double prediction_only_point(const StudyData& data) {
  return data.pool_prediction_mean();
}

double lambda_hat(const MomentSummary& moments) {
  require(moments.sigma_yhat2 > 0.0, Errc::ConstantPredictions,
          "labeled predictions are constant; lambda is undefined");
  return moments.cov_y_yhat / moments.sigma_yhat2;
}

double lambda_hat(const StudyData& data) {
  return lambda_hat(sample_moments(data));
}

double variance_design_formula(double residual_variance, std::size_t n,
                               std::size_t N) {
  const double nn = static_cast<double>(n);
  const double NN = static_cast<double>(N);
  return (1.0 - nn / NN) * residual_variance / nn;
}

double variance_design(const StudyData& data, const MomentSummary& moments) {
  require(data.pool_kind() == PoolKind::NestedCensus, Errc::WrongMode,
          "design variance requires a nested pool");
  require(moments.n >= 2, Errc::DegenerateSample,
          "design variance needs at least 2 labeled units");
  return variance_design_formula(moments.sigma_e2, moments.n, moments.N);
}

double variance_superpop_independent(const MomentSummary& moments) {
  return moments.sigma_e2 / static_cast<double>(moments.n) +
         moments.sigma_yhat2 / static_cast<double>(moments.N);
}

double variance_superpop_nested(const MomentSummary& moments,
                                bool* clamped_to_zero) {
  const double v = variance_superpop_independent(moments) -
                   moments.sigma_e2 / static_cast<double>(moments.N);
  if (clamped_to_zero) *clamped_to_zero = v < 0.0;
  return v < 0.0 ? 0.0 : v;
}

double variance_superpop(const StudyData& data, const MomentSummary& moments,
                         bool* clamped_to_zero) {
  require(moments.n >= 2, Errc::DegenerateSample,
          "superpopulation variance needs at least 2 labeled units");
  if (clamped_to_zero) *clamped_to_zero = false;
  return data.pool_kind() == PoolKind::NestedCensus
             ? variance_superpop_nested(moments, clamped_to_zero)
             : variance_superpop_independent(moments);
}

std::pair<double, double> confidence_interval(double point, double variance,
                                              double level) {
  require(level > 0.0 && level < 1.0, Errc::InvalidLevel,
          "confidence level must lie in (0,1)");
  require(variance >= 0.0, Errc::InvalidStudy, "negative variance");
  const double z = stats::normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(variance);
  return {point - half, point + half};
}

namespace {

// Sample variance of the combined values y_i - lambda * yhat_i over the
// labeled units. At lambda = 1 this is exactly the residual variance.
double combined_residual_variance(const StudyData& data, double lambda) {
  const std::vector<double> y = data.labeled_outcome_values();
  const std::vector<double> yhat = data.labeled_prediction_values();
  std::vector<double> combined(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    combined[i] = y[i] - lambda * yhat[i];
  return stats::sample_variance(combined);
}

VarianceMode resolve_mode(const StudyData& data, const EstimateOptions& opts) {
  if (opts.variance_mode) return *opts.variance_mode;
  return data.pool_kind() == PoolKind::NestedCensus
             ? VarianceMode::DesignSrswor
             : VarianceMode::SuperpopIndependent;
}

void check_mode(const StudyData& data, VarianceMode mode) {
  if (data.pool_kind() == PoolKind::IndependentSample) {
    require(mode == VarianceMode::SuperpopIndependent, Errc::WrongMode,
            "independent pools support only superpop-indep variance");
  }
}

EstimateReport finish_report(double point, double variance, Method method,
                             VarianceMode mode, std::optional<double> lambda,
                             const StudyData& data,
                             const EstimateOptions& opts,
                             std::vector<std::string> notes) {
  EstimateReport r;
  r.point = point;
  r.variance = variance;
  r.std_error = std::sqrt(variance);
  std::tie(r.ci_low, r.ci_high) = confidence_interval(point, variance, opts.level);
  r.method = method;
  r.variance_mode = mode;
  r.lambda = lambda;
  r.n = data.labeled_count();
  r.N = data.pool_size();
  r.level = opts.level;
  r.notes = std::move(notes);
  return r;
}

}  // namespace

EstimateReport ppi_mean(const StudyData& data, const EstimateOptions& opts) {
  const VarianceMode mode = resolve_mode(data, opts);
  check_mode(data, mode);
  const double point = ppi_point(data);
  const MomentSummary m = sample_moments(data);
  std::vector<std::string> notes;
  bool clamped = false;
  double variance = 0.0;
  switch (mode) {
    case VarianceMode::DesignSrswor:
      variance = variance_design(data, m);
      break;
    case VarianceMode::SuperpopIndependent:
      variance = variance_superpop_independent(m);
      break;
    case VarianceMode::SuperpopNested:
      require(data.pool_kind() == PoolKind::NestedCensus, Errc::WrongMode,
              "nested variance requires a nested pool");
      variance = variance_superpop_nested(m, &clamped);
      break;
  }
  if (clamped) notes.push_back("nested_variance_clamped");
  return finish_report(point, variance, Method::Ppi, mode, 1.0, data, opts,
                       std::move(notes));
}

EstimateReport ppi_pp_mean(const StudyData& data, std::optional<double> lambda,
                           const EstimateOptions& opts) {
  const VarianceMode mode = resolve_mode(data, opts);
  check_mode(data, mode);
  const MomentSummary m = sample_moments(data);
  std::vector<std::string> notes;
  double lam;
  if (lambda) {
    lam = *lambda;
  } else {
    lam = lambda_hat(m);
    notes.push_back("lambda_estimated_treated_as_fixed");
  }
  const double point = ppi_pp_point(data, lam);

  // Plug-in variance at fixed lambda; an extension of the lambda = 1
  // formulas, flagged as such in the report notes.
  const double comb_var = combined_residual_variance(data, lam);
  const double nn = static_cast<double>(m.n);
  const double NN = static_cast<double>(m.N);
  bool clamped = false;
  double variance = 0.0;
  switch (mode) {
    case VarianceMode::DesignSrswor:
      variance = (1.0 - nn / NN) * comb_var / nn;
      break;
    case VarianceMode::SuperpopIndependent:
      variance = comb_var / nn + lam * lam * m.sigma_yhat2 / NN;
      break;
    case VarianceMode::SuperpopNested: {
      require(data.pool_kind() == PoolKind::NestedCensus, Errc::WrongMode,
              "nested variance requires a nested pool");
      const double v =
          comb_var / nn + lam * lam * m.sigma_yhat2 / NN - comb_var / NN;
      clamped = v < 0.0;
      variance = clamped ? 0.0 : v;
      break;
    }
  }
  notes.push_back("ppipp_variance_plugin");
  if (clamped) notes.push_back("nested_variance_clamped");
  return finish_report(point, variance, Method::PpiPlusPlus, mode, lam, data,
                       opts, std::move(notes));
}

EstimateReport labeled_only_mean(const StudyData& data,
                                 const EstimateOptions& opts) {
  const VarianceMode mode = resolve_mode(data, opts);
  check_mode(data, mode);
  const double point = labeled_only_point(data);
  const MomentSummary m = sample_moments(data);
  const double nn = static_cast<double>(m.n);
  const double NN = static_cast<double>(m.N);
  // The pool plays no role here; both superpopulation forms reduce to
  // var_y / n.
  const double variance = mode == VarianceMode::DesignSrswor
                              ? (1.0 - nn / NN) * m.var_y / nn
                              : m.var_y / nn;
  return finish_report(point, variance, Method::LabeledOnly, mode, 0.0, data,
                       opts, {});
}

}  // namespace rectify
