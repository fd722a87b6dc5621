#include "rectify/treatment.hpp"

#include <cmath>

#include "rectify/estimator.hpp"
#include "rectify/stats.hpp"

namespace rectify {

const char* ate_method_name(AteMethod m) noexcept {
  switch (m) {
    case AteMethod::ArmwiseRectifier: return "armwise";
    case AteMethod::PooledRectifier: return "pooled";
    case AteMethod::NaiveImputation: return "naive";
  }
  return "?";
}

std::optional<AteMethod> ate_method_from_name(const std::string& s) noexcept {
  if (s == "armwise") return AteMethod::ArmwiseRectifier;
  if (s == "pooled") return AteMethod::PooledRectifier;
  if (s == "naive") return AteMethod::NaiveImputation;
  return std::nullopt;
}

namespace {

double pooled_residual_mean(const TwoArmStudy& study) {
  const Residuals r0 = study.arm0.residuals();
  const Residuals r1 = study.arm1.residuals();
  double sum = 0.0;
  for (double e : r0.values) sum += e;
  for (double e : r1.values) sum += e;
  return sum / static_cast<double>(r0.values.size() + r1.values.size());
}

// Mean prediction over the unlabeled complement of an arm. Zero-weighted
// under full labeling, where the complement is empty.
double unlabeled_prediction_mean(const StudyData& arm) {
  const std::size_t m = arm.pool_size() - arm.labeled_count();
  if (m == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < arm.predictions().size(); ++i)
    if (!arm.labeled_mask()[i]) sum += arm.predictions()[i];
  return sum / static_cast<double>(m);
}

}  // namespace

AteReport ate_estimate(const TwoArmStudy& study, AteMethod method) {
  require(study.arm0.labeled_count() >= 1 && study.arm1.labeled_count() >= 1,
          Errc::NoLabels, "both arms need labeled units");

  AteReport report;
  report.method = method;
  report.arm_labeled = {study.arm0.labeled_count(), study.arm1.labeled_count()};
  report.arm_population = {study.arm0.pool_size(), study.arm1.pool_size()};
  report.per_arm_delta_hat = {study.arm0.residuals().mean,
                              study.arm1.residuals().mean};

  switch (method) {
    case AteMethod::ArmwiseRectifier:
      report.per_arm_points = {ppi_point(study.arm0), ppi_point(study.arm1)};
      report.bias_unaccounted = false;
      break;
    case AteMethod::PooledRectifier: {
      const double rectifier = pooled_residual_mean(study);
      report.per_arm_points = {
          study.arm0.pool_prediction_mean() + rectifier,
          study.arm1.pool_prediction_mean() + rectifier};
      report.bias_unaccounted = true;
      break;
    }
    case AteMethod::NaiveImputation: {
      for (int z = 0; z < 2; ++z) {
        const StudyData& arm = study.arm(z);
        const double f = arm.labeling_fraction();
        report.per_arm_points[z] =
            f * arm.labeled_outcome_mean() +
            (1.0 - f) * unlabeled_prediction_mean(arm);
      }
      report.bias_unaccounted = true;
      break;
    }
  }

  report.tau_hat = report.per_arm_points[1] - report.per_arm_points[0];

  // All methods report the armwise design plug-in; for pooled and naive the
  // bias_unaccounted flag marks that the systematic error is excluded.
  report.variance = variance_design(study.arm0, sample_moments(study.arm0)) +
                    variance_design(study.arm1, sample_moments(study.arm1));
  report.std_error = std::sqrt(report.variance);
  return report;
}

double theoretical_bias(AteMethod method, double delta0, double delta1,
                        double f0, double f1) {
  require(f0 > 0.0 && f0 <= 1.0 && f1 > 0.0 && f1 <= 1.0,
          Errc::InvalidFraction, "labeling fractions must lie in (0,1]");
  switch (method) {
    case AteMethod::ArmwiseRectifier:
      return 0.0;
    case AteMethod::PooledRectifier:
      return delta0 - delta1;
    case AteMethod::NaiveImputation:
      return (1.0 - f0) * delta0 - (1.0 - f1) * delta1;
  }
  return 0.0;
}

}  // namespace rectify
