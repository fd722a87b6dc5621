#pragma once

#include <array>
#include <optional>
#include <string>

#include "rectify/study.hpp"

namespace rectify {

/// How the prediction-error correction is applied when estimating a
/// treatment effect from machine-scored outcomes.
enum class AteMethod {
  ArmwiseRectifier,   // separate correction per arm; unbiased
  PooledRectifier,    // one correction from all labeled data; biased by
                      // differential prediction error
  NaiveImputation,    // predictions substituted for unlabeled outcomes,
                      // no correction
};

const char* ate_method_name(AteMethod m) noexcept;
std::optional<AteMethod> ate_method_from_name(const std::string& s) noexcept;

struct AteReport {
  double tau_hat = 0.0;
  AteMethod method = AteMethod::ArmwiseRectifier;
  std::array<double, 2> per_arm_points{};
  std::array<double, 2> per_arm_delta_hat{};  // labeled mean residual by arm
  double variance = 0.0;
  double std_error = 0.0;
  /// True for methods whose systematic error is not reflected in the
  /// reported variance (pooled and naive).
  bool bias_unaccounted = false;
  std::array<std::size_t, 2> arm_labeled{};
  std::array<std::size_t, 2> arm_population{};
};

AteReport ate_estimate(const TwoArmStudy& study, AteMethod method);

/// Closed-form expectation error of each method given the arm mean
/// prediction errors delta_z and labeling fractions f_z.
double theoretical_bias(AteMethod method, double delta0, double delta1,
                        double f0, double f1);

}  // namespace rectify
