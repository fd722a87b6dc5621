#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rectify/study.hpp"
#include "rectify/treatment.hpp"

namespace rectify {

/// Variance ratio of the combined estimator to the labeled-only mean:
/// residual variance over outcome variance, both from the labeled sample
/// (the finite-population correction cancels). Below 1 means the
/// predictions help.
double design_effect(const StudyData& data);

struct SubgroupRow {
  std::string group_id;
  double mean_residual = 0.0;
  std::optional<double> sd_residual;  // needs >= 2 labeled units
  std::size_t n = 0;
};

struct SubgroupPair {
  std::string group_a;
  std::string group_b;
  double z = 0.0;
  bool flagged = false;
};

struct SubgroupReport {
  std::vector<SubgroupRow> rows;     // sorted by group id
  std::vector<SubgroupPair> pairs;   // all unordered pairs, row order
  double z_threshold = 2.0;
};

/// Per-group residual summaries plus pairwise difference-of-means z
/// statistics (pooled variance, floored at 1e-12 for degenerate groups).
/// `groups` assigns a group id to every stored unit; labeled units must
/// have one.
SubgroupReport residual_subgroup_report(const StudyData& data,
                                        const std::vector<std::string>& groups,
                                        double z_threshold = 2.0);

/// Two-sample KS statistic between the labeled-set predictions and the full
/// pool predictions. Zero when the labeled set is the whole pool.
double exchangeability_check(const StudyData& data);

struct NegativeControlResult {
  double tau_hat = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool flagged = false;
};

/// Armwise treatment-effect estimate on an outcome where no effect is
/// expected; a large |z| points at non-exchangeable prediction errors.
NegativeControlResult negative_control_check(const TwoArmStudy& study,
                                             double z_threshold = 2.0);

enum class DiagnosticFlag {
  SubgroupResidualDivergence,
  LabeledPoolMismatch,
  NegativeControlNonzero,
  PredictionsNotHelping,
};

const char* diagnostic_flag_name(DiagnosticFlag f) noexcept;

struct DiagnosticThresholds {
  double ks = 0.2;
  double subgroup_z = 2.0;
  double negative_control_z = 2.0;
};

struct DiagnosticReport {
  double design_effect = 0.0;
  SubgroupReport subgroups;
  double exchangeability_stat = 0.0;
  std::optional<NegativeControlResult> negative_control;
  std::vector<DiagnosticFlag> flags;
  DiagnosticThresholds thresholds;
};

/// Bundles the individual checks. `arms` adds the negative-control entry
/// when present; `groups` drives the residual table (one id per unit).
DiagnosticReport run_diagnostics(const StudyData& data,
                                 const std::vector<std::string>& groups,
                                 const std::optional<TwoArmStudy>& arms,
                                 const DiagnosticThresholds& thresholds = {});

}  // namespace rectify
