#include "rectify/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rectify/estimator.hpp"
#include "rectify/stats.hpp"

namespace rectify {

const char* diagnostic_flag_name(DiagnosticFlag f) noexcept {
  switch (f) {
    case DiagnosticFlag::SubgroupResidualDivergence:
      return "subgroup_residual_divergence";
    case DiagnosticFlag::LabeledPoolMismatch:
      return "labeled_pool_mismatch";
    case DiagnosticFlag::NegativeControlNonzero:
      return "negative_control_nonzero";
    case DiagnosticFlag::PredictionsNotHelping:
      return "predictions_not_helping";
  }
  return "?";
}

double design_effect(const StudyData& data) {
  const MomentSummary m = sample_moments(data);
  require(m.var_y > 0.0, Errc::ZeroOutcomeVariance,
          "labeled outcomes are constant");
  return m.sigma_e2 / m.var_y;
}

SubgroupReport residual_subgroup_report(const StudyData& data,
                                        const std::vector<std::string>& groups,
                                        double z_threshold) {
  require(groups.size() == data.unit_count(), Errc::InvalidGrouping,
          "one group id required per unit");

  std::map<std::string, std::vector<double>> by_group;
  for (std::size_t i = 0; i < data.unit_count(); ++i) {
    if (!data.labeled_mask()[i]) continue;
    require(!groups[i].empty(), Errc::InvalidGrouping,
            "labeled unit " + std::to_string(i) + " has no group id");
    by_group[groups[i]].push_back(*data.outcomes()[i] - data.predictions()[i]);
  }

  SubgroupReport report;
  report.z_threshold = z_threshold;
  for (const auto& [id, values] : by_group) {
    SubgroupRow row;
    row.group_id = id;
    row.n = values.size();
    row.mean_residual = stats::mean(values);
    if (values.size() >= 2)
      row.sd_residual = std::sqrt(stats::sample_variance(values));
    report.rows.push_back(std::move(row));
  }

  constexpr double kVarianceFloor = 1e-12;
  const auto& rows = report.rows;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      const std::vector<double>& va = by_group.at(rows[a].group_id);
      const std::vector<double>& vb = by_group.at(rows[b].group_id);
      const double na = static_cast<double>(va.size());
      const double nb = static_cast<double>(vb.size());
      double ssq = 0.0;
      if (va.size() >= 2) ssq += (na - 1.0) * stats::sample_variance(va);
      if (vb.size() >= 2) ssq += (nb - 1.0) * stats::sample_variance(vb);
      const double df = std::max(1.0, na + nb - 2.0);
      const double pooled = std::max(kVarianceFloor, ssq / df);
      const double z = (rows[a].mean_residual - rows[b].mean_residual) /
                       std::sqrt(pooled * (1.0 / na + 1.0 / nb));
      report.pairs.push_back({rows[a].group_id, rows[b].group_id, z,
                              std::abs(z) > z_threshold});
    }
  }
  return report;
}

double exchangeability_check(const StudyData& data) {
  std::vector<double> labeled = data.labeled_prediction_values();
  const std::size_t pool = data.pool_kind() == PoolKind::NestedCensus
                               ? data.unit_count()
                               : data.pool_size();
  std::vector<double> pool_preds(data.predictions().begin(),
                                 data.predictions().begin() + pool);
  return stats::ks_statistic(std::move(labeled), std::move(pool_preds));
}

NegativeControlResult negative_control_check(const TwoArmStudy& study,
                                             double z_threshold) {
  const AteReport ate = ate_estimate(study, AteMethod::ArmwiseRectifier);
  NegativeControlResult r;
  r.tau_hat = ate.tau_hat;
  r.std_error = ate.std_error;
  if (ate.std_error > 0.0) {
    r.z_score = ate.tau_hat / ate.std_error;
  } else {
    r.z_score = ate.tau_hat == 0.0 ? 0.0
                : std::copysign(std::numeric_limits<double>::infinity(),
                                ate.tau_hat);
  }
  r.flagged = std::abs(r.z_score) > z_threshold;
  return r;
}

DiagnosticReport run_diagnostics(const StudyData& data,
                                 const std::vector<std::string>& groups,
                                 const std::optional<TwoArmStudy>& arms,
                                 const DiagnosticThresholds& thresholds) {
  DiagnosticReport report;
  report.thresholds = thresholds;
  report.design_effect = design_effect(data);
  report.subgroups =
      residual_subgroup_report(data, groups, thresholds.subgroup_z);
  report.exchangeability_stat = exchangeability_check(data);
  if (arms)
    report.negative_control =
        negative_control_check(*arms, thresholds.negative_control_z);

  if (report.design_effect >= 1.0)
    report.flags.push_back(DiagnosticFlag::PredictionsNotHelping);
  if (std::any_of(report.subgroups.pairs.begin(), report.subgroups.pairs.end(),
                  [](const SubgroupPair& p) { return p.flagged; }))
    report.flags.push_back(DiagnosticFlag::SubgroupResidualDivergence);
  if (report.exchangeability_stat > thresholds.ks)
    report.flags.push_back(DiagnosticFlag::LabeledPoolMismatch);
  if (report.negative_control && report.negative_control->flagged)
    report.flags.push_back(DiagnosticFlag::NegativeControlNonzero);
  return report;
}

}  // namespace rectify
