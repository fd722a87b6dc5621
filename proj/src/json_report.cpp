#include "rectify/json_report.hpp"

#include <json.hpp>

namespace rectify {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional_number(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

void check_envelope(const json& j, const char* kind) {
  require(j.is_object(), Errc::ParseError, "report is not a JSON object");
  require(j.value("schema_version", -1) == kReportSchemaVersion,
          Errc::ParseError, "unsupported schema_version");
  require(j.value("kind", "") == kind, Errc::ParseError,
          std::string("expected a '") + kind + "' report");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json estimate_to_json(const EstimateReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "estimate";
  j["method"] = method_name(r.method);
  j["variance_mode"] = variance_mode_name(r.variance_mode);
  j["point"] = r.point;
  j["variance"] = r.variance;
  j["std_error"] = r.std_error;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["level"] = r.level;
  j["lambda"] = optional_number(r.lambda);
  j["n"] = r.n;
  j["N"] = r.N;
  j["notes"] = r.notes;
  return j;
}

EstimateReport estimate_from_json(const json& j) {
  EstimateReport r;
  const auto method = method_from_name(j.at("method").get<std::string>());
  const auto mode =
      variance_mode_from_name(j.at("variance_mode").get<std::string>());
  require(method.has_value() && mode.has_value(), Errc::ParseError,
          "unknown method or variance mode");
  r.method = *method;
  r.variance_mode = *mode;
  r.point = j.at("point").get<double>();
  r.variance = j.at("variance").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.level = j.at("level").get<double>();
  r.lambda = read_optional_number(j.at("lambda"));
  r.n = j.at("n").get<std::size_t>();
  r.N = j.at("N").get<std::size_t>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

}  // namespace

std::string render_report(const EstimateReport& report) {
  return dump(estimate_to_json(report));
}

EstimateReport parse_estimate_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  check_envelope(j, "estimate");
  return estimate_from_json(j);
}

std::string render_report(const AteReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "ate";
  j["method"] = ate_method_name(r.method);
  j["tau_hat"] = r.tau_hat;
  j["per_arm_points"] = r.per_arm_points;
  j["per_arm_delta_hat"] = r.per_arm_delta_hat;
  j["variance"] = r.variance;
  j["std_error"] = r.std_error;
  j["bias_unaccounted"] = r.bias_unaccounted;
  j["arm_n"] = r.arm_labeled;
  j["arm_N"] = r.arm_population;
  return dump(j);
}

AteReport parse_ate_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  check_envelope(j, "ate");
  AteReport r;
  const auto method = ate_method_from_name(j.at("method").get<std::string>());
  require(method.has_value(), Errc::ParseError, "unknown ate method");
  r.method = *method;
  r.tau_hat = j.at("tau_hat").get<double>();
  r.per_arm_points = j.at("per_arm_points").get<std::array<double, 2>>();
  r.per_arm_delta_hat =
      j.at("per_arm_delta_hat").get<std::array<double, 2>>();
  r.variance = j.at("variance").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.bias_unaccounted = j.at("bias_unaccounted").get<bool>();
  r.arm_labeled = j.at("arm_n").get<std::array<std::size_t, 2>>();
  r.arm_population = j.at("arm_N").get<std::array<std::size_t, 2>>();
  return r;
}

std::string render_report(const AllocationPlan& plan) {
  json strata = json::array();
  for (std::size_t h = 0; h < plan.inputs.size(); ++h) {
    json s;
    s["population"] = plan.inputs[h].population;
    s["dispersion"] = plan.inputs[h].dispersion;
    s["labels"] = plan.labels_per_stratum[h];
    strata.push_back(std::move(s));
  }
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "allocation";
  j["budget"] = plan.budget;
  j["min_per_stratum"] = plan.min_per_stratum;
  j["proportional_fallback"] = plan.proportional_fallback;
  j["strata"] = std::move(strata);
  return dump(j);
}

AllocationPlan parse_allocation_plan(const std::string& json_text) {
  const json j = json::parse(json_text);
  check_envelope(j, "allocation");
  AllocationPlan plan;
  plan.budget = j.at("budget").get<std::size_t>();
  plan.min_per_stratum = j.at("min_per_stratum").get<std::size_t>();
  plan.proportional_fallback = j.at("proportional_fallback").get<bool>();
  for (const json& s : j.at("strata")) {
    plan.inputs.push_back({s.at("population").get<std::size_t>(),
                           s.at("dispersion").get<double>()});
    plan.labels_per_stratum.push_back(s.at("labels").get<std::size_t>());
  }
  return plan;
}

std::string render_report(const DiagnosticReport& r) {
  json rows = json::array();
  for (const SubgroupRow& row : r.subgroups.rows) {
    json jr;
    jr["group_id"] = row.group_id;
    jr["mean_residual"] = row.mean_residual;
    jr["sd_residual"] = optional_number(row.sd_residual);
    jr["n"] = row.n;
    rows.push_back(std::move(jr));
  }
  json pairs = json::array();
  for (const SubgroupPair& p : r.subgroups.pairs) {
    json jp;
    jp["group_a"] = p.group_a;
    jp["group_b"] = p.group_b;
    jp["z"] = p.z;
    jp["flagged"] = p.flagged;
    pairs.push_back(std::move(jp));
  }
  json flags = json::array();
  for (DiagnosticFlag f : r.flags) flags.push_back(diagnostic_flag_name(f));

  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "diagnostics";
  j["design_effect"] = r.design_effect;
  j["exchangeability_stat"] = r.exchangeability_stat;
  j["subgroups"] =
      json{{"rows", std::move(rows)},
           {"pairs", std::move(pairs)},
           {"z_threshold", r.subgroups.z_threshold}};
  if (r.negative_control) {
    j["negative_control"] = json{{"tau_hat", r.negative_control->tau_hat},
                                 {"std_error", r.negative_control->std_error},
                                 {"z_score", r.negative_control->z_score},
                                 {"flagged", r.negative_control->flagged}};
  } else {
    j["negative_control"] = nullptr;
  }
  j["flags"] = std::move(flags);
  j["thresholds"] = json{{"ks", r.thresholds.ks},
                         {"subgroup_z", r.thresholds.subgroup_z},
                         {"negative_control_z", r.thresholds.negative_control_z}};
  return dump(j);
}

DiagnosticReport parse_diagnostic_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  check_envelope(j, "diagnostics");
  DiagnosticReport r;
  r.design_effect = j.at("design_effect").get<double>();
  r.exchangeability_stat = j.at("exchangeability_stat").get<double>();
  const json& sub = j.at("subgroups");
  r.subgroups.z_threshold = sub.at("z_threshold").get<double>();
  for (const json& jr : sub.at("rows")) {
    SubgroupRow row;
    row.group_id = jr.at("group_id").get<std::string>();
    row.mean_residual = jr.at("mean_residual").get<double>();
    row.sd_residual = read_optional_number(jr.at("sd_residual"));
    row.n = jr.at("n").get<std::size_t>();
    r.subgroups.rows.push_back(std::move(row));
  }
  for (const json& jp : sub.at("pairs")) {
    r.subgroups.pairs.push_back({jp.at("group_a").get<std::string>(),
                                 jp.at("group_b").get<std::string>(),
                                 jp.at("z").get<double>(),
                                 jp.at("flagged").get<bool>()});
  }
  if (!j.at("negative_control").is_null()) {
    const json& nc = j.at("negative_control");
    r.negative_control = NegativeControlResult{
        nc.at("tau_hat").get<double>(), nc.at("std_error").get<double>(),
        nc.at("z_score").get<double>(), nc.at("flagged").get<bool>()};
  }
  for (const json& f : j.at("flags")) {
    const std::string name = f.get<std::string>();
    for (DiagnosticFlag flag :
         {DiagnosticFlag::SubgroupResidualDivergence,
          DiagnosticFlag::LabeledPoolMismatch,
          DiagnosticFlag::NegativeControlNonzero,
          DiagnosticFlag::PredictionsNotHelping}) {
      if (name == diagnostic_flag_name(flag)) r.flags.push_back(flag);
    }
  }
  const json& th = j.at("thresholds");
  r.thresholds.ks = th.at("ks").get<double>();
  r.thresholds.subgroup_z = th.at("subgroup_z").get<double>();
  r.thresholds.negative_control_z = th.at("negative_control_z").get<double>();
  return r;
}

std::string render_report(const SimulationReport& r) {
  json rows = json::array();
  for (const SimulationRow& row : r.rows) {
    json jr;
    jr["estimator"] = row.estimator;
    jr["lambda"] = optional_number(row.lambda);
    jr["empirical_bias"] = row.empirical_bias;
    jr["mc_std_error_of_bias"] = row.mc_std_error_of_bias;
    jr["empirical_variance"] = row.empirical_variance;
    jr["mean_estimated_variance"] = row.mean_estimated_variance;
    jr["coverage_at_95"] = row.coverage_at_95;
    jr["theoretical_bias"] = optional_number(row.theoretical_bias);
    jr["mean_lambda_hat"] = optional_number(row.mean_lambda_hat);
    jr["mc_se_lambda_hat"] = optional_number(row.mc_se_lambda_hat);
    rows.push_back(std::move(jr));
  }
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "simulation";
  j["mode"] = r.mode;
  j["replications"] = r.replications;
  j["master_seed"] = r.master_seed;
  j["variance_mode"] = r.variance_mode;
  j["target"] = r.target;
  j["rows"] = std::move(rows);
  return dump(j);
}

SimulationReport parse_simulation_report(const std::string& json_text) {
  const json j = json::parse(json_text);
  check_envelope(j, "simulation");
  SimulationReport r;
  r.mode = j.at("mode").get<std::string>();
  r.replications = j.at("replications").get<std::size_t>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.variance_mode = j.at("variance_mode").get<std::string>();
  r.target = j.at("target").get<double>();
  for (const json& jr : j.at("rows")) {
    SimulationRow row;
    row.estimator = jr.at("estimator").get<std::string>();
    row.lambda = read_optional_number(jr.at("lambda"));
    row.empirical_bias = jr.at("empirical_bias").get<double>();
    row.mc_std_error_of_bias = jr.at("mc_std_error_of_bias").get<double>();
    row.empirical_variance = jr.at("empirical_variance").get<double>();
    row.mean_estimated_variance =
        jr.at("mean_estimated_variance").get<double>();
    row.coverage_at_95 = jr.at("coverage_at_95").get<double>();
    row.theoretical_bias = read_optional_number(jr.at("theoretical_bias"));
    row.mean_lambda_hat = read_optional_number(jr.at("mean_lambda_hat"));
    row.mc_se_lambda_hat = read_optional_number(jr.at("mc_se_lambda_hat"));
    r.rows.push_back(std::move(row));
  }
  return r;
}

std::string render_stratified_report(const EstimateReport& report,
                                     const StratifiedStudy& study) {
  json j = estimate_to_json(report);
  j["kind"] = "stratified";
  json strata = json::array();
  for (std::size_t h = 0; h < study.stratum_count(); ++h) {
    const Stratum& s = study.strata()[h];
    json js;
    js["id"] = s.id;
    js["N"] = s.data.pool_size();
    js["n"] = s.data.labeled_count();
    js["weight"] = study.weight(h);
    js["point"] = ppi_point(s.data);
    js["variance"] = variance_design(s.data, sample_moments(s.data));
    strata.push_back(std::move(js));
  }
  j["strata"] = std::move(strata);
  return dump(j);
}

}  // namespace rectify
