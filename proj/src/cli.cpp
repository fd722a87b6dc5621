#include "rectify/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rectify/csv.hpp"
#include "rectify/diagnostics.hpp"
#include "rectify/json_report.hpp"
#include "rectify/simulation.hpp"
#include "rectify/stats.hpp"
#include "rectify/stratified.hpp"

namespace rectify {

namespace {

void print_warnings(const ParsedStudy& study, std::ostream& err) {
  for (const std::string& w : study.warnings) err << "warning: " << w << "\n";
}

EstimateOptions make_options(const std::string& variance, double level) {
  EstimateOptions opts;
  opts.variance_mode = variance_mode_from_name(variance);
  opts.level = level;
  return opts;
}

int cmd_estimate(const std::string& input, const std::string& method,
                 const std::string& lambda, const std::string& variance,
                 double level, std::ostream& out, std::ostream& err) {
  const ParsedStudy parsed = parse_study_csv(input);
  print_warnings(parsed, err);
  const EstimateOptions opts = make_options(variance, level);

  EstimateReport report;
  if (method == "ppi") {
    report = ppi_mean(parsed.combined, opts);
  } else if (method == "labeled-only") {
    report = labeled_only_mean(parsed.combined, opts);
  } else {  // ppipp
    std::optional<double> lam;
    if (lambda != "auto") {
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(lambda.data(), lambda.data() + lambda.size(), v);
      require(ec == std::errc{} && ptr == lambda.data() + lambda.size() &&
                  std::isfinite(v),
              Errc::ParseError, "--lambda expects 'auto' or a number");
      lam = v;
    }
    report = ppi_pp_mean(parsed.combined, lam, opts);
  }
  for (const std::string& note : report.notes)
    if (note == "nested_variance_clamped")
      err << "warning: nested variance clamped at zero\n";
  out << render_report(report);
  return 0;
}

int cmd_ate(const std::string& input, const std::string& method,
            std::ostream& out, std::ostream& err) {
  const ParsedStudy parsed = parse_study_csv(input);
  print_warnings(parsed, err);
  const AteReport report =
      ate_estimate(parsed.require_two_arm(), *ate_method_from_name(method));
  out << render_report(report);
  return 0;
}

int cmd_stratified(const std::string& input, double level, std::ostream& out,
                   std::ostream& err) {
  const ParsedStudy parsed = parse_study_csv(input);
  print_warnings(parsed, err);
  EstimateOptions opts;
  opts.level = level;
  const StratifiedStudy& study = parsed.require_stratified();
  out << render_stratified_report(stratified_ppi_mean(study, opts), study);
  return 0;
}

int cmd_allocate(const std::string& input, std::size_t budget,
                 std::size_t min_per_stratum, std::ostream& out,
                 std::ostream& err) {
  const ParsedStudy parsed = parse_study_csv(input);
  print_warnings(parsed, err);
  const StratifiedStudy& study = parsed.require_stratified();

  // Dispersion inputs come from the labeled residual spread per stratum.
  std::vector<StratumDispersion> inputs;
  for (const Stratum& s : study.strata()) {
    require(s.data.labeled_count() >= 2, Errc::DegenerateSample,
            "stratum '" + s.id + "' needs at least 2 labeled units");
    inputs.push_back({s.data.pool_size(),
                      std::sqrt(sample_moments(s.data).sigma_e2)});
  }
  const AllocationPlan plan = neyman_allocation(inputs, budget, min_per_stratum);
  if (plan.proportional_fallback)
    err << "warning: all residual dispersions are zero; "
           "allocated proportionally to stratum size\n";
  out << render_report(plan);
  return 0;
}

int cmd_diagnose(const std::string& input, double ks_threshold,
                 double z_threshold, std::ostream& out, std::ostream& err) {
  const ParsedStudy parsed = parse_study_csv(input);
  print_warnings(parsed, err);
  DiagnosticThresholds thresholds;
  thresholds.ks = ks_threshold;
  thresholds.subgroup_z = z_threshold;
  thresholds.negative_control_z = z_threshold;
  const DiagnosticReport report = run_diagnostics(
      parsed.combined, parsed.group_ids, parsed.two_arm, thresholds);
  out << render_report(report);
  return 0;
}

int cmd_simulate(const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  SimulationConfig config = parse_simulation_config(config_path);
  if (const char* env_seed = std::getenv("RECTIFY_SEED")) {
    const std::string text(env_seed);
    std::uint64_t seed = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), seed);
    require(ec == std::errc{} && ptr == text.data() + text.size(),
            Errc::ConfigError, "RECTIFY_SEED is not an unsigned integer");
    config.master_seed = seed;
    err << "note: master_seed overridden by RECTIFY_SEED\n";
  }
  out << render_report(run_replications(config));
  return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Model-assisted estimation from predictions plus a labeled "
               "subsample"};
  app.require_subcommand(1);

  std::string input, config_path;
  std::string method = "ppi";
  std::string ate_method = "armwise";
  std::string lambda = "auto";
  std::string variance = "design";
  double level = 0.95;
  std::size_t budget = 0;
  std::size_t min_per_stratum = 2;
  double ks_threshold = 0.2;
  double z_threshold = 2.0;

  CLI::App* estimate = app.add_subcommand("estimate", "Mean estimate");
  estimate->add_option("input", input, "study CSV")->required();
  estimate->add_option("--method", method)
      ->check(CLI::IsMember({"ppi", "ppipp", "labeled-only"}));
  estimate->add_option("--lambda", lambda, "'auto' or a fixed weight");
  estimate->add_option("--variance", variance)
      ->check(CLI::IsMember({"design", "superpop-indep", "superpop-nested"}));
  estimate->add_option("--level", level);

  CLI::App* ate = app.add_subcommand("ate", "Two-arm treatment effect");
  ate->add_option("input", input, "study CSV with an arm column")->required();
  ate->add_option("--method", ate_method)
      ->check(CLI::IsMember({"armwise", "pooled", "naive"}));

  CLI::App* stratified =
      app.add_subcommand("stratified", "Stratified mean estimate");
  stratified->add_option("input", input, "study CSV with a stratum column")
      ->required();
  stratified->add_option("--level", level);

  CLI::App* allocate =
      app.add_subcommand("allocate", "Split a labeling budget across strata");
  allocate->add_option("input", input, "study CSV with a stratum column")
      ->required();
  allocate->add_option("--budget", budget)->required();
  allocate->add_option("--min-per-stratum", min_per_stratum);

  CLI::App* diagnose = app.add_subcommand("diagnose", "Design diagnostics");
  diagnose->add_option("input", input, "study CSV")->required();
  diagnose->add_option("--ks-threshold", ks_threshold);
  diagnose->add_option("--z-threshold", z_threshold);

  CLI::App* simulate =
      app.add_subcommand("simulate", "Seeded Monte Carlo verification");
  simulate->add_option("--config", config_path, "key = value config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (estimate->parsed())
      return cmd_estimate(input, method, lambda, variance, level, out, err);
    if (ate->parsed()) return cmd_ate(input, ate_method, out, err);
    if (stratified->parsed()) return cmd_stratified(input, level, out, err);
    if (allocate->parsed())
      return cmd_allocate(input, budget, min_per_stratum, out, err);
    if (diagnose->parsed())
      return cmd_diagnose(input, ks_threshold, z_threshold, out, err);
    if (simulate->parsed()) return cmd_simulate(config_path, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rectify
