#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rectify/estimator.hpp"
#include "rectify/rng.hpp"
#include "rectify/study.hpp"
#include "rectify/treatment.hpp"

namespace rectify {

enum class DistFamily { Normal, Uniform };

/// A distribution parameterized by mean and standard deviation. Uniform
/// draws are centered at `mean` with half-width sd * sqrt(3).
struct Distribution {
  DistFamily family = DistFamily::Normal;
  double mean = 0.0;
  double sd = 1.0;

  double sample(CounterRng& rng) const;
};

struct ArmConfig {
  std::size_t population = 0;            // N_z
  std::optional<std::size_t> labels;     // n_z; wins over fraction
  std::optional<double> fraction;        // f_z
  double outcome_mean = 0.0;             // mu_z
  double error_mean = 0.0;               // delta_z

  std::size_t resolve_labels() const;
};

struct SimulationConfig {
  enum class Mode { Mean, Ate };

  Mode mode = Mode::Mean;
  std::size_t replications = 10000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;

  // Mean mode.
  std::size_t population = 0;            // N
  std::optional<std::size_t> labels;     // n
  std::optional<double> fraction;        // f
  double outcome_mean = 0.0;             // mu
  std::vector<std::string> estimators = {"labeled_only", "ppi", "ppipp"};
  std::optional<double> lambda;          // fixed lambda for ppipp; auto if absent
  std::vector<double> lambda_grid;       // extra fixed-lambda rows

  // Ate mode.
  std::array<ArmConfig, 2> arms{};
  std::vector<AteMethod> methods = {AteMethod::ArmwiseRectifier,
                                    AteMethod::PooledRectifier,
                                    AteMethod::NaiveImputation};

  // Shared distribution shape: outcome Y and error e = Y - Yhat.
  DistFamily outcome_family = DistFamily::Normal;
  DistFamily error_family = DistFamily::Normal;
  double outcome_sd = 1.0;               // sigma_y
  double error_mean = 0.0;               // delta (mean mode)
  double error_sd = 1.0;                 // sigma_e

  VarianceMode variance_mode = VarianceMode::DesignSrswor;
  double level = 0.95;

  std::size_t resolve_labels() const;
  void validate() const;
};

/// Flat key = value config file; '#' starts a comment. Unknown keys are
/// rejected.
SimulationConfig parse_simulation_config(const std::string& path);
SimulationConfig parse_simulation_config_text(const std::string& text);

/// One synthetic study, fully determined by (config, master_seed,
/// replicate_index). Draw order per study: outcomes, then errors, then the
/// SRSWOR label sample (per arm in ate mode, arm 0 first).
std::variant<StudyData, TwoArmStudy> generate_study(
    const SimulationConfig& config, std::uint64_t replicate_index);
StudyData generate_mean_study(const SimulationConfig& config,
                              std::uint64_t replicate_index);
TwoArmStudy generate_two_arm_study(const SimulationConfig& config,
                                   std::uint64_t replicate_index);

struct SimulationRow {
  std::string estimator;
  std::optional<double> lambda;          // fixed-lambda rows only
  double empirical_bias = 0.0;           // mean(estimate) - superpop target
  double mc_std_error_of_bias = 0.0;     // sd(estimate) / sqrt(R)
  double empirical_variance = 0.0;
  double mean_estimated_variance = 0.0;
  double coverage_at_95 = 0.0;
  std::optional<double> theoretical_bias;
  std::optional<double> mean_lambda_hat;   // auto-lambda row only
  std::optional<double> mc_se_lambda_hat;
};

struct SimulationReport {
  std::string mode;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
  std::string variance_mode;
  /// Superpopulation target: mu in mean mode, mu1 - mu0 in ate mode.
  double target = 0.0;
  std::vector<SimulationRow> rows;
};

/// Runs every replicate, one RNG stream each, and aggregates in replicate
/// order so the report does not depend on thread count. Coverage is
/// measured against the realized finite-population estimand under design
/// variance and against the superpopulation target otherwise.
SimulationReport run_replications(const SimulationConfig& config);

}  // namespace rectify
