#include "rectify/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "rectify/stats.hpp"

namespace rectify {

double Distribution::sample(CounterRng& rng) const {
  const double u = rng.next_open01();
  switch (family) {
    case DistFamily::Normal:
      return mean + sd * stats::normal_quantile(u);
    case DistFamily::Uniform:
      // Half-width sd * sqrt(3) keeps the requested standard deviation.
      return mean + sd * 3.4641016151377544 * (u - 0.5);
  }
  return mean;
}

namespace {

std::size_t resolve_label_count(std::size_t population,
                                const std::optional<std::size_t>& labels,
                                const std::optional<double>& fraction,
                                const char* what) {
  if (labels) {
    require(*labels >= 1 && *labels <= population, Errc::ConfigError,
            std::string(what) + ": label count outside [1, N]");
    return *labels;
  }
  require(fraction.has_value(), Errc::ConfigError,
          std::string(what) + ": neither a label count nor a fraction given");
  require(*fraction > 0.0 && *fraction <= 1.0, Errc::InvalidFraction,
          std::string(what) + ": labeling fraction outside (0,1]");
  const auto n = static_cast<std::size_t>(
      std::llround(*fraction * static_cast<double>(population)));
  require(n >= 1 && n <= population, Errc::ConfigError,
          std::string(what) + ": fraction yields no labeled units");
  return n;
}

}  // namespace

std::size_t ArmConfig::resolve_labels() const {
  return resolve_label_count(population, labels, fraction, "arm");
}

std::size_t SimulationConfig::resolve_labels() const {
  return resolve_label_count(population, labels, fraction, "study");
}

void SimulationConfig::validate() const {
  require(replications >= 1, Errc::ConfigError, "replications must be >= 1");
  require(threads >= 1, Errc::ConfigError, "threads must be >= 1");
  require(level > 0.0 && level < 1.0, Errc::InvalidLevel,
          "level must lie in (0,1)");
  require(outcome_sd >= 0.0 && std::isfinite(outcome_sd), Errc::ConfigError,
          "sigma_y must be finite and nonnegative");
  require(error_sd >= 0.0 && std::isfinite(error_sd), Errc::ConfigError,
          "sigma_e must be finite and nonnegative");
  if (mode == Mode::Mean) {
    require(population >= 2, Errc::ConfigError, "N must be >= 2");
    const std::size_t n = resolve_labels();
    require(n >= 2, Errc::ConfigError,
            "variance reporting needs at least 2 labeled units");
    require(!estimators.empty(), Errc::ConfigError, "no estimators selected");
    for (const std::string& e : estimators) {
      const std::optional<Method> m = method_from_name(e);
      require(m.has_value() && *m != Method::PredictionOnly, Errc::ConfigError,
              "unknown estimator '" + e + "'");
    }
  } else {
    for (int z = 0; z < 2; ++z) {
      require(arms[z].population >= 2, Errc::ConfigError,
              "arm population must be >= 2");
      require(arms[z].resolve_labels() >= 2, Errc::ConfigError,
              "variance reporting needs at least 2 labeled units per arm");
    }
    require(!methods.empty(), Errc::ConfigError, "no methods selected");
  }
}

namespace {

std::vector<std::size_t> srswor(std::size_t population, std::size_t draw,
                                CounterRng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < draw; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.next_below(
                                  static_cast<std::uint64_t>(population - k)));
    std::swap(idx[k], idx[j]);
  }
  idx.resize(draw);
  return idx;
}

struct DrawnPopulation {
  std::vector<double> outcomes;
  std::vector<double> predictions;
  double outcome_mean = 0.0;
};

DrawnPopulation draw_population(std::size_t population,
                                const Distribution& outcome,
                                const Distribution& error, CounterRng& rng) {
  DrawnPopulation p;
  p.outcomes.resize(population);
  p.predictions.resize(population);
  for (std::size_t i = 0; i < population; ++i)
    p.outcomes[i] = outcome.sample(rng);
  for (std::size_t i = 0; i < population; ++i)
    p.predictions[i] = p.outcomes[i] - error.sample(rng);
  p.outcome_mean = stats::mean(p.outcomes);
  return p;
}

StudyData label_population(const DrawnPopulation& pop, std::size_t n,
                           CounterRng& rng) {
  const std::vector<std::size_t> picked = srswor(pop.outcomes.size(), n, rng);
  std::vector<double> labeled_outcomes(picked.size());
  for (std::size_t k = 0; k < picked.size(); ++k)
    labeled_outcomes[k] = pop.outcomes[picked[k]];
  return StudyData::nested_with_labels(pop.predictions, picked,
                                       labeled_outcomes);
}

struct MeanDraw {
  StudyData study;
  double realized_mean;  // finite-population outcome mean
};

struct AteDraw {
  TwoArmStudy study;
  double realized_tau;  // finite-population (sample) average treatment effect
};

MeanDraw draw_mean_study(const SimulationConfig& config,
                         std::uint64_t replicate_index) {
  CounterRng rng(config.master_seed, replicate_index);
  const Distribution outcome{config.outcome_family, config.outcome_mean,
                             config.outcome_sd};
  const Distribution error{config.error_family, config.error_mean,
                           config.error_sd};
  DrawnPopulation pop =
      draw_population(config.population, outcome, error, rng);
  StudyData study = label_population(pop, config.resolve_labels(), rng);
  return {std::move(study), pop.outcome_mean};
}

AteDraw draw_ate_study(const SimulationConfig& config,
                       std::uint64_t replicate_index) {
  CounterRng rng(config.master_seed, replicate_index);
  std::optional<StudyData> arms[2];
  double arm_means[2] = {0.0, 0.0};
  for (int z = 0; z < 2; ++z) {
    const ArmConfig& arm = config.arms[z];
    const Distribution outcome{config.outcome_family, arm.outcome_mean,
                               config.outcome_sd};
    const Distribution error{config.error_family, arm.error_mean,
                             config.error_sd};
    DrawnPopulation pop = draw_population(arm.population, outcome, error, rng);
    arm_means[z] = pop.outcome_mean;
    arms[z] = label_population(pop, arm.resolve_labels(), rng);
  }
  return {TwoArmStudy(std::move(*arms[0]), std::move(*arms[1])),
          arm_means[1] - arm_means[0]};
}

}  // namespace

StudyData generate_mean_study(const SimulationConfig& config,
                              std::uint64_t replicate_index) {
  return draw_mean_study(config, replicate_index).study;
}

TwoArmStudy generate_two_arm_study(const SimulationConfig& config,
                                   std::uint64_t replicate_index) {
  return draw_ate_study(config, replicate_index).study;
}

std::variant<StudyData, TwoArmStudy> generate_study(
    const SimulationConfig& config, std::uint64_t replicate_index) {
  if (config.mode == SimulationConfig::Mode::Mean)
    return generate_mean_study(config, replicate_index);
  return generate_two_arm_study(config, replicate_index);
}

namespace {

struct RowSpec {
  std::string estimator;
  std::optional<double> lambda;     // fixed lambda (mean mode)
  std::optional<AteMethod> method;  // ate mode
  bool auto_lambda = false;
};

struct RepResult {
  double estimate = 0.0;
  double est_variance = 0.0;
  bool covered = false;
  double lambda_hat_value = 0.0;
};

std::vector<RowSpec> build_rows(const SimulationConfig& config) {
  std::vector<RowSpec> rows;
  if (config.mode == SimulationConfig::Mode::Mean) {
    for (const std::string& name : config.estimators) {
      RowSpec spec;
      spec.estimator = method_name(*method_from_name(name));
      if (spec.estimator == std::string("ppipp")) {
        spec.lambda = config.lambda;
        spec.auto_lambda = !config.lambda.has_value();
      }
      rows.push_back(std::move(spec));
    }
    for (double lam : config.lambda_grid)
      rows.push_back({"ppipp", lam, std::nullopt, false});
  } else {
    for (AteMethod m : config.methods)
      rows.push_back({ate_method_name(m), std::nullopt, m, false});
  }
  return rows;
}

void run_one_replicate(const SimulationConfig& config,
                       const std::vector<RowSpec>& rows, std::uint64_t r,
                       double z95,
                       std::vector<std::vector<RepResult>>& results) {
  const EstimateOptions opts{config.variance_mode, config.level};
  if (config.mode == SimulationConfig::Mode::Mean) {
    const MeanDraw draw = draw_mean_study(config, r);
    const double coverage_target =
        config.variance_mode == VarianceMode::DesignSrswor
            ? draw.realized_mean
            : config.outcome_mean;
    for (std::size_t row = 0; row < rows.size(); ++row) {
      const RowSpec& spec = rows[row];
      EstimateReport rep;
      if (spec.estimator == std::string("labeled_only")) {
        rep = labeled_only_mean(draw.study, opts);
      } else if (spec.estimator == std::string("ppi")) {
        rep = ppi_mean(draw.study, opts);
      } else {
        rep = ppi_pp_mean(draw.study, spec.lambda, opts);
      }
      RepResult res;
      res.estimate = rep.point;
      res.est_variance = rep.variance;
      const double half = z95 * std::sqrt(rep.variance);
      res.covered = rep.point - half <= coverage_target &&
                    coverage_target <= rep.point + half;
      if (spec.auto_lambda) res.lambda_hat_value = *rep.lambda;
      results[row][r] = res;
    }
  } else {
    const AteDraw draw = draw_ate_study(config, r);
    for (std::size_t row = 0; row < rows.size(); ++row) {
      const AteReport rep = ate_estimate(draw.study, *rows[row].method);
      RepResult res;
      res.estimate = rep.tau_hat;
      res.est_variance = rep.variance;
      const double half = z95 * rep.std_error;
      res.covered = rep.tau_hat - half <= draw.realized_tau &&
                    draw.realized_tau <= rep.tau_hat + half;
      results[row][r] = res;
    }
  }
}

}  // namespace

SimulationReport run_replications(const SimulationConfig& config) {
  config.validate();
  const std::vector<RowSpec> rows = build_rows(config);
  const std::size_t R = config.replications;
  const double z95 = stats::normal_quantile(0.975);

  std::vector<std::vector<RepResult>> results(rows.size(),
                                              std::vector<RepResult>(R));

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      try {
        run_one_replicate(config, rows, r, z95, results);
      } catch (const Error& e) {
        throw Error(e.code(),
                    "replicate " + std::to_string(r) + ": " + e.what());
      }
    }
  };

  if (config.threads <= 1 || R < 2) {
    run_range(0, R);
  } else {
    const unsigned workers =
        std::min<unsigned>(config.threads, static_cast<unsigned>(R));
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = R * w / workers;
      const std::uint64_t end = R * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SimulationReport report;
  report.mode = config.mode == SimulationConfig::Mode::Mean ? "mean" : "ate";
  report.replications = R;
  report.master_seed = config.master_seed;
  report.variance_mode = variance_mode_name(config.variance_mode);
  report.target =
      config.mode == SimulationConfig::Mode::Mean
          ? config.outcome_mean
          : config.arms[1].outcome_mean - config.arms[0].outcome_mean;

  const double Rd = static_cast<double>(R);
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const std::vector<RepResult>& reps = results[row];
    std::vector<double> estimates(R);
    double var_sum = 0.0;
    double covered = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      estimates[r] = reps[r].estimate;
      var_sum += reps[r].est_variance;
      covered += reps[r].covered ? 1.0 : 0.0;
    }
    SimulationRow out;
    out.estimator = rows[row].estimator;
    out.lambda = rows[row].lambda;
    const double est_mean = stats::mean(estimates);
    const double est_var = R >= 2 ? stats::sample_variance(estimates) : 0.0;
    out.empirical_bias = est_mean - report.target;
    out.mc_std_error_of_bias = std::sqrt(est_var / Rd);
    out.empirical_variance = est_var;
    out.mean_estimated_variance = var_sum / Rd;
    out.coverage_at_95 = covered / Rd;
    if (config.mode == SimulationConfig::Mode::Mean) {
      out.theoretical_bias = 0.0;
    } else {
      const double f0 = static_cast<double>(config.arms[0].resolve_labels()) /
                        static_cast<double>(config.arms[0].population);
      const double f1 = static_cast<double>(config.arms[1].resolve_labels()) /
                        static_cast<double>(config.arms[1].population);
      out.theoretical_bias =
          theoretical_bias(*rows[row].method, config.arms[0].error_mean,
                           config.arms[1].error_mean, f0, f1);
    }
    if (rows[row].auto_lambda) {
      std::vector<double> lambdas(R);
      for (std::size_t r = 0; r < R; ++r) lambdas[r] = reps[r].lambda_hat_value;
      out.mean_lambda_hat = stats::mean(lambdas);
      out.mc_se_lambda_hat =
          R >= 2 ? std::sqrt(stats::sample_variance(lambdas) / Rd) : 0.0;
    }
    report.rows.push_back(std::move(out));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Config file parsing: flat `key = value` lines, '#' comments.
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v))
      fail(Errc::ConfigError,
           "line " + std::to_string(line) + ": bad number '" + value + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::ConfigError,
         "line " + std::to_string(line) + ": bad number '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& value, int line) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    fail(Errc::ConfigError,
         "line " + std::to_string(line) + ": bad integer '" + value + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

DistFamily parse_family(const std::string& value, int line) {
  if (value == "normal") return DistFamily::Normal;
  if (value == "uniform") return DistFamily::Uniform;
  fail(Errc::ConfigError, "line " + std::to_string(line) +
                              ": unknown distribution '" + value + "'");
}

bool apply_arm_key(SimulationConfig& config, const std::string& key,
                   const std::string& value, int line) {
  if (key.size() < 6 || key.compare(0, 3, "arm") != 0 || key[4] != '.')
    return false;
  const char arm_char = key[3];
  if (arm_char != '0' && arm_char != '1') return false;
  ArmConfig& arm = config.arms[arm_char - '0'];
  const std::string field = key.substr(5);
  if (field == "N")
    arm.population = static_cast<std::size_t>(parse_u64(value, line));
  else if (field == "n")
    arm.labels = static_cast<std::size_t>(parse_u64(value, line));
  else if (field == "f")
    arm.fraction = parse_double(value, line);
  else if (field == "mu")
    arm.outcome_mean = parse_double(value, line);
  else if (field == "delta")
    arm.error_mean = parse_double(value, line);
  else
    fail(Errc::ConfigError,
         "line " + std::to_string(line) + ": unknown key '" + key + "'");
  return true;
}

}  // namespace

SimulationConfig parse_simulation_config_text(const std::string& text) {
  SimulationConfig config;
  std::stringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string entry = trim(raw);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    require(eq != std::string::npos, Errc::ConfigError,
            "line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    require(!key.empty() && !value.empty(), Errc::ConfigError,
            "line " + std::to_string(line) + ": expected key = value");

    if (key == "mode") {
      if (value == "mean")
        config.mode = SimulationConfig::Mode::Mean;
      else if (value == "ate")
        config.mode = SimulationConfig::Mode::Ate;
      else
        fail(Errc::ConfigError, "line " + std::to_string(line) +
                                    ": unknown mode '" + value + "'");
    } else if (key == "replications") {
      config.replications = static_cast<std::size_t>(parse_u64(value, line));
    } else if (key == "master_seed") {
      config.master_seed = parse_u64(value, line);
    } else if (key == "threads") {
      config.threads = static_cast<unsigned>(parse_u64(value, line));
    } else if (key == "N") {
      config.population = static_cast<std::size_t>(parse_u64(value, line));
    } else if (key == "n") {
      config.labels = static_cast<std::size_t>(parse_u64(value, line));
    } else if (key == "f") {
      config.fraction = parse_double(value, line);
    } else if (key == "mu") {
      config.outcome_mean = parse_double(value, line);
    } else if (key == "sigma_y") {
      config.outcome_sd = parse_double(value, line);
    } else if (key == "delta") {
      config.error_mean = parse_double(value, line);
    } else if (key == "sigma_e") {
      config.error_sd = parse_double(value, line);
    } else if (key == "outcome_dist") {
      config.outcome_family = parse_family(value, line);
    } else if (key == "error_dist") {
      config.error_family = parse_family(value, line);
    } else if (key == "estimators") {
      config.estimators = split_list(value);
    } else if (key == "lambda") {
      if (value != "auto") config.lambda = parse_double(value, line);
    } else if (key == "lambda_grid") {
      config.lambda_grid.clear();
      for (const std::string& item : split_list(value))
        config.lambda_grid.push_back(parse_double(item, line));
    } else if (key == "variance") {
      const auto mode = variance_mode_from_name(value);
      require(mode.has_value(), Errc::ConfigError,
              "line " + std::to_string(line) + ": unknown variance mode '" +
                  value + "'");
      config.variance_mode = *mode;
    } else if (key == "level") {
      config.level = parse_double(value, line);
    } else if (key == "methods") {
      config.methods.clear();
      for (const std::string& item : split_list(value)) {
        const auto m = ate_method_from_name(item);
        require(m.has_value(), Errc::ConfigError,
                "line " + std::to_string(line) + ": unknown method '" + item +
                    "'");
        config.methods.push_back(*m);
      }
    } else if (!apply_arm_key(config, key, value, line)) {
      fail(Errc::ConfigError,
           "line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

SimulationConfig parse_simulation_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::ConfigError, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_simulation_config_text(buffer.str());
}

}  // namespace rectify
