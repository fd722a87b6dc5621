#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rectify/estimator.hpp"

using namespace rectify;
using testutil::close;

TEST_CASE("sample moments on the D1 labeled pairs") {
  const MomentSummary m = sample_moments(testutil::d1_study());
  CHECK(m.sigma_e2 == doctest::Approx(2.0));
  CHECK(m.cov_y_yhat == doctest::Approx(-0.5));
  CHECK(m.sigma_yhat2 == doctest::Approx(0.5));
  CHECK(m.var_y == doctest::Approx(0.5));
  CHECK(m.n == 2);
  CHECK(m.N == 4);
  CHECK_FALSE(m.population_s_e2.has_value());
}

TEST_CASE("sample moments edge cases") {
  // perfect predictions
  const StudyData perfect = StudyData::fully_labeled({1.0, 2.0, 3.0},
                                                     {1.0, 2.0, 3.0});
  CHECK(sample_moments(perfect).sigma_e2 == 0.0);
  CHECK(sample_moments(perfect).population_s_e2 == 0.0);

  // constant residual shift
  const StudyData shifted = StudyData::fully_labeled({1.0, 2.0, 3.0},
                                                     {0.5, 1.5, 2.5});
  CHECK(sample_moments(shifted).sigma_e2 == 0.0);
  CHECK(shifted.residuals().mean == doctest::Approx(0.5));

  // single labeled unit
  const StudyData tiny =
      StudyData::nested_with_labels({1.0, 2.0}, {0}, {1.5});
  CHECK_THROWS_AS(sample_moments(tiny), Error);
}

TEST_CASE("ppi point estimate matches the D1 value and offset identities") {
  const StudyData d1 = testutil::d1_study();
  CHECK(ppi_point(d1) == doctest::Approx(2.5));

  // constant-offset predictions recover the population mean exactly
  const testutil::Population pop = testutil::d1_population();
  std::vector<double> offset(pop.y.size());
  for (std::size_t i = 0; i < pop.y.size(); ++i) offset[i] = pop.y[i] + 7.25;
  const StudyData study = StudyData::nested_with_labels(
      offset, {1, 3}, {pop.y[1], pop.y[3]});
  CHECK(close(ppi_point(study), pop.mean_y()));

  // perfect predictions: estimate equals the pool prediction mean
  const StudyData perfect = StudyData::nested_with_labels(
      pop.y, {0, 2}, {pop.y[0], pop.y[2]});
  CHECK(ppi_point(perfect) == doctest::Approx(pop.mean_y()));
}

TEST_CASE("lambda_hat is the labeled regression slope") {
  CHECK(lambda_hat(testutil::d1_study()) == doctest::Approx(-1.0));

  const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
  std::vector<double> twice(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) twice[i] = 2.0 * y[i];
  CHECK(lambda_hat(StudyData::fully_labeled(y, twice)) == doctest::Approx(0.5));
  CHECK(lambda_hat(StudyData::fully_labeled(y, y)) == doctest::Approx(1.0));

  const StudyData constant = StudyData::fully_labeled(y, {3.0, 3.0, 3.0, 3.0});
  CHECK_THROWS_AS(lambda_hat(constant), Error);
}

TEST_CASE("ppi_pp interpolates between labeled-only and ppi") {
  const StudyData d1 = testutil::d1_study();
  CHECK(ppi_pp_mean(d1).point == doctest::Approx(0.5));  // lambda hat = -1
  CHECK(ppi_pp_mean(d1).lambda == doctest::Approx(-1.0));
  CHECK(close(ppi_pp_mean(d1, 1.0).point, ppi_mean(d1).point));
  CHECK(ppi_pp_mean(d1, 0.0).point == labeled_only_point(d1));

  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 50; ++rep) {
    const StudyData s = testutil::random_study(gen, 60);
    CHECK(close(ppi_pp_point(s, 1.0), ppi_point(s)));
    CHECK(ppi_pp_point(s, 0.0) == labeled_only_point(s));
  }
}

TEST_CASE("prediction shift leaves the combined estimate unchanged") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 50; ++rep) {
    const StudyData s = testutil::random_study(gen, 80);
    std::vector<double> shifted = s.predictions();
    for (double& v : shifted) v += 3.75;
    std::vector<std::optional<double>> outcomes = s.outcomes();
    const StudyData t = StudyData::nested(shifted, outcomes);
    CHECK(close(ppi_point(s), ppi_point(t)));
  }
}

TEST_CASE("design variance formula and edge cases") {
  CHECK(variance_design_formula(4.0 / 3.0, 2, 4) == doctest::Approx(1.0 / 3.0));

  const StudyData d1 = testutil::d1_study();
  CHECK(variance_design(d1, sample_moments(d1)) == doctest::Approx(0.5));

  // perfect predictions give zero variance
  const testutil::Population pop = testutil::d1_population();
  const StudyData perfect = StudyData::nested_with_labels(
      pop.y, {0, 1}, {pop.y[0], pop.y[1]});
  CHECK(variance_design(perfect, sample_moments(perfect)) == 0.0);

  // census gives zero variance through the fpc
  const StudyData census = StudyData::fully_labeled(pop.y, pop.yhat);
  CHECK(variance_design(census, sample_moments(census)) == 0.0);

  const StudyData indep = StudyData::independent({1.0, 2.0}, {1.0, 2.0},
                                                 {0.5, 1.5});
  CHECK_THROWS_AS(variance_design(indep, sample_moments(indep)), Error);
}

TEST_CASE("superpopulation variance, independent and nested") {
  MomentSummary m;
  m.sigma_e2 = 1.0;
  m.sigma_yhat2 = 4.0;
  m.n = 10;
  m.N = 100;
  CHECK(variance_superpop_independent(m) == doctest::Approx(0.14));
  CHECK(variance_superpop_nested(m) == doctest::Approx(0.13));

  m.sigma_e2 = 0.0;
  CHECK(variance_superpop_independent(m) == doctest::Approx(0.04));

  // nested <= independent, difference exactly sigma_e2 / N before clamping
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    MomentSummary r;
    r.sigma_e2 = unif(gen);
    r.sigma_yhat2 = unif(gen);
    r.n = 2 + rep % 50;
    r.N = r.n + 1 + rep % 100;
    bool clamped = false;
    const double nested = variance_superpop_nested(r, &clamped);
    const double indep = variance_superpop_independent(r);
    CHECK(nested <= indep);
    if (!clamped)
      CHECK(close(indep - nested, r.sigma_e2 / static_cast<double>(r.N)));
  }

  // clamping kicks in when the correction dominates
  MomentSummary tiny;
  tiny.sigma_e2 = 10.0;
  tiny.sigma_yhat2 = 0.0;
  tiny.n = 5;
  tiny.N = 4;  // degenerate on purpose
  bool clamped = false;
  CHECK(variance_superpop_nested(tiny, &clamped) == 0.0);
  CHECK(clamped);
}

TEST_CASE("confidence intervals use normal quantiles") {
  const auto [lo, hi] = confidence_interval(2.5, 0.25, 0.95);
  CHECK(lo == doctest::Approx(1.52).epsilon(0.005));
  CHECK(hi == doctest::Approx(3.48).epsilon(0.005));

  const auto [same_lo, same_hi] = confidence_interval(1.75, 0.0, 0.5);
  CHECK(same_lo == 1.75);
  CHECK(same_hi == 1.75);

  const auto [one_lo, one_hi] = confidence_interval(0.0, 1.0, 0.6827);
  CHECK(one_lo == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(one_hi == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 1.0), Error);
}

TEST_CASE("reports carry method metadata") {
  const StudyData d1 = testutil::d1_study();
  const EstimateReport ppi = ppi_mean(d1);
  CHECK(ppi.method == Method::Ppi);
  CHECK(ppi.variance_mode == VarianceMode::DesignSrswor);
  CHECK(ppi.lambda == 1.0);
  CHECK(ppi.std_error == doctest::Approx(std::sqrt(0.5)));
  CHECK(ppi.ci_low <= ppi.point);
  CHECK(ppi.point <= ppi.ci_high);

  const EstimateReport lab = labeled_only_mean(d1);
  CHECK(lab.lambda == 0.0);
  CHECK(lab.point == doctest::Approx(1.5));
  CHECK(lab.variance == doctest::Approx(0.5 * 0.5 / 2.0));

  const EstimateReport pp = ppi_pp_mean(d1);
  CHECK(pp.method == Method::PpiPlusPlus);
  const auto& notes = pp.notes;
  CHECK(std::find(notes.begin(), notes.end(), "ppipp_variance_plugin") !=
        notes.end());
  CHECK(std::find(notes.begin(), notes.end(),
                  "lambda_estimated_treated_as_fixed") != notes.end());

  // ppipp variance reduces to the ppi formulas at lambda = 1
  const EstimateReport at_one = ppi_pp_mean(d1, 1.0);
  CHECK(at_one.variance == ppi_mean(d1).variance);
}

TEST_CASE("algebraic equivalence with literal transcriptions") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const StudyData s = testutil::random_study(gen, 120);

    // difference estimator, written out directly
    double pred_sum = 0.0;
    for (double v : s.predictions()) pred_sum += v;
    const double pred_mean = pred_sum / static_cast<double>(s.pool_size());
    double resid_sum = 0.0;
    for (std::size_t i = 0; i < s.unit_count(); ++i)
      if (s.labeled_mask()[i]) resid_sum += *s.outcomes()[i] - s.predictions()[i];
    const double diff_estimator =
        pred_mean + resid_sum / static_cast<double>(s.labeled_count());
    CHECK(close(ppi_point(s), diff_estimator));

    // regression estimator with the explicit slope
    const std::vector<double> y = s.labeled_outcome_values();
    const std::vector<double> yhat = s.labeled_prediction_values();
    const double n = static_cast<double>(y.size());
    double my = 0.0, mh = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      my += y[i];
      mh += yhat[i];
    }
    my /= n;
    mh /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      sxy += (yhat[i] - mh) * (y[i] - my);
      sxx += (yhat[i] - mh) * (yhat[i] - mh);
    }
    const double beta = sxy / sxx;
    const double greg = my + beta * (pred_mean - mh);
    CHECK(close(ppi_pp_point(s, lambda_hat(s)), greg));
  }
}

TEST_CASE("exhaustive design oracle on D1") {
  const testutil::Population pop = testutil::d1_population();
  const auto [mean, variance] =
      testutil::enumerate_subsets(pop, 2, [](const StudyData& s) {
        return ppi_point(s);
      });
  CHECK(close(mean, pop.mean_y()));
  CHECK(close(variance, 1.0 / 3.0));
  CHECK(close(variance, variance_design_formula(pop.residual_variance(), 2, 4)));
}
