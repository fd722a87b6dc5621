#include <doctest.h>

#include <limits>

#include "helpers.hpp"
#include "rectify/study.hpp"

using namespace rectify;

TEST_CASE("nested study derives mask and counts from outcomes") {
  const StudyData d1 = testutil::d1_study();
  CHECK(d1.pool_kind() == PoolKind::NestedCensus);
  CHECK(d1.pool_size() == 4);
  CHECK(d1.labeled_count() == 2);
  CHECK(d1.labeled_mask() == std::vector<bool>{true, true, false, false});
  CHECK(d1.pool_prediction_mean() == doctest::Approx(2.5));
  CHECK(d1.labeled_outcome_mean() == doctest::Approx(1.5));
  CHECK(d1.labeled_prediction_mean() == doctest::Approx(1.5));
}

TEST_CASE("residuals are exact outcome minus prediction") {
  const StudyData d1 = testutil::d1_study();
  const Residuals r = d1.residuals();
  CHECK(r.values == std::vector<double>{-1.0, 1.0});
  CHECK(r.mean == 0.0);
  CHECK(r.sample_variance == doctest::Approx(2.0));
}

TEST_CASE("study construction rejects bad input") {
  CHECK_THROWS_AS(StudyData::nested({}, {}), Error);
  // no labeled units
  CHECK_THROWS_WITH_AS(StudyData::nested({1.0, 2.0}, {std::nullopt, std::nullopt}),
                       doctest::Contains("NoLabels"), Error);
  // ragged columns
  CHECK_THROWS_AS(StudyData::nested({1.0, 2.0}, {1.0}), Error);
  // non-finite values
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(StudyData::fully_labeled({nan}, {1.0}), Error);
  CHECK_THROWS_AS(StudyData::fully_labeled({1.0}, {nan}), Error);
}

TEST_CASE("independent studies keep the labeled block out of the pool") {
  const StudyData s = StudyData::independent({1.0, 2.0, 3.0, 6.0},
                                             {1.5, 2.5}, {1.0, 2.0});
  CHECK(s.pool_kind() == PoolKind::IndependentSample);
  CHECK(s.unit_count() == 6);
  CHECK(s.pool_size() == 4);
  CHECK(s.labeled_count() == 2);
  CHECK(s.pool_prediction_mean() == doctest::Approx(3.0));
  CHECK(s.labeled_prediction_mean() == doctest::Approx(1.5));
  const Residuals r = s.residuals();
  CHECK(r.values == std::vector<double>{0.5, 0.5});
}

TEST_CASE("two-arm and stratified wrappers validate pool kinds") {
  const StudyData nested = testutil::d1_study();
  const StudyData indep =
      StudyData::independent({1.0, 2.0}, {1.5}, {1.0});
  CHECK_THROWS_AS(TwoArmStudy(indep, nested), Error);
  CHECK_THROWS_AS(StratifiedStudy({{"a", indep}}), Error);
  CHECK_THROWS_AS(StratifiedStudy({{"a", nested}, {"a", nested}}), Error);

  const StratifiedStudy s({{"a", nested}, {"b", nested}});
  CHECK(s.total_units() == 8);
  CHECK(s.total_labeled() == 4);
  CHECK(s.weight(0) == doctest::Approx(0.5));
}
