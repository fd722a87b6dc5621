#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rectify/study.hpp"

namespace rectify {

/// One validated input row. `y` is kept only for labeled rows.
struct StudyCsvRow {
  std::string id;
  std::optional<double> y;
  double y_hat = 0.0;
  bool labeled = false;
  std::optional<int> arm;           // 0 or 1
  std::optional<std::string> stratum;
};

/// Parsed study file. The combined frame is always available; the two-arm
/// and stratified shapes exist when the corresponding column is populated.
struct ParsedStudy {
  std::vector<StudyCsvRow> rows;
  StudyData combined;
  std::optional<TwoArmStudy> two_arm;
  std::optional<StratifiedStudy> stratified;
  std::vector<std::string> group_ids;   // per unit: arm, else stratum, else "all"
  std::vector<std::string> warnings;

  const TwoArmStudy& require_two_arm() const;
  const StratifiedStudy& require_stratified() const;
};

/// Reads `id,y,y_hat,labeled[,arm][,stratum]` (any column order,
/// case-insensitive header). Missing values are empty fields; labeled rows
/// must carry y, unlabeled rows must not (extra y values are dropped with a
/// warning).
ParsedStudy parse_study_csv(const std::string& path);
ParsedStudy parse_study_csv_text(const std::string& text);

}  // namespace rectify
