#include "rectify/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rectify {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& value, int line, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v))
      fail(Errc::ParseError, "line " + std::to_string(line) +
                                 ": non-numeric " + column + " '" + value + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::ParseError, "line " + std::to_string(line) + ": non-numeric " +
                               column + " '" + value + "'");
  }
}

StudyData build_study(const std::vector<const StudyCsvRow*>& rows) {
  std::vector<double> predictions;
  std::vector<std::optional<double>> outcomes;
  predictions.reserve(rows.size());
  outcomes.reserve(rows.size());
  for (const StudyCsvRow* row : rows) {
    predictions.push_back(row->y_hat);
    outcomes.push_back(row->labeled ? row->y : std::nullopt);
  }
  return StudyData::nested(std::move(predictions), std::move(outcomes));
}

}  // namespace

const TwoArmStudy& ParsedStudy::require_two_arm() const {
  require(two_arm.has_value(), Errc::SchemaError,
          "this command needs an 'arm' column with values 0/1");
  return *two_arm;
}

const StratifiedStudy& ParsedStudy::require_stratified() const {
  require(stratified.has_value(), Errc::SchemaError,
          "this command needs a populated 'stratum' column");
  return *stratified;
}

ParsedStudy parse_study_csv_text(const std::string& text) {
  std::stringstream stream(text);
  std::string raw;
  int line = 0;

  require(std::getline(stream, raw), Errc::SchemaError, "empty file");
  ++line;
  const std::vector<std::string> header = split_fields(raw);
  std::map<std::string, std::size_t> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = lower(header[c]);
    require(name == "id" || name == "y" || name == "y_hat" ||
                name == "labeled" || name == "arm" || name == "stratum",
            Errc::SchemaError, "line 1: unknown column '" + header[c] + "'");
    require(columns.emplace(name, c).second, Errc::SchemaError,
            "line 1: duplicate column '" + name + "'");
  }
  for (const char* needed : {"id", "y", "y_hat", "labeled"})
    require(columns.count(needed) == 1, Errc::SchemaError,
            "line 1: missing column '" + std::string(needed) + "'");

  auto field = [&](const std::vector<std::string>& fields,
                   const char* name) -> std::string {
    const auto it = columns.find(name);
    if (it == columns.end() || it->second >= fields.size()) return "";
    return fields[it->second];
  };

  std::vector<StudyCsvRow> rows;
  std::vector<std::string> warnings;
  while (std::getline(stream, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const std::vector<std::string> fields = split_fields(raw);
    require(fields.size() <= header.size(), Errc::ParseError,
            "line " + std::to_string(line) + ": too many fields");

    StudyCsvRow row;
    row.id = field(fields, "id");
    require(!row.id.empty(), Errc::SchemaError,
            "line " + std::to_string(line) + ": missing id");

    const std::string labeled = field(fields, "labeled");
    if (labeled == "0")
      row.labeled = false;
    else if (labeled == "1")
      row.labeled = true;
    else
      fail(Errc::SchemaError, "line " + std::to_string(line) +
                                  ": labeled must be 0 or 1, got '" + labeled +
                                  "'");

    const std::string y_hat = field(fields, "y_hat");
    require(!y_hat.empty(), Errc::SchemaError,
            "line " + std::to_string(line) + ": missing y_hat");
    row.y_hat = parse_number(y_hat, line, "y_hat");

    const std::string y = field(fields, "y");
    if (row.labeled) {
      require(!y.empty(), Errc::SchemaError,
              "line " + std::to_string(line) + ": labeled row without y");
      row.y = parse_number(y, line, "y");
    } else if (!y.empty()) {
      warnings.push_back("line " + std::to_string(line) +
                         ": y ignored on unlabeled row");
    }

    const std::string arm = field(fields, "arm");
    if (!arm.empty()) {
      if (arm == "0")
        row.arm = 0;
      else if (arm == "1")
        row.arm = 1;
      else
        fail(Errc::SchemaError, "line " + std::to_string(line) +
                                    ": arm must be 0 or 1, got '" + arm + "'");
    }

    const std::string stratum = field(fields, "stratum");
    if (!stratum.empty()) row.stratum = stratum;

    rows.push_back(std::move(row));
  }
  require(!rows.empty(), Errc::SchemaError, "no data rows");

  // A partially filled optional column is ambiguous; demand all or nothing.
  const bool has_arm =
      std::any_of(rows.begin(), rows.end(),
                  [](const StudyCsvRow& r) { return r.arm.has_value(); });
  const bool has_stratum =
      std::any_of(rows.begin(), rows.end(),
                  [](const StudyCsvRow& r) { return r.stratum.has_value(); });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(!has_arm || rows[i].arm.has_value(), Errc::SchemaError,
            "row '" + rows[i].id + "': arm missing while others set it");
    require(!has_stratum || rows[i].stratum.has_value(), Errc::SchemaError,
            "row '" + rows[i].id + "': stratum missing while others set it");
  }

  std::vector<const StudyCsvRow*> all;
  all.reserve(rows.size());
  for (const StudyCsvRow& r : rows) all.push_back(&r);

  ParsedStudy parsed{.rows = {},
                     .combined = build_study(all),
                     .two_arm = std::nullopt,
                     .stratified = std::nullopt,
                     .group_ids = {},
                     .warnings = std::move(warnings)};

  if (has_arm) {
    std::vector<const StudyCsvRow*> arm0, arm1;
    for (const StudyCsvRow& r : rows)
      (*r.arm == 0 ? arm0 : arm1).push_back(&r);
    require(!arm0.empty() && !arm1.empty(), Errc::SchemaError,
            "two-arm file must contain both arms");
    parsed.two_arm.emplace(build_study(arm0), build_study(arm1));
  }

  if (has_stratum) {
    std::map<std::string, std::vector<const StudyCsvRow*>> by_stratum;
    for (const StudyCsvRow& r : rows) by_stratum[*r.stratum].push_back(&r);
    std::vector<Stratum> strata;
    for (const auto& [id, members] : by_stratum) {
      const bool any_labeled =
          std::any_of(members.begin(), members.end(),
                      [](const StudyCsvRow* r) { return r->labeled; });
      require(any_labeled, Errc::NoLabels,
              "stratum '" + id + "' has no labeled units");
      strata.push_back({id, build_study(members)});
    }
    parsed.stratified.emplace(std::move(strata));
  }

  parsed.group_ids.reserve(rows.size());
  for (const StudyCsvRow& r : rows) {
    if (has_arm)
      parsed.group_ids.push_back("arm" + std::to_string(*r.arm));
    else if (has_stratum)
      parsed.group_ids.push_back(*r.stratum);
    else
      parsed.group_ids.push_back("all");
  }

  parsed.rows = std::move(rows);
  return parsed;
}

ParsedStudy parse_study_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::ParseError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_study_csv_text(buffer.str());
}

}  // namespace rectify
