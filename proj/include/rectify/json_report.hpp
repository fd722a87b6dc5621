#pragma once

#include <string>

#include "rectify/diagnostics.hpp"
#include "rectify/estimator.hpp"
#include "rectify/simulation.hpp"
#include "rectify/stratified.hpp"
#include "rectify/treatment.hpp"

namespace rectify {

inline constexpr int kReportSchemaVersion = 1;

// Reports exchange as JSON objects tagged with `kind` and `schema_version`.
// Rendering sorts keys and is byte-stable for a given report, and parsing a
// rendered report reproduces every field exactly.

std::string render_report(const EstimateReport& report);
std::string render_report(const AteReport& report);
std::string render_report(const AllocationPlan& plan);
std::string render_report(const DiagnosticReport& report);
std::string render_report(const SimulationReport& report);

/// Stratified estimates reuse the estimate schema plus a per-stratum table.
std::string render_stratified_report(const EstimateReport& report,
                                     const StratifiedStudy& study);

EstimateReport parse_estimate_report(const std::string& json_text);
AteReport parse_ate_report(const std::string& json_text);
AllocationPlan parse_allocation_plan(const std::string& json_text);
DiagnosticReport parse_diagnostic_report(const std::string& json_text);
SimulationReport parse_simulation_report(const std::string& json_text);

}  // namespace rectify
