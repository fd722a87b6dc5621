#include "rectify/error.hpp"

namespace rectify {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidStudy: return "InvalidStudy";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::NoLabels: return "NoLabels";
    case Errc::ConstantPredictions: return "ConstantPredictions";
    case Errc::WrongMode: return "WrongMode";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::InvalidFraction: return "InvalidFraction";
    case Errc::InfeasibleBudget: return "InfeasibleBudget";
    case Errc::InvalidGrouping: return "InvalidGrouping";
    case Errc::ZeroOutcomeVariance: return "ZeroOutcomeVariance";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ParseError: return "ParseError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace rectify
