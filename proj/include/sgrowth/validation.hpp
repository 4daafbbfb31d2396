#pragma once

// Reference checks of the model against its published constants, the
// reference nations and derived bounds.

#include <iosfwd>
#include <string>
#include <vector>

#include "sgrowth/core_types.hpp"

namespace sgrowth {

enum class CheckStatus { Pass, Warn, Fail };

std::string_view to_string(CheckStatus s);

struct Check {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  CheckStatus status = CheckStatus::Fail;
  std::string rule;  ///< how the status was decided, e.g. "|diff| <= 0.1"
};

/// Published recovery rates of the reference nations are compared with the
/// support-share formula: PASS below this difference, WARN up to kRateWarn.
inline constexpr double kRatePass = 0.005;
inline constexpr double kRateWarn = 0.02;

/// Runs every check with the given constants (the published values unless
/// overridden) and the built-in nations.
std::vector<Check> run_validation(const ModelConstants& c);

struct ValidationSummary {
  int pass = 0;
  int warn = 0;
  int fail = 0;
};
ValidationSummary summarize(const std::vector<Check>& checks);

/// Fixed-width table: check, expected, computed, status.
void print_validation(std::ostream& out, const std::vector<Check>& checks);

}  // namespace sgrowth
