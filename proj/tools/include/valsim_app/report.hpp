#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "valsim/decision_utility.hpp"
#include "valsim/pooling_lab.hpp"
#include "valsim_app/config.hpp"

namespace valsim::app {

struct PoolResult {
  std::vector<DeptRecord> departments;
  double pooled = 0.0;
};

using Report = std::variant<BiasTableSet, ValiditySweep, UtilityGrid, PoolResult>;

/// Writes the report, preceded by the embedded config, to `out`.
/// markdown mirrors the published block layout; csv has one row per
/// (cell, criterion, estimator) for simulation results.
void emit_table(std::ostream& out, const Report& report, const RunConfig& config);

std::string emit_table(const Report& report, const RunConfig& config);

/// Recovers the JSON config embedded in a report produced by emit_table.
std::optional<std::string> extract_embedded_config(std::string_view report_text);

/// Six significant digits, as used in csv output.
std::string format_sig6(double value);

/// Three decimals with the leading zero dropped (".600", "-.068").
std::string format_short(double value);

}  // namespace valsim::app
