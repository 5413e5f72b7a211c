#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "valsim/correlation.hpp"
#include "valsim/pooling_lab.hpp"

namespace valsim::app {

enum class Command { kSimulate, kSweep, kClassify, kPool };
enum class OutputFormat { kMarkdown, kCsv };

std::string_view command_name(Command command);
std::string_view format_name(OutputFormat format);

inline constexpr std::uint64_t kDefaultSeed = 19970521;
inline constexpr std::size_t kDefaultReplications = 1000;

struct SimulateParams {
  /// Full symmetric population matrix, row by row.
  std::vector<std::vector<double>> sigma;
  std::vector<CellShape> cells;
  /// One-based variable labels; empty means every variable.
  std::vector<std::size_t> criteria;
};

struct SweepParams {
  double r12 = 0.6;
  std::vector<ValidityPair> validities;
  std::vector<CellShape> cells;
};

struct ClassifyParams {
  std::vector<double> validities;
  std::vector<double> base_rates;
  std::vector<double> quotas;
};

struct PoolParams {
  std::vector<DeptRecord> departments;
};

/// Everything that determines a report. Thread count is deliberately absent:
/// it cannot change the output.
struct RunConfig {
  Command command = Command::kSimulate;
  OutputFormat format = OutputFormat::kMarkdown;
  std::string out = "-";
  std::uint64_t seed = kDefaultSeed;
  std::size_t replications = kDefaultReplications;
  SimulateParams simulate;
  SweepParams sweep;
  ClassifyParams classify;
  PoolParams pool;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Default grids: the Table-4-style validity sweep and the utility grid.
SweepParams default_sweep();
ClassifyParams default_classify();

/// Parses JSON text. Unknown keys are rejected. `fallback` supplies the
/// command when the text has no "command" key. Throws Error with kParseError
/// (malformed text, wrong types; message carries line or field) or
/// kValidationError (range violations).
RunConfig parse_config(std::string_view text, Command fallback = Command::kSimulate);

/// Fills defaults for unset grids and checks every range. Throws
/// kValidationError naming the violated bound.
void finalize_config(RunConfig& config);

/// Canonical single-line JSON; parse_config(to_json_text(c)) == c.
std::string to_json_text(const RunConfig& config);

/// Builds the harness designs for a simulate config.
std::vector<SimDesign> simulate_designs(const RunConfig& config);

}  // namespace valsim::app
