#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "valsim/error.hpp"
#include "valsim_app/config.hpp"
#include "valsim_app/report.hpp"

namespace valsim::app {

/// Nonzero and distinct per error code.
int exit_code_for(ErrorCode code);

/// Runs the configured command and returns the report without writing it.
Report execute(const RunConfig& config, unsigned threads = 1);

/// Executes, writes the report to config.out ("-" is stdout) and returns
/// the process exit status; diagnostics go to `err`.
int run(const RunConfig& config, unsigned threads, std::ostream& stdout_stream,
        std::ostream& err);

/// Full command-line entry point.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace valsim::app
