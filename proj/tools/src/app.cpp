#include "valsim_app/app.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace valsim::app {

int exit_code_for(ErrorCode code) { return 10 + static_cast<int>(code); }

Report execute(const RunConfig& config, unsigned threads) {
  switch (config.command) {
    case Command::kSimulate: {
      const std::vector<SimDesign> designs = simulate_designs(config);
      return reproduce_bias_tables(designs, threads);
    }
    case Command::kSweep:
      return validity_sweep(config.sweep.validities, config.sweep.r12, config.sweep.cells,
                            config.replications, config.seed, threads);
    case Command::kClassify:
      return table5b(config.classify.validities, config.classify.base_rates,
                     config.classify.quotas);
    case Command::kPool:
      return PoolResult{config.pool.departments, pool_departments(config.pool.departments)};
  }
  raise(ErrorCode::kInvalidArgument, "unknown command");
}

int run(const RunConfig& config, unsigned threads, std::ostream& stdout_stream,
        std::ostream& err) {
  try {
    const std::string text = emit_table(execute(config, threads), config);
    if (config.out == "-") {
      stdout_stream << text;
      stdout_stream.flush();
      if (!stdout_stream) raise(ErrorCode::kIoError, "failed to write to standard output");
    } else {
      std::ofstream file(config.out, std::ios::binary);
      if (!file) raise(ErrorCode::kIoError, "cannot open '" + config.out + "' for writing");
      file << text;
      if (!file) raise(ErrorCode::kIoError, "failed to write '" + config.out + "'");
    }
    return 0;
  } catch (const Error& e) {
    err << "valsim: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    err << "valsim: out of memory\n";
    return 2;
  }
}

namespace {

DeptRecord parse_dept(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    raise(ErrorCode::kParseError, "--dept expects N:R, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const std::string n_text = text.substr(0, colon);
    const std::string r_text = text.substr(colon + 1);
    const long long n = std::stoll(n_text, &used);
    if (used != n_text.size()) throw std::invalid_argument(n_text);
    const double r = std::stod(r_text, &used);
    if (used != r_text.size()) throw std::invalid_argument(r_text);
    if (n < 0) raise(ErrorCode::kValidationError, "--dept n must be >= 1");
    return DeptRecord{static_cast<std::size_t>(n), r};
  } catch (const std::logic_error&) {
    raise(ErrorCode::kParseError, "--dept expects N:R, got '" + text + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo study of pooled validity estimates and decision utility of tests"};
  app.name(args.empty() ? "valsim" : args.front());
  app.require_subcommand(1);

  std::string config_path, format, out_path;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  unsigned threads = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--replications", replications, "Replications per cell");
    sub->add_option("--format", format, "markdown or csv")->check(CLI::IsMember({"markdown", "csv"}));
    sub->add_option("--out", out_path, "Output file ('-' for standard output)");
    sub->add_option("--threads", threads, "Worker threads (does not change results)")
        ->check(CLI::Range(1u, 1024u));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Pooling-bias simulation for one population matrix");
  CLI::App* sweep = app.add_subcommand("sweep", "Bias across validity levels and sub-sample sizes");
  CLI::App* classify = app.add_subcommand("classify", "Fourfold tables, gain and hit rate");
  CLI::App* pool = app.add_subcommand("pool", "Weighted pooling of reported departmental R");
  for (CLI::App* sub : {simulate, sweep, classify, pool}) add_common(sub);

  std::size_t nss = 0, sss = 0;
  std::vector<std::size_t> criteria;
  auto* nss_opt = simulate->add_option("--nss", nss, "Number of sub-samples");
  auto* sss_opt = simulate->add_option("--sss", sss, "Sub-sample size");
  nss_opt->needs(sss_opt);
  sss_opt->needs(nss_opt);
  simulate->add_option("--criterion", criteria, "Criterion variable (1-based), repeatable");

  double r12 = 0.0;
  auto* r12_opt = sweep->add_option("--r12", r12, "Correlation between the two predictors");

  std::vector<double> validities, base_rates, quotas;
  classify->add_option("--validity", validities, "Test validity, repeatable");
  classify->add_option("--base-rate", base_rates, "Positive base rate, repeatable");
  classify->add_option("--quota", quotas, "Admission quota, repeatable");

  std::vector<std::string> depts;
  pool->add_option("--dept", depts, "Department as N:R, repeatable");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    Command command = Command::kSimulate;
    CLI::App* active = simulate;
    if (sweep->parsed()) { command = Command::kSweep; active = sweep; }
    if (classify->parsed()) { command = Command::kClassify; active = classify; }
    if (pool->parsed()) { command = Command::kPool; active = pool; }

    RunConfig config;
    config.command = command;
    if (!config_path.empty()) {
      config = parse_config(read_file(config_path), command);
      if (config.command != command) {
        raise(ErrorCode::kValidationError,
              "config is for '" + std::string(command_name(config.command)) +
                  "' but the subcommand is '" + std::string(command_name(command)) + "'");
      }
    }
    if (active->count("--seed")) config.seed = seed;
    if (active->count("--replications")) config.replications = replications;
    if (active->count("--format")) config.format = format == "csv" ? OutputFormat::kCsv : OutputFormat::kMarkdown;
    if (active->count("--out")) config.out = out_path;
    if (nss_opt->count()) config.simulate.cells = {CellShape{nss, sss}};
    if (!criteria.empty()) config.simulate.criteria = criteria;
    if (r12_opt->count()) config.sweep.r12 = r12;
    if (!validities.empty()) config.classify.validities = validities;
    if (!base_rates.empty()) config.classify.base_rates = base_rates;
    if (!quotas.empty()) config.classify.quotas = quotas;
    if (!depts.empty()) {
      config.pool.departments.clear();
      for (const auto& d : depts) config.pool.departments.push_back(parse_dept(d));
    }
    finalize_config(config);
    return run(config, threads, out, err);
  } catch (const Error& e) {
    err << "valsim: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace valsim::app
