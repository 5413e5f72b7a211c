#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "valsim/error.hpp"
#include "valsim_app/app.hpp"
#include "valsim_app/config.hpp"
#include "valsim_app/report.hpp"

namespace valsim::app {
namespace {

const std::string kDataDir = VALSIM_TEST_DATA_DIR;

std::optional<ErrorCode> code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

struct Invocation {
  int status = 0;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "valsim");
  std::ostringstream out, err;
  const int status = main_with_args(args, out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("valsim_test_" + name);
}

TEST(ParseConfig, MinimalSimulateDefaultsCriteria) {
  const RunConfig c = parse_config(R"({"command": "simulate",
      "simulate": {"sigma": [[1, 0.6, 0.2], [0.6, 1, 0.3], [0.2, 0.3, 1]],
                   "cells": [{"nss": 40, "sss": 25}]}})");
  EXPECT_EQ(c.command, Command::kSimulate);
  EXPECT_EQ(c.simulate.criteria, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(c.replications, kDefaultReplications);
  EXPECT_EQ(c.seed, kDefaultSeed);
  EXPECT_EQ(c.format, OutputFormat::kMarkdown);
}

TEST(ParseConfig, AcceptsThirteenBySeventySeven) {
  const RunConfig c = parse_config(R"({"simulate": {"sigma": [[1, 0], [0, 1]],
      "cells": [{"nss": 13, "sss": 77}]}})");
  EXPECT_EQ(simulate_designs(c).front().total_size(), 1001u);
}

TEST(ParseConfig, RejectsTooSmallSubsamples) {
  EXPECT_EQ(code_of([] {
              parse_config(R"({"simulate": {"sigma": [[1,0.6,0.2],[0.6,1,0.3],[0.2,0.3,1]],
                  "cells": [{"nss": 40, "sss": 3}]}})");
            }),
            ErrorCode::kValidationError);
}

TEST(ParseConfig, RejectsUnknownFields) {
  try {
    parse_config(R"({"command": "pool", "pool": {"departments": [{"n": 3, "r": 0.2, "w": 1}]}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("pool.departments[0].w"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_config(R"({"replicates": 10})"); }), ErrorCode::kParseError);
}

TEST(ParseConfig, MalformedTextReportsLine) {
  try {
    parse_config("{\n  \"command\": \"pool\",\n  \"seed\": ,\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, TypeAndRangeErrors) {
  EXPECT_EQ(code_of([] { parse_config(R"({"seed": "abc"})"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_config(R"({"seed": -4})"); }), ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "classify", "classify": {"quotas": [1.0]}})"); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "sweep", "pool": {}})"); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] { parse_config(R"({"command": "explode"})"); }),
            ErrorCode::kValidationError);
  EXPECT_EQ(code_of([] {
              parse_config(R"({"simulate": {"sigma": [[1, 0.5], [0.4, 1]], "cells": [{"nss": 2, "sss": 9}]}})");
            }),
            ErrorCode::kValidationError);
}

RunConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::uniform_int_distribution<int> pick(0, 3);
  RunConfig c;
  c.seed = rng();
  c.replications = 1 + rng() % 5000;
  c.format = rng() % 2 ? OutputFormat::kCsv : OutputFormat::kMarkdown;
  c.out = rng() % 2 ? "-" : "report_" + std::to_string(rng() % 100) + ".txt";
  switch (pick(rng)) {
    case 0: {
      c.command = Command::kSimulate;
      const double r = u(rng) - 0.5;
      c.simulate.sigma = {{1.0, r}, {r, 1.0}};
      c.simulate.cells = {{1 + rng() % 40, 4 + rng() % 100}};
      break;
    }
    case 1:
      c.command = Command::kSweep;
      c.sweep.r12 = u(rng) - 0.5;
      c.sweep.validities = {{u(rng) / 3, u(rng) / 3}};
      c.sweep.cells = {{1 + rng() % 40, 5 + rng() % 100}, {3, 8}};
      break;
    case 2:
      c.command = Command::kClassify;
      c.classify = {{u(rng)}, {u(rng), u(rng)}, {u(rng)}};
      break;
    default:
      c.command = Command::kPool;
      c.pool.departments = {{1 + rng() % 400, u(rng)}, {1 + rng() % 400, u(rng)}};
  }
  finalize_config(c);
  return c;
}

TEST(ConfigRoundTrip, EmbeddedConfigReparsesExactly) {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 200; ++i) {
    const RunConfig c = random_config(rng);
    EXPECT_TRUE(parse_config(to_json_text(c)) == c) << to_json_text(c);
  }
}

TEST(ConfigRoundTrip, ThroughEmittedReport) {
  RunConfig c;
  c.command = Command::kPool;
  c.pool.departments = {{85, 0.436}, {49, 0.498}};
  finalize_config(c);
  for (OutputFormat f : {OutputFormat::kMarkdown, OutputFormat::kCsv}) {
    c.format = f;
    const std::string report = emit_table(execute(c), c);
    const auto embedded = extract_embedded_config(report);
    ASSERT_TRUE(embedded.has_value());
    EXPECT_TRUE(parse_config(*embedded) == c);
  }
}

TEST(EmitTable, NullCriterionBiasRowsNegative) {
  RunConfig c = parse_config(R"({"replications": 200, "seed": 3,
      "simulate": {"sigma": [[1, 0.6, 0], [0.6, 1, 0], [0, 0, 1]], "cells": [{"nss": 40, "sss": 25}]}})");
  const auto report = std::get<BiasTableSet>(execute(c));
  const EstimateRecord& e = report.blocks.front().per_criterion[2];
  EXPECT_LT(e.bias_pda, 0.0);
  EXPECT_LT(e.bias_agr, 0.0);
  EXPECT_LT(e.bias_sum, 0.0);
  const std::string md = emit_table(report, c);
  EXPECT_NE(md.find("| estimate | pop | .600 | .600 | .000 |"), std::string::npos) << md;
  for (const char* label : {"pop-pda", "pop-agr", "pop-sum", "| diff |"}) {
    EXPECT_NE(md.find(label), std::string::npos) << label;
  }
  // Criterion 3 is the last column of each bias row.
  std::istringstream lines(md);
  std::string line;
  int bias_rows = 0;
  while (std::getline(lines, line)) {
    if (line.find("| pop-") == std::string::npos) continue;
    ++bias_rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '|')) cells.push_back(cell);
    EXPECT_EQ(cells[5].find('-'), 1u) << line;
  }
  EXPECT_EQ(bias_rows, 3);
}

TEST(EmitTable, CsvSchema) {
  RunConfig c = parse_config(R"({"replications": 5, "format": "csv",
      "simulate": {"sigma": [[1, 0.6, 0.2], [0.6, 1, 0.3], [0.2, 0.3, 1]],
                   "cells": [{"nss": 20, "sss": 50}], "criteria": [3]}})");
  const std::string csv = emit_table(execute(c), c);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_TRUE(line.starts_with("# config: "));
  std::getline(lines, line);
  EXPECT_EQ(line, "nss,sss,replications,criterion,estimator,estimate,bias,mc_se,seed");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_TRUE(line.starts_with("20,50,5,3,")) << line;
  }
  EXPECT_EQ(rows, 4);
}

TEST(EmitTable, SingleReplicationMarksStandardErrorUnavailable) {
  RunConfig c = parse_config(R"({"replications": 1, "format": "csv",
      "simulate": {"sigma": [[1, 0.6], [0.6, 1]], "cells": [{"nss": 4, "sss": 10}]}})");
  const std::string csv = emit_table(execute(c), c);
  EXPECT_NE(csv.find(",pda,"), std::string::npos);
  EXPECT_NE(csv.find(",NA,"), std::string::npos);
}

TEST(EmitTable, EmptyInputs) {
  RunConfig c;
  c.command = Command::kSweep;
  EXPECT_EQ(code_of([&] { emit_table(Report{ValiditySweep{}}, c); }), ErrorCode::kEmptyInput);
  c.command = Command::kSimulate;
  EXPECT_EQ(code_of([&] { emit_table(Report{BiasTableSet{}}, c); }), ErrorCode::kEmptyInput);
}

TEST(EmitTable, UtilityGridColumns) {
  RunConfig c;
  c.command = Command::kClassify;
  finalize_config(c);
  const std::string md = emit_table(execute(c), c);
  EXPECT_NE(md.find("%C r=.150 | G/L | HR |"), std::string::npos);
  EXPECT_NE(md.find("| 60 | 70 |"), std::string::npos);
}

TEST(EmitTable, NumberFormats) {
  EXPECT_EQ(format_short(0.6), ".600");
  EXPECT_EQ(format_short(-0.0681), "-.068");
  EXPECT_EQ(format_short(-0.0001), ".000");
  EXPECT_EQ(format_short(1.0), "1.000");
  EXPECT_EQ(format_sig6(0.4586716417910448), "0.458672");
  EXPECT_EQ(format_sig6(-0.0), "0");
}

TEST(Run, ClassifyIllustration) {
  const Invocation r = invoke({"classify", "--validity", ".15", "--base-rate", ".6", "--quota", ".3"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("gain over random admission: -.100"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("hit rate: .333"), std::string::npos);
}

TEST(Run, ClassifyCsvGain) {
  const Invocation r = invoke({"classify", "--validity", ".15", "--base-rate", ".6", "--quota", ".3",
                               "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  std::getline(lines, line);
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  ASSERT_EQ(fields.size(), 13u);
  EXPECT_NEAR(std::stod(fields[8]), -0.10, 0.005);
}

TEST(Run, PoolIllustration) {
  const Invocation r = invoke({"pool", "--dept", "85:.436", "--dept", "49:.498"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("Pooled R (weighted by n): .459"), std::string::npos) << r.out;
}

TEST(Run, SimulateTwiceIsByteIdentical) {
  const auto a = temp_path("a.csv"), b = temp_path("b.csv");
  const std::string config = kDataDir + "/null_criterion.json";
  const Invocation first = invoke({"simulate", "--config", config, "--out", a.string()});
  const Invocation second =
      invoke({"simulate", "--config", config, "--out", b.string(), "--threads", "3"});
  ASSERT_EQ(first.status, 0) << first.err;
  ASSERT_EQ(second.status, 0) << second.err;
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  // --out differs, so compare everything after the embedded config line.
  const std::string x = slurp(a), y = slurp(b);
  ASSERT_FALSE(x.empty());
  EXPECT_EQ(x.substr(x.find('\n')), y.substr(y.find('\n')));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Run, FlagsOverrideConfig) {
  const Invocation r = invoke({"simulate", "--config", kDataDir + "/correlated.json", "--nss", "20",
                               "--sss", "50", "--replications", "3", "--seed", "5", "--format",
                               "csv", "--criterion", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("\"replications\":3"), std::string::npos);
  EXPECT_NE(r.out.find("20,50,3,3,pda,"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("40,25"), std::string::npos);
}

TEST(Run, ErrorsExitNonzeroWithDiagnostic) {
  const Invocation small =
      invoke({"simulate", "--config", kDataDir + "/correlated.json", "--nss", "40", "--sss", "3"});
  EXPECT_EQ(small.status, exit_code_for(ErrorCode::kValidationError));
  EXPECT_NE(small.err.find("below p + 2"), std::string::npos) << small.err;

  const Invocation missing = invoke({"simulate", "--config", "/nonexistent/valsim.json"});
  EXPECT_EQ(missing.status, exit_code_for(ErrorCode::kIoError));

  const Invocation no_sigma = invoke({"simulate"});
  EXPECT_EQ(no_sigma.status, exit_code_for(ErrorCode::kValidationError));
  EXPECT_NE(no_sigma.err.find("simulate.sigma"), std::string::npos);

  const Invocation bad_dept = invoke({"pool", "--dept", "85-.4"});
  EXPECT_EQ(bad_dept.status, exit_code_for(ErrorCode::kParseError));

  const Invocation bad_rate = invoke({"classify", "--base-rate", "1"});
  EXPECT_EQ(bad_rate.status, exit_code_for(ErrorCode::kValidationError));

  const Invocation mismatch = invoke({"sweep", "--config", kDataDir + "/correlated.json"});
  EXPECT_EQ(mismatch.status, exit_code_for(ErrorCode::kValidationError));

  const Invocation unwritable =
      invoke({"pool", "--dept", "5:.3", "--out", "/nonexistent/dir/out.md"});
  EXPECT_EQ(unwritable.status, exit_code_for(ErrorCode::kIoError));

  const Invocation indefinite = [] {
    const auto path = temp_path("indefinite.json");
    std::ofstream(path) << R"({"simulate": {"sigma": [[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]],
                                "cells": [{"nss": 2, "sss": 10}]}, "replications": 2})";
    auto r = invoke({"simulate", "--config", path.string()});
    std::filesystem::remove(path);
    return r;
  }();
  EXPECT_EQ(indefinite.status, exit_code_for(ErrorCode::kNotPositiveSemidefinite));
  EXPECT_NE(indefinite.err.find("NotPositiveSemidefinite"), std::string::npos);

  EXPECT_NE(invoke({}).status, 0);
  EXPECT_NE(invoke({"frobnicate"}).status, 0);
}

TEST(Run, ExitCodesAreDistinct) {
  std::set<int> seen;
  for (int c = 1; c <= static_cast<int>(ErrorCode::kIoError); ++c) {
    const int code = exit_code_for(static_cast<ErrorCode>(c));
    EXPECT_NE(code, 0);
    EXPECT_TRUE(seen.insert(code).second);
  }
}

}  // namespace
}  // namespace valsim::app
