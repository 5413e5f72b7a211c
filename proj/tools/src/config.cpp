#include "valsim_app/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "valsim/error.hpp"

namespace valsim::app {

using nlohmann::json;

std::string_view command_name(Command command) {
  switch (command) {
    case Command::kSimulate: return "simulate";
    case Command::kSweep: return "sweep";
    case Command::kClassify: return "classify";
    case Command::kPool: return "pool";
  }
  return "?";
}

std::string_view format_name(OutputFormat format) {
  return format == OutputFormat::kCsv ? "csv" : "markdown";
}

namespace {

bool same(const CellShape& a, const CellShape& b) { return a.nss == b.nss && a.sss == b.sss; }
bool same(const ValidityPair& a, const ValidityPair& b) { return a.v1 == b.v1 && a.v2 == b.v2; }
bool same(const DeptRecord& a, const DeptRecord& b) { return a.n == b.n && a.r == b.r; }

template <typename T>
bool same_list(const std::vector<T>& a, const std::vector<T>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const T& x, const T& y) { return same(x, y); });
}

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
  raise(ErrorCode::kParseError, "field '" + field + "': " + what);
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  raise(ErrorCode::kValidationError, field + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) parse_fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      parse_fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::uint64_t as_unsigned(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer()) invalid(path, "must be nonnegative");
    parse_fail(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) parse_fail(path, "expected a number");
  return v.get<double>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) parse_fail(path, "expected an array");
  return v;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  std::vector<double> out;
  const json& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_double(arr[i], index_path(path, i)));
  return out;
}

std::vector<CellShape> cell_list(const json& v, const std::string& path) {
  std::vector<CellShape> out;
  const json& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = index_path(path, i);
    reject_unknown(arr[i], at, {"nss", "sss"});
    if (!arr[i].contains("nss") || !arr[i].contains("sss")) parse_fail(at, "needs nss and sss");
    out.push_back({as_unsigned(arr[i]["nss"], at + ".nss"), as_unsigned(arr[i]["sss"], at + ".sss")});
  }
  return out;
}

Command parse_command(const json& v, const std::string& path) {
  if (!v.is_string()) parse_fail(path, "expected a string");
  const auto s = v.get<std::string>();
  for (Command c : {Command::kSimulate, Command::kSweep, Command::kClassify, Command::kPool}) {
    if (s == command_name(c)) return c;
  }
  invalid(path, "unknown command '" + s + "'");
}

OutputFormat parse_format(const json& v, const std::string& path) {
  if (!v.is_string()) parse_fail(path, "expected a string");
  const auto s = v.get<std::string>();
  if (s == "markdown") return OutputFormat::kMarkdown;
  if (s == "csv") return OutputFormat::kCsv;
  invalid(path, "format must be markdown or csv, got '" + s + "'");
}

void read_simulate(const json& obj, SimulateParams& p) {
  const std::string path = "simulate";
  reject_unknown(obj, path, {"sigma", "cells", "criteria"});
  if (obj.contains("sigma")) {
    const json& rows = as_array(obj["sigma"], "simulate.sigma");
    p.sigma.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      p.sigma.push_back(number_list(rows[i], index_path("simulate.sigma", i)));
    }
  }
  if (obj.contains("cells")) p.cells = cell_list(obj["cells"], "simulate.cells");
  if (obj.contains("criteria")) {
    const json& arr = as_array(obj["criteria"], "simulate.criteria");
    p.criteria.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      p.criteria.push_back(as_unsigned(arr[i], index_path("simulate.criteria", i)));
    }
  }
}

void read_sweep(const json& obj, SweepParams& p) {
  reject_unknown(obj, "sweep", {"r12", "validities", "cells"});
  if (obj.contains("r12")) p.r12 = as_double(obj["r12"], "sweep.r12");
  if (obj.contains("validities")) {
    const json& arr = as_array(obj["validities"], "sweep.validities");
    p.validities.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string at = index_path("sweep.validities", i);
      const auto pair = number_list(arr[i], at);
      if (pair.size() != 2) parse_fail(at, "expected a pair [v1, v2]");
      p.validities.push_back({pair[0], pair[1]});
    }
  }
  if (obj.contains("cells")) p.cells = cell_list(obj["cells"], "sweep.cells");
}

void read_classify(const json& obj, ClassifyParams& p) {
  reject_unknown(obj, "classify", {"validities", "base_rates", "quotas"});
  if (obj.contains("validities")) p.validities = number_list(obj["validities"], "classify.validities");
  if (obj.contains("base_rates")) p.base_rates = number_list(obj["base_rates"], "classify.base_rates");
  if (obj.contains("quotas")) p.quotas = number_list(obj["quotas"], "classify.quotas");
}

void read_pool(const json& obj, PoolParams& p) {
  reject_unknown(obj, "pool", {"departments"});
  if (!obj.contains("departments")) return;
  const json& arr = as_array(obj["departments"], "pool.departments");
  p.departments.clear();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = index_path("pool.departments", i);
    reject_unknown(arr[i], at, {"n", "r"});
    if (!arr[i].contains("n") || !arr[i].contains("r")) parse_fail(at, "needs n and r");
    p.departments.push_back({as_unsigned(arr[i]["n"], at + ".n"), as_double(arr[i]["r"], at + ".r")});
  }
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void check_cells(const std::vector<CellShape>& cells, std::size_t p, const std::string& path) {
  if (cells.empty()) invalid(path, "at least one (nss, sss) cell is required");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string at = index_path(path, i);
    if (cells[i].nss < 1) invalid(at + ".nss", "must be >= 1");
    if (cells[i].sss < p + 2) {
      invalid(at + ".sss", "sss = " + std::to_string(cells[i].sss) + " is below p + 2 = " +
                               std::to_string(p + 2));
    }
  }
}

void check_range(double v, double lo, double hi, bool open, const std::string& path) {
  const bool ok = open ? (v > lo && v < hi) : (v >= lo && v <= hi);
  if (!ok || std::isnan(v)) {
    invalid(path, "value " + std::to_string(v) + " outside " + (open ? "(" : "[") +
                      std::to_string(lo) + ", " + std::to_string(hi) + (open ? ")" : "]"));
  }
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.format == b.format && a.out == b.out &&
         a.seed == b.seed && a.replications == b.replications &&
         a.simulate.sigma == b.simulate.sigma && same_list(a.simulate.cells, b.simulate.cells) &&
         a.simulate.criteria == b.simulate.criteria && a.sweep.r12 == b.sweep.r12 &&
         same_list(a.sweep.validities, b.sweep.validities) &&
         same_list(a.sweep.cells, b.sweep.cells) &&
         a.classify.validities == b.classify.validities &&
         a.classify.base_rates == b.classify.base_rates &&
         a.classify.quotas == b.classify.quotas &&
         same_list(a.pool.departments, b.pool.departments);
}

SweepParams default_sweep() {
  return SweepParams{0.6,
                     {{0.0, 0.0}, {0.1, 0.1}, {0.1, 0.2}, {0.2, 0.3}, {0.4, 0.2}},
                     {{40, 25}, {20, 50}, {13, 77}}};
}

ClassifyParams default_classify() {
  return ClassifyParams{{0.50, 0.30, 0.15},
                        {0.50, 0.55, 0.60, 0.65, 0.70},
                        {0.70, 0.60, 0.50, 0.40, 0.30}};
}

RunConfig parse_config(std::string_view text, Command fallback) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    raise(ErrorCode::kParseError,
          "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  reject_unknown(doc, "", {"command", "format", "out", "seed", "replications", "simulate",
                           "sweep", "classify", "pool"});
  RunConfig config;
  config.command = doc.contains("command") ? parse_command(doc["command"], "command") : fallback;
  if (doc.contains("format")) config.format = parse_format(doc["format"], "format");
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) parse_fail("out", "expected a string");
    config.out = doc["out"].get<std::string>();
  }
  if (doc.contains("seed")) config.seed = as_unsigned(doc["seed"], "seed");
  if (doc.contains("replications")) config.replications = as_unsigned(doc["replications"], "replications");

  for (Command c : {Command::kSimulate, Command::kSweep, Command::kClassify, Command::kPool}) {
    const std::string key(command_name(c));
    if (doc.contains(key) && c != config.command) {
      invalid(key, "section does not apply to command '" +
                       std::string(command_name(config.command)) + "'");
    }
  }
  if (doc.contains("simulate")) read_simulate(doc["simulate"], config.simulate);
  if (doc.contains("sweep")) read_sweep(doc["sweep"], config.sweep);
  if (doc.contains("classify")) read_classify(doc["classify"], config.classify);
  if (doc.contains("pool")) read_pool(doc["pool"], config.pool);
  finalize_config(config);
  return config;
}

void finalize_config(RunConfig& config) {
  if (config.replications < 1) invalid("replications", "must be >= 1");
  switch (config.command) {
    case Command::kSimulate: {
      auto& s = config.simulate;
      if (s.sigma.empty()) invalid("simulate.sigma", "a population correlation matrix is required");
      const std::size_t p = s.sigma.size();
      Matrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
      for (std::size_t i = 0; i < p; ++i) {
        if (s.sigma[i].size() != p) invalid(index_path("simulate.sigma", i), "matrix must be square");
        for (std::size_t j = 0; j < p; ++j) {
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s.sigma[i][j];
        }
      }
      if (p < 2) invalid("simulate.sigma", "at least 2 variables are required");
      try {
        CorrelationMatrix check(m);
      } catch (const Error& e) {
        invalid("simulate.sigma", e.what());
      }
      check_cells(s.cells, p, "simulate.cells");
      if (s.criteria.empty()) {
        for (std::size_t i = 1; i <= p; ++i) s.criteria.push_back(i);
      }
      for (std::size_t i = 0; i < s.criteria.size(); ++i) {
        if (s.criteria[i] < 1 || s.criteria[i] > p) {
          invalid(index_path("simulate.criteria", i),
                  "criterion " + std::to_string(s.criteria[i]) + " is not in 1.." + std::to_string(p));
        }
      }
      break;
    }
    case Command::kSweep: {
      auto& s = config.sweep;
      const SweepParams defaults = default_sweep();
      if (s.validities.empty()) s.validities = defaults.validities;
      if (s.cells.empty()) s.cells = defaults.cells;
      check_range(s.r12, -1.0, 1.0, false, "sweep.r12");
      for (std::size_t i = 0; i < s.validities.size(); ++i) {
        check_range(s.validities[i].v1, -1.0, 1.0, false, index_path("sweep.validities", i));
        check_range(s.validities[i].v2, -1.0, 1.0, false, index_path("sweep.validities", i));
      }
      check_cells(s.cells, 3, "sweep.cells");
      break;
    }
    case Command::kClassify: {
      auto& c = config.classify;
      const ClassifyParams defaults = default_classify();
      if (c.validities.empty()) c.validities = defaults.validities;
      if (c.base_rates.empty()) c.base_rates = defaults.base_rates;
      if (c.quotas.empty()) c.quotas = defaults.quotas;
      for (std::size_t i = 0; i < c.validities.size(); ++i) {
        check_range(c.validities[i], -1.0, 1.0, false, index_path("classify.validities", i));
      }
      for (std::size_t i = 0; i < c.base_rates.size(); ++i) {
        check_range(c.base_rates[i], 0.0, 1.0, true, index_path("classify.base_rates", i));
      }
      for (std::size_t i = 0; i < c.quotas.size(); ++i) {
        check_range(c.quotas[i], 0.0, 1.0, true, index_path("classify.quotas", i));
      }
      break;
    }
    case Command::kPool: {
      auto& d = config.pool.departments;
      if (d.empty()) invalid("pool.departments", "at least one department is required");
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i].n < 1) invalid(index_path("pool.departments", i) + ".n", "must be >= 1");
        check_range(d[i].r, 0.0, 1.0, false, index_path("pool.departments", i) + ".r");
      }
      break;
    }
  }
}

std::string to_json_text(const RunConfig& config) {
  json doc;
  doc["command"] = std::string(command_name(config.command));
  doc["format"] = std::string(format_name(config.format));
  doc["out"] = config.out;
  doc["seed"] = config.seed;
  doc["replications"] = config.replications;
  auto cells = [](const std::vector<CellShape>& v) {
    json arr = json::array();
    for (const auto& c : v) arr.push_back({{"nss", c.nss}, {"sss", c.sss}});
    return arr;
  };
  switch (config.command) {
    case Command::kSimulate:
      doc["simulate"] = {{"sigma", config.simulate.sigma},
                         {"cells", cells(config.simulate.cells)},
                         {"criteria", config.simulate.criteria}};
      break;
    case Command::kSweep: {
      json pairs = json::array();
      for (const auto& v : config.sweep.validities) pairs.push_back({v.v1, v.v2});
      doc["sweep"] = {{"r12", config.sweep.r12}, {"validities", pairs}, {"cells", cells(config.sweep.cells)}};
      break;
    }
    case Command::kClassify:
      doc["classify"] = {{"validities", config.classify.validities},
                         {"base_rates", config.classify.base_rates},
                         {"quotas", config.classify.quotas}};
      break;
    case Command::kPool: {
      json depts = json::array();
      for (const auto& d : config.pool.departments) depts.push_back({{"n", d.n}, {"r", d.r}});
      doc["pool"] = {{"departments", depts}};
      break;
    }
  }
  return doc.dump();
}

std::vector<SimDesign> simulate_designs(const RunConfig& config) {
  const auto& s = config.simulate;
  const auto p = static_cast<Eigen::Index>(s.sigma.size());
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = s.sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  const CorrelationMatrix sigma(m);
  std::vector<std::size_t> criteria;
  for (std::size_t c : s.criteria) criteria.push_back(c - 1);
  std::vector<SimDesign> designs;
  for (const auto& cell : s.cells) {
    designs.push_back(SimDesign{sigma, cell.nss, cell.sss, config.replications, config.seed, criteria});
  }
  return designs;
}

}  // namespace valsim::app
