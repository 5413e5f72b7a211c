#include "valsim_app/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "valsim/error.hpp"

namespace valsim::app {

std::string format_sig6(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::string format_short(double value) {
  char buf[32];
  double rounded = std::round(value * 1000.0) / 1000.0;
  if (rounded == 0.0) rounded = 0.0;  // no "-.000"
  std::snprintf(buf, sizeof buf, "%.3f", rounded);
  std::string s = buf;
  if (s.starts_with("0.")) return s.substr(1);
  if (s.starts_with("-0.")) return "-" + s.substr(2);
  return s;
}

namespace {

constexpr std::string_view kMarkdownConfigOpen = "```json\n";
constexpr std::string_view kCsvConfigPrefix = "# config: ";

void write_header(std::ostream& os, const RunConfig& config) {
  const std::string json = to_json_text(config);
  if (config.format == OutputFormat::kCsv) {
    os << kCsvConfigPrefix << json << '\n';
  } else {
    os << "# valsim " << command_name(config.command) << "\n\nConfiguration:\n\n"
       << kMarkdownConfigOpen << json << "\n```\n\n";
  }
}

std::string se_text(const CellResult& cell, double se) {
  return cell.mc_se_available() ? format_short(se) : "n/a";
}

// --- simulate -------------------------------------------------------------

void markdown_cell(std::ostream& os, const CellResult& cell) {
  const auto& d = cell.design;
  os << "## NSS " << d.nss << " x SSS " << d.sss << " (SST " << d.total_size() << ", "
     << d.replications << " replication" << (d.replications == 1 ? "" : "s") << ")\n\n";

  os << "| | |";
  for (const auto& e : cell.per_criterion) os << ' ' << e.criterion_index + 1 << " |";
  os << " diff |\n|---|---|";
  for (std::size_t i = 0; i < cell.per_criterion.size(); ++i) os << "---:|";
  os << "---:|\n";

  auto row = [&](std::string_view group, std::string_view label, auto value, std::string diff) {
    os << "| " << group << " | " << label << " |";
    for (std::size_t i = 0; i < cell.per_criterion.size(); ++i) os << ' ' << value(i) << " |";
    os << ' ' << diff << " |\n";
  };
  const auto& pc = cell.per_criterion;
  // The diff column refers to the last reported criterion.
  const std::string diff = format_short(pda_agr_gap(pc.back()));
  row("estimate", "pop", [&](std::size_t i) { return format_short(pc[i].pop); }, "");
  row("", "pda", [&](std::size_t i) { return format_short(pc[i].pda); }, "");
  row("", "agr", [&](std::size_t i) { return format_short(pc[i].agr); }, "");
  row("", "sum", [&](std::size_t i) { return format_short(pc[i].sum); }, "");
  row("bias", "pop-pda", [&](std::size_t i) { return format_short(pc[i].bias_pda); }, "");
  row("", "pop-agr", [&](std::size_t i) { return format_short(pc[i].bias_agr); }, diff);
  row("", "pop-sum", [&](std::size_t i) { return format_short(pc[i].bias_sum); }, "");
  const auto& se = cell.mc_se;
  row("mc_se", "pda", [&](std::size_t i) { return se_text(cell, se[i].pda); }, "");
  row("", "agr", [&](std::size_t i) { return se_text(cell, se[i].agr); }, "");
  row("", "sum", [&](std::size_t i) { return se_text(cell, se[i].sum); }, "");
  if (cell.singular_resamples > 0) {
    os << "\nReplications redrawn after a singular sub-sample: " << cell.singular_resamples << '\n';
  }
  os << '\n';
}

void csv_cell_rows(std::ostream& os, const CellResult& cell) {
  const auto& d = cell.design;
  for (std::size_t i = 0; i < cell.per_criterion.size(); ++i) {
    const auto& e = cell.per_criterion[i];
    const auto& se = cell.mc_se[i];
    auto line = [&](std::string_view estimator, double estimate, double bias_value,
                    std::string se_value) {
      os << d.nss << ',' << d.sss << ',' << d.replications << ',' << e.criterion_index + 1 << ','
         << estimator << ',' << format_sig6(estimate) << ',' << format_sig6(bias_value) << ','
         << se_value << ',' << d.master_seed << '\n';
    };
    const bool avail = cell.mc_se_available();
    line("pop", e.pop, 0.0, format_sig6(0.0));
    line("pda", e.pda, e.bias_pda, avail ? format_sig6(se.pda) : "NA");
    line("agr", e.agr, e.bias_agr, avail ? format_sig6(se.agr) : "NA");
    line("sum", e.sum, e.bias_sum, avail ? format_sig6(se.sum) : "NA");
  }
}

constexpr std::string_view kCellCsvHeader = "nss,sss,replications,criterion,estimator,estimate,bias,mc_se,seed\n";

void emit_bias_tables(std::ostream& os, const BiasTableSet& set, const RunConfig& config) {
  if (set.blocks.empty()) raise(ErrorCode::kEmptyInput, "no simulation cells to report");
  if (config.format == OutputFormat::kCsv) {
    os << kCellCsvHeader;
    for (const auto& cell : set.blocks) csv_cell_rows(os, cell);
    return;
  }
  const Matrix& sigma = set.blocks.front().design.sigma.matrix();
  os << "Population correlation matrix:\n\n|";
  for (Eigen::Index j = 0; j < sigma.cols(); ++j) os << ' ' << j + 1 << " |";
  os << "\n|";
  for (Eigen::Index j = 0; j < sigma.cols(); ++j) os << "---:|";
  os << '\n';
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    os << '|';
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      os << ' ' << (i == j ? std::string("1") : format_short(sigma(i, j))) << " |";
    }
    os << '\n';
  }
  os << '\n';
  for (const auto& cell : set.blocks) markdown_cell(os, cell);
}

// --- sweep ----------------------------------------------------------------

void emit_sweep(std::ostream& os, const ValiditySweep& sweep, const RunConfig& config) {
  if (sweep.cells.empty()) raise(ErrorCode::kEmptyInput, "sweep has no cells");
  if (config.format == OutputFormat::kCsv) {
    os << kCellCsvHeader;
    for (const auto& cell : sweep.cells) csv_cell_rows(os, cell);
    return;
  }
  os << "Predictor intercorrelation r12 = " << format_short(config.sweep.r12) << "\n\n"
     << "| v1 | v2 | validity |\n|---:|---:|---:|\n";
  for (std::size_t v = 0; v < sweep.pairs.size(); ++v) {
    os << "| " << format_short(sweep.pairs[v].v1) << " | " << format_short(sweep.pairs[v].v2)
       << " | " << format_short(sweep.validities[v]) << " |\n";
  }
  os << "\nBias of variable 3 (row/col means of magnitude):\n\n| Pop. validity | |";
  for (const auto& s : sweep.shapes) os << ' ' << s.nss << " x " << s.sss << " |";
  os << " rmns | diff |\n|---|---|";
  for (std::size_t s = 0; s < sweep.shapes.size(); ++s) os << "---:|";
  os << "---:|---:|\n";
  for (std::size_t v = 0; v < sweep.validities.size(); ++v) {
    const auto& rm = sweep.row_means[v];
    auto row = [&](std::string_view first, std::string_view label, auto pick, double mean,
                   std::string diff) {
      os << "| " << first << " | " << label << " |";
      for (std::size_t s = 0; s < sweep.shapes.size(); ++s) {
        os << ' ' << format_short(pick(sweep.cell(v, s).per_criterion.front())) << " |";
      }
      os << ' ' << format_short(mean) << " | " << diff << " |\n";
    };
    row("", "pda", [](const EstimateRecord& e) { return e.bias_pda; }, rm.pda, "");
    row(format_short(sweep.validities[v]), "agr", [](const EstimateRecord& e) { return e.bias_agr; },
        rm.agr, format_short(sweep.row_diffs[v]));
    row("", "sum", [](const EstimateRecord& e) { return e.bias_sum; }, rm.sum, "");
  }
  os << "| cmns | |";
  for (double c : sweep.col_means) os << ' ' << format_short(c) << " |";
  os << ' ' << format_short(sweep.grand_mean) << " | |\n\n";
  os << "Replications per cell: " << config.replications << "\n";
}

// --- classify -------------------------------------------------------------

std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

void emit_grid(std::ostream& os, const UtilityGrid& grid, const RunConfig& config) {
  if (grid.cells.empty()) raise(ErrorCode::kEmptyInput, "utility grid is empty");
  if (config.format == OutputFormat::kCsv) {
    os << "validity,base_rate,quota,tp,fp,fn,tn,prc,gain,hit_rate,pct_correct,gain_loss,hit_rate_pct\n";
    for (const auto& c : grid.cells) {
      os << format_sig6(c.validity) << ',' << format_sig6(c.base_rate) << ','
         << format_sig6(c.quota) << ',' << format_sig6(c.table.tp()) << ','
         << format_sig6(c.table.fp()) << ',' << format_sig6(c.table.fn()) << ','
         << format_sig6(c.table.tn()) << ',' << format_sig6(c.report.prc) << ','
         << format_sig6(c.report.gain) << ',' << format_sig6(c.report.hit_rate) << ','
         << c.percent_correct << ',' << c.gain_loss << ',' << c.hit_rate << '\n';
    }
    return;
  }
  if (grid.cells.size() == 1) {
    const GridCell& c = grid.cells.front();
    const FourfoldTable& t = c.table;
    os << "Validity " << format_short(c.validity) << ", base rate " << format_short(c.base_rate)
       << ", quota " << format_short(c.quota) << "\n\n"
       << "| test | - (unqualified) | + (qualified) | sum |\n|---|---:|---:|---:|\n"
       << "| + (pass) | fp " << format_short(t.fp()) << " | tp " << format_short(t.tp()) << " | "
       << format_short(t.quota()) << " |\n"
       << "| - (fail) | tn " << format_short(t.tn()) << " | fn " << format_short(t.fn()) << " | "
       << format_short(1.0 - t.quota()) << " |\n"
       << "| sum | " << format_short(t.negative_base_rate()) << " | "
       << format_short(t.base_rate()) << " | 1 |\n\n"
       << "- prc (proportion correct): " << format_short(c.report.prc) << '\n'
       << "- gain over random admission: " << format_short(c.report.gain) << '\n'
       << "- hit rate: " << format_short(c.report.hit_rate) << '\n';
    return;
  }
  os << "Gains (losses, if negative) in correct classifications relative to random admission.\n"
        "%C total percent correct, G/L gain or loss, HR hit rate.\n\n| b+ | q |";
  for (double r : grid.validities) os << " %C r=" << format_short(r) << " | G/L | HR |";
  os << "\n|---:|---:|";
  for (std::size_t i = 0; i < grid.validities.size(); ++i) os << "---:|---:|---:|";
  os << '\n';
  for (std::size_t b = 0; b < grid.base_rates.size(); ++b) {
    for (std::size_t q = 0; q < grid.quotas.size(); ++q) {
      os << "| " << (q == 0 ? pct(100.0 * grid.base_rates[b]) : std::string()) << " | "
         << pct(100.0 * grid.quotas[q]) << " |";
      for (std::size_t r = 0; r < grid.validities.size(); ++r) {
        const GridCell& c = grid.at(b, q, r);
        os << ' ' << c.percent_correct << " | " << c.gain_loss << " | " << c.hit_rate << " |";
      }
      os << '\n';
    }
  }
}

// --- pool -----------------------------------------------------------------

void emit_pool(std::ostream& os, const PoolResult& pool, const RunConfig& config) {
  if (pool.departments.empty()) raise(ErrorCode::kEmptyInput, "no departments to pool");
  std::size_t total = 0;
  for (const auto& d : pool.departments) total += d.n;
  if (config.format == OutputFormat::kCsv) {
    os << "department,n,r\n";
    for (std::size_t i = 0; i < pool.departments.size(); ++i) {
      os << i + 1 << ',' << pool.departments[i].n << ',' << format_sig6(pool.departments[i].r) << '\n';
    }
    os << "pooled," << total << ',' << format_sig6(pool.pooled) << '\n';
    return;
  }
  os << "| department | n | R |\n|---:|---:|---:|\n";
  for (std::size_t i = 0; i < pool.departments.size(); ++i) {
    os << "| " << i + 1 << " | " << pool.departments[i].n << " | "
       << format_short(pool.departments[i].r) << " |\n";
  }
  os << "| pooled | " << total << " | " << format_short(pool.pooled) << " |\n\n"
     << "Pooled R (weighted by n): " << format_short(pool.pooled) << '\n';
}

}  // namespace

void emit_table(std::ostream& out, const Report& report, const RunConfig& config) {
  std::ostringstream body;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BiasTableSet>) emit_bias_tables(body, r, config);
        else if constexpr (std::is_same_v<T, ValiditySweep>) emit_sweep(body, r, config);
        else if constexpr (std::is_same_v<T, UtilityGrid>) emit_grid(body, r, config);
        else emit_pool(body, r, config);
      },
      report);
  write_header(out, config);
  out << body.str();
  if (!out) raise(ErrorCode::kIoError, "failed to write report");
}

std::string emit_table(const Report& report, const RunConfig& config) {
  std::ostringstream os;
  emit_table(os, report, config);
  return os.str();
}

std::optional<std::string> extract_embedded_config(std::string_view text) {
  if (text.starts_with(kCsvConfigPrefix)) {
    const auto end = text.find('\n');
    return std::string(text.substr(kCsvConfigPrefix.size(), end - kCsvConfigPrefix.size()));
  }
  const auto open = text.find(kMarkdownConfigOpen);
  if (open == std::string_view::npos) return std::nullopt;
  const auto start = open + kMarkdownConfigOpen.size();
  const auto close = text.find("\n```", start);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(start, close - start));
}

}  // namespace valsim::app
