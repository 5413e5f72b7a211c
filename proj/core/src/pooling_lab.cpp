#include "valsim/pooling_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "valsim/error.hpp"

namespace valsim {

namespace {

constexpr std::size_t kMaxResamples = 1000;

std::vector<std::size_t> effective_criteria(const SimDesign& design) {
  if (!design.criteria.empty()) return design.criteria;
  std::vector<std::size_t> all(static_cast<std::size_t>(design.sigma.order()));
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

bool is_singular_failure(const Error& e) {
  return e.code() == ErrorCode::kSingularMatrix || e.code() == ErrorCode::kDegenerateColumn;
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions are
// rethrown for the lowest failing index so the outcome is schedule-independent.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v, double m) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

void validate_design(const SimDesign& design) {
  const auto p = static_cast<std::size_t>(design.sigma.order());
  if (p < 2) raise(ErrorCode::kInvalidArgument, "population matrix needs at least 2 variables");
  if (design.nss < 1) raise(ErrorCode::kInvalidArgument, "nss must be >= 1");
  if (design.sss < p + 2) {
    raise(ErrorCode::kInvalidArgument,
          "sss = " + std::to_string(design.sss) + " is below p + 2 = " + std::to_string(p + 2));
  }
  if (design.replications < 1) raise(ErrorCode::kInvalidArgument, "replications must be >= 1");
  for (std::size_t c : design.criteria) {
    if (c >= p) {
      raise(ErrorCode::kInvalidArgument,
            "criterion " + std::to_string(c + 1) + " exceeds the " + std::to_string(p) +
                " variables");
    }
  }
}

ReplicationDraw run_replication(const SimDesign& design, const GramFactor& factor,
                                const SeedSpec& seed, std::size_t* resamples) {
  const std::vector<std::size_t> criteria = effective_criteria(design);
  for (std::size_t attempt = 0; attempt <= kMaxResamples; ++attempt) {
    const SeedSpec spec = attempt == 0 ? seed : seed.child(attempt);
    const ScoreMatrix y = mvn_sample(factor, design.total_size(), spec);
    try {
      std::vector<MultipleCorrelationVector> within;
      within.reserve(design.nss);
      for (const auto& sub : split_subsamples(y, design.nss, design.sss)) {
        within.push_back(multiple_correlations(corr_matrix(sub)));
      }
      const MultipleCorrelationVector pda = pda_pool(within);
      const MultipleCorrelationVector agr = multiple_correlations(corr_matrix(y));

      ReplicationDraw draw;
      for (std::size_t c : criteria) {
        draw.pda.push_back(pda[c]);
        draw.agr.push_back(agr[c]);
        draw.sum.push_back(sum_score_validity(y, c));
      }
      return draw;
    } catch (const Error& e) {
      if (!is_singular_failure(e)) throw;
      if (resamples != nullptr) ++*resamples;
    }
  }
  raise(ErrorCode::kSingularSubsample,
        "sub-sample correlation matrix stayed singular after " +
            std::to_string(kMaxResamples) + " redraws");
}

CellResult run_cell(const SimDesign& design, const RunOptions& options) {
  validate_design(design);
  const GramFactor factor = gram_factor(design.sigma);
  const MultipleCorrelationVector pop = multiple_correlations(design.sigma);
  const std::vector<std::size_t> criteria = effective_criteria(design);

  const std::size_t reps = design.replications;
  std::vector<ReplicationDraw> draws(reps);
  std::vector<std::size_t> resamples(reps, 0);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    const SeedSpec seed{design.master_seed, options.cell_ordinal * reps + r};
    draws[r] = run_replication(design, factor, seed, &resamples[r]);
  });

  CellResult result;
  result.design = design;
  result.singular_resamples = std::accumulate(resamples.begin(), resamples.end(), std::size_t{0});
  for (std::size_t ci = 0; ci < criteria.size(); ++ci) {
    std::vector<double> pda(reps), agr(reps), sum(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      pda[r] = draws[r].pda[ci];
      agr[r] = draws[r].agr[ci];
      sum[r] = draws[r].sum[ci];
    }
    const double mp = mean(pda), ma = mean(agr), ms = mean(sum);
    result.per_criterion.push_back(make_estimate_record(criteria[ci], pop[criteria[ci]], mp, ma, ms));
    result.mc_se.push_back({standard_error(pda, mp), standard_error(agr, ma),
                            standard_error(sum, ms)});
  }
  return result;
}

BiasTableSet reproduce_bias_tables(std::span<const SimDesign> designs, unsigned threads) {
  if (designs.empty()) raise(ErrorCode::kEmptyInput, "no designs to tabulate");
  for (const auto& d : designs) {
    if (!(d.sigma == designs.front().sigma)) {
      raise(ErrorCode::kInvalidArgument, "all designs in one table must share sigma");
    }
  }
  BiasTableSet set;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    set.blocks.push_back(run_cell(designs[i], RunOptions{threads, i}));
  }
  std::stable_sort(set.blocks.begin(), set.blocks.end(),
                   [](const CellResult& a, const CellResult& b) {
                     return a.design.sss < b.design.sss;
                   });
  return set;
}

CorrelationMatrix two_predictor_matrix(double r12, ValidityPair validity) {
  Matrix m(3, 3);
  m << 1.0, r12, validity.v1,  //
      r12, 1.0, validity.v2,   //
      validity.v1, validity.v2, 1.0;
  return CorrelationMatrix(std::move(m));
}

ValiditySweep validity_sweep(std::span<const ValidityPair> validities, double r12,
                             std::span<const CellShape> shapes, std::size_t replications,
                             std::uint64_t master_seed, unsigned threads) {
  if (validities.empty() || shapes.empty()) {
    raise(ErrorCode::kEmptyInput, "a sweep needs at least one validity level and one cell");
  }
  ValiditySweep sweep;
  sweep.pairs.assign(validities.begin(), validities.end());
  sweep.shapes.assign(shapes.begin(), shapes.end());

  std::uint64_t ordinal = 0;
  for (const auto& pair : validities) {
    const CorrelationMatrix sigma = two_predictor_matrix(r12, pair);
    gram_factor(sigma);  // rejects inconsistent pairs before any sampling
    sweep.validities.push_back(multiple_correlations(sigma)[kSweepCriterion]);
    for (const auto& shape : shapes) {
      SimDesign design{sigma, shape.nss, shape.sss, replications, master_seed,
                       {kSweepCriterion}};
      sweep.cells.push_back(run_cell(design, RunOptions{threads, ordinal++}));
    }
  }

  const double ns = static_cast<double>(shapes.size());
  sweep.col_means.assign(shapes.size(), 0.0);
  for (std::size_t v = 0; v < validities.size(); ++v) {
    BiasMagnitudes row;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      const EstimateRecord& e = sweep.cell(v, s).per_criterion.front();
      row.pda += std::abs(e.bias_pda) / ns;
      row.agr += std::abs(e.bias_agr) / ns;
      row.sum += std::abs(e.bias_sum) / ns;
      sweep.col_means[s] +=
          std::abs(e.bias_pda) + std::abs(e.bias_agr) + std::abs(e.bias_sum);
    }
    sweep.row_means.push_back(row);
    sweep.row_diffs.push_back(row.pda - row.agr);
  }
  const double entries_per_col = 3.0 * static_cast<double>(validities.size());
  for (double& c : sweep.col_means) c /= entries_per_col;
  sweep.grand_mean = std::accumulate(sweep.col_means.begin(), sweep.col_means.end(), 0.0) / ns;
  return sweep;
}

}  // namespace valsim
