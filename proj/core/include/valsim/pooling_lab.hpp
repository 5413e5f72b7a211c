#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "valsim/correlation.hpp"
#include "valsim/mvn_sampler.hpp"

namespace valsim {

/// One simulation cell: a population matrix split into nss sub-samples of
/// sss cases each, repeated `replications` times.
struct SimDesign {
  CorrelationMatrix sigma = CorrelationMatrix::identity(3);
  std::size_t nss = 1;
  std::size_t sss = 5;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  /// Zero-based variable indices to report; empty means all variables.
  std::vector<std::size_t> criteria;

  std::size_t total_size() const { return nss * sss; }
};

/// Throws InvalidArgument naming the first violated bound.
void validate_design(const SimDesign& design);

/// Monte Carlo standard error of each replication-averaged estimator.
struct EstimatorErrors {
  double pda = 0.0;
  double agr = 0.0;
  double sum = 0.0;
};

struct CellResult {
  SimDesign design;
  /// Estimates averaged over replications; pop is analytic.
  std::vector<EstimateRecord> per_criterion;
  /// Parallel to per_criterion. All zero when replications == 1.
  std::vector<EstimatorErrors> mc_se;
  /// Replications redrawn because some sub-sample correlation matrix was singular.
  std::size_t singular_resamples = 0;

  bool mc_se_available() const { return design.replications > 1; }
};

struct RunOptions {
  unsigned threads = 1;
  /// Position of the cell within a larger run; selects disjoint substreams.
  std::uint64_t cell_ordinal = 0;
};

/// Replication r draws its total sample from stream
/// cell_ordinal * replications + r. Results do not depend on `threads`.
CellResult run_cell(const SimDesign& design, const RunOptions& options = {});

/// Per-replication estimates for one criterion, exposed for tests that need
/// the raw distribution rather than the cell means.
struct ReplicationDraw {
  std::vector<double> pda;
  std::vector<double> agr;
  std::vector<double> sum;
};
ReplicationDraw run_replication(const SimDesign& design, const GramFactor& factor,
                                const SeedSpec& seed, std::size_t* resamples = nullptr);

/// Cells for one population matrix, ordered by sub-sample size (ascending,
/// stable). Each cell keeps the substreams of its position in `designs`.
struct BiasTableSet {
  std::vector<CellResult> blocks;
};
BiasTableSet reproduce_bias_tables(std::span<const SimDesign> designs, unsigned threads = 1);

struct ValidityPair {
  double v1 = 0.0;
  double v2 = 0.0;
};

struct CellShape {
  std::size_t nss = 1;
  std::size_t sss = 5;
};

/// [[1, r12, v1], [r12, 1, v2], [v1, v2, 1]]; variable 3 is the criterion.
CorrelationMatrix two_predictor_matrix(double r12, ValidityPair validity);

struct BiasMagnitudes {
  double pda = 0.0;
  double agr = 0.0;
  double sum = 0.0;
};

/// Bias of the third variable over a grid of validity levels and cell shapes.
struct ValiditySweep {
  std::vector<ValidityPair> pairs;
  std::vector<double> validities;
  std::vector<CellShape> shapes;
  /// Validity-major: cells[v * shapes.size() + s].
  std::vector<CellResult> cells;
  /// Mean |bias| across shapes for each validity level.
  std::vector<BiasMagnitudes> row_means;
  /// row_means[v].pda - row_means[v].agr.
  std::vector<double> row_diffs;
  /// Mean |bias| over every estimator and validity level, per shape.
  std::vector<double> col_means;
  double grand_mean = 0.0;

  const CellResult& cell(std::size_t validity, std::size_t shape) const {
    return cells[validity * shapes.size() + shape];
  }
};

inline constexpr std::size_t kSweepCriterion = 2;

ValiditySweep validity_sweep(std::span<const ValidityPair> validities, double r12,
                             std::span<const CellShape> shapes, std::size_t replications,
                             std::uint64_t master_seed, unsigned threads = 1);

}  // namespace valsim
