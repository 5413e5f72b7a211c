#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "valsim/mvn_sampler.hpp"

namespace valsim {

/// value(i) = multiple correlation of variable i on all the others.
using MultipleCorrelationVector = std::vector<double>;

/// A published per-department statistic: sample size and multiple correlation.
struct DeptRecord {
  std::size_t n = 0;
  double r = 0.0;
};

/// One criterion's population value, the three pooled estimates and their
/// biases. Build through make_estimate_record() so the bias fields always
/// equal pop minus the estimate.
struct EstimateRecord {
  std::size_t criterion_index = 0;
  double pop = 0.0;
  double pda = 0.0;
  double agr = 0.0;
  double sum = 0.0;
  double bias_pda = 0.0;
  double bias_agr = 0.0;
  double bias_sum = 0.0;
};

EstimateRecord make_estimate_record(std::size_t criterion_index, double pop, double pda,
                                    double agr, double sum);

/// |bias_pda| - |bias_agr|: how much further pda lands from the population
/// value than the aggregate-sample estimate.
double pda_agr_gap(const EstimateRecord& record);

/// Pearson correlations of the columns. Requires n >= 3; throws
/// DegenerateColumn for a constant column.
CorrelationMatrix corr_matrix(const ScoreMatrix& y);

/// sqrt(1 - 1/r^ii) from the diagonal of the inverse correlation matrix.
/// Throws SingularMatrix when a Cholesky pivot is <= 1e-10.
MultipleCorrelationVector multiple_correlations(const CorrelationMatrix& r);

/// Correlation of the criterion column with the unweighted sum of the other
/// columns, each standardized with the sample mean and n-1 standard deviation.
double sum_score_validity(const ScoreMatrix& y, std::size_t criterion);

/// Weight-proportional average per entry.
MultipleCorrelationVector pda_pool(std::span<const MultipleCorrelationVector> per_subsample,
                                   std::span<const double> weights);
/// Equal weights.
MultipleCorrelationVector pda_pool(std::span<const MultipleCorrelationVector> per_subsample);

/// Student-weighted mean of reported departmental correlations.
double pool_departments(std::span<const DeptRecord> departments);

/// Population parameter minus sample estimate; negative means overestimation.
constexpr double bias(double pop, double estimate) { return pop - estimate; }

/// Wherry adjustment 1 - (1 - R^2)(n - 1)/(n - k - 1). Can go negative.
double shrinkage_adjust(double r_squared, std::size_t n, std::size_t k);

/// Univariate range-restriction correction with sd_ratio = unrestricted over
/// restricted predictor standard deviation.
double range_restriction_correct(double r, double sd_ratio);

}  // namespace valsim
