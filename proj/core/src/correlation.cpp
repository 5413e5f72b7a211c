#include "valsim/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "valsim/error.hpp"

namespace valsim {

EstimateRecord make_estimate_record(std::size_t criterion_index, double pop, double pda,
                                    double agr, double sum) {
  return EstimateRecord{criterion_index, pop,
                        pda,             agr,
                        sum,             bias(pop, pda),
                        bias(pop, agr),  bias(pop, sum)};
}

double pda_agr_gap(const EstimateRecord& record) {
  return std::abs(record.bias_pda) - std::abs(record.bias_agr);
}

namespace {

void require_nondegenerate(const Matrix& y, Eigen::Index col) {
  if (y.col(col).maxCoeff() == y.col(col).minCoeff()) {
    raise(ErrorCode::kDegenerateColumn,
          "column " + std::to_string(col + 1) + " is constant");
  }
}

// Centered column with its sum of squares.
Vector centered(const Matrix& y, Eigen::Index col, double& sum_squares) {
  const double mean = y.col(col).sum() / static_cast<double>(y.rows());
  Vector c = y.col(col).array() - mean;
  sum_squares = c.squaredNorm();
  return c;
}

double pearson(const Vector& a, const Vector& b) {
  const double n = static_cast<double>(a.size());
  const Vector ca = a.array() - a.sum() / n;
  const Vector cb = b.array() - b.sum() / n;
  const double saa = ca.squaredNorm();
  const double sbb = cb.squaredNorm();
  if (saa == 0.0 || sbb == 0.0) {
    raise(ErrorCode::kDegenerateColumn, "correlation with a constant score");
  }
  return std::clamp(ca.dot(cb) / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

CorrelationMatrix corr_matrix(const ScoreMatrix& y) {
  const Matrix& m = y.matrix();
  if (m.rows() < 3) {
    raise(ErrorCode::kInvalidArgument,
          "corr_matrix requires at least 3 rows, got " + std::to_string(m.rows()));
  }
  const Eigen::Index p = m.cols();
  std::vector<Vector> cols;
  std::vector<double> ss(static_cast<std::size_t>(p));
  cols.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    require_nondegenerate(m, j);
    cols.push_back(centered(m, j, ss[static_cast<std::size_t>(j)]));
  }
  Matrix r = Matrix::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double v = cols[ui].dot(cols[uj]) / std::sqrt(ss[ui] * ss[uj]);
      r(i, j) = r(j, i) = std::clamp(v, -1.0, 1.0);
    }
  }
  return CorrelationMatrix::trusted(std::move(r));
}

MultipleCorrelationVector multiple_correlations(const CorrelationMatrix& r) {
  const Matrix& s = r.matrix();
  const Eigen::Index p = s.rows();

  // Strict Cholesky: any pivot at or below the tolerance means collinearity.
  Matrix lower = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = s(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > kSemidefiniteTolerance)) {
      raise(ErrorCode::kSingularMatrix,
            "correlation matrix is not invertible (pivot " + std::to_string(pivot) +
                " at variable " + std::to_string(j + 1) + ")");
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      double v = s(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / lower(j, j);
    }
  }

  // inv(R) = L^{-T} L^{-1}, so r^ii is the squared norm of column i of L^{-1}.
  Matrix inv_lower = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    inv_lower(j, j) = 1.0 / lower(j, j);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      double v = 0.0;
      for (Eigen::Index k = j; k < i; ++k) v -= lower(i, k) * inv_lower(k, j);
      inv_lower(i, j) = v / lower(i, i);
    }
  }

  MultipleCorrelationVector out(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    double rii = 0.0;
    for (Eigen::Index k = i; k < p; ++k) rii += inv_lower(k, i) * inv_lower(k, i);
    const double r2 = 1.0 - 1.0 / rii;
    out[static_cast<std::size_t>(i)] = r2 > 0.0 ? std::sqrt(r2) : 0.0;
  }
  return out;
}

double sum_score_validity(const ScoreMatrix& y, std::size_t criterion) {
  const Matrix& m = y.matrix();
  const Eigen::Index p = m.cols();
  const auto crit = static_cast<Eigen::Index>(criterion);
  if (p < 2 || crit >= p) {
    raise(ErrorCode::kInvalidArgument, "sum_score_validity needs p >= 2 and a valid criterion");
  }
  if (m.rows() < 2) {
    raise(ErrorCode::kInvalidArgument, "sum_score_validity needs at least 2 rows");
  }
  const double n = static_cast<double>(m.rows());
  Vector total = Vector::Zero(m.rows());
  for (Eigen::Index j = 0; j < p; ++j) {
    require_nondegenerate(m, j);
    if (j == crit) continue;
    double ss = 0.0;
    const Vector c = centered(m, j, ss);
    total += c / std::sqrt(ss / (n - 1.0));
  }
  require_nondegenerate(m, crit);
  return pearson(total, m.col(crit));
}

MultipleCorrelationVector pda_pool(std::span<const MultipleCorrelationVector> per_subsample,
                                   std::span<const double> weights) {
  if (per_subsample.empty()) raise(ErrorCode::kEmptyInput, "no sub-sample estimates to pool");
  if (weights.size() != per_subsample.size()) {
    raise(ErrorCode::kLengthMismatch, "one weight per sub-sample is required");
  }
  const std::size_t p = per_subsample.front().size();
  MultipleCorrelationVector out(p, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < per_subsample.size(); ++s) {
    if (per_subsample[s].size() != p) {
      raise(ErrorCode::kLengthMismatch,
            "sub-sample " + std::to_string(s + 1) + " has " +
                std::to_string(per_subsample[s].size()) + " entries, expected " +
                std::to_string(p));
    }
    if (!(weights[s] > 0.0)) {
      raise(ErrorCode::kInvalidArgument, "pooling weights must be positive");
    }
    for (std::size_t i = 0; i < p; ++i) out[i] += weights[s] * per_subsample[s][i];
    total += weights[s];
  }
  for (double& v : out) v /= total;
  return out;
}

MultipleCorrelationVector pda_pool(std::span<const MultipleCorrelationVector> per_subsample) {
  const std::vector<double> ones(per_subsample.size(), 1.0);
  return pda_pool(per_subsample, ones);
}

double pool_departments(std::span<const DeptRecord> departments) {
  std::vector<MultipleCorrelationVector> values;
  std::vector<double> weights;
  values.reserve(departments.size());
  weights.reserve(departments.size());
  for (const auto& d : departments) {
    if (d.n < 1 || d.r < 0.0 || d.r > 1.0) {
      raise(ErrorCode::kInvalidArgument, "department records need n >= 1 and r in [0, 1]");
    }
    values.push_back({d.r});
    weights.push_back(static_cast<double>(d.n));
  }
  return pda_pool(values, weights).front();
}

double shrinkage_adjust(double r_squared, std::size_t n, std::size_t k) {
  if (!(r_squared >= 0.0 && r_squared <= 1.0)) {
    raise(ErrorCode::kInvalidArgument, "R^2 must lie in [0, 1]");
  }
  if (k < 1) raise(ErrorCode::kInvalidArgument, "at least one predictor is required");
  if (n <= k + 1) {
    raise(ErrorCode::kDegreesOfFreedomExhausted,
          "n = " + std::to_string(n) + " leaves no residual degrees of freedom for k = " +
              std::to_string(k));
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return 1.0 - (1.0 - r_squared) * (nd - 1.0) / (nd - kd - 1.0);
}

double range_restriction_correct(double r, double sd_ratio) {
  if (!(sd_ratio > 0.0) || !std::isfinite(sd_ratio)) {
    raise(ErrorCode::kInvalidRatio, "standard-deviation ratio must be positive");
  }
  if (!(r > -1.0 && r < 1.0)) {
    raise(ErrorCode::kInvalidArgument, "correlation must lie in (-1, 1)");
  }
  return r * sd_ratio / std::sqrt(1.0 - r * r + r * r * sd_ratio * sd_ratio);
}

}  // namespace valsim
