#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "valsim/rng.hpp"

namespace valsim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric, unit-diagonal matrix with entries in [-1, 1]. Positive
/// semidefiniteness is checked lazily by gram_factor().
class CorrelationMatrix {
 public:
  /// Validates symmetry (exact), unit diagonal (exact) and entry range.
  explicit CorrelationMatrix(Matrix values);
  CorrelationMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static CorrelationMatrix identity(Eigen::Index order);

  /// Skips validation; for estimates whose construction already guarantees
  /// the invariants.
  static CorrelationMatrix trusted(Matrix values);

  Eigen::Index order() const noexcept { return values_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Matrix& matrix() const noexcept { return values_; }

  friend bool operator==(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    return a.values_ == b.values_;
  }

 private:
  struct TrustedTag {};
  CorrelationMatrix(Matrix values, TrustedTag) : values_(std::move(values)) {}

  Matrix values_;
};

/// Lower-triangular A with A * A^T equal to a correlation matrix.
class GramFactor {
 public:
  explicit GramFactor(Matrix lower) : lower_(std::move(lower)) {}

  Eigen::Index order() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

 private:
  Matrix lower_;
};

/// n x p observations, one row per case.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(Matrix values) : values_(std::move(values)) {}

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Matrix& matrix() const noexcept { return values_; }

  friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Pivots in [-1e-10, 0] are treated as exact zeros (rank deficiency).
inline constexpr double kSemidefiniteTolerance = 1e-10;

/// Cholesky factor with pivot clamping. Throws NotPositiveSemidefinite.
GramFactor gram_factor(const CorrelationMatrix& sigma);

/// Independent N(0, 1) draws filled row by row, so the first rows of a larger
/// request equal a smaller request with the same seed.
ScoreMatrix standard_normal_matrix(std::size_t n, std::size_t p, const SeedSpec& seed);

/// Y = X * A^T with X = standard_normal_matrix(n, p, seed).
ScoreMatrix mvn_sample(const CorrelationMatrix& sigma, std::size_t n, const SeedSpec& seed);
ScoreMatrix mvn_sample(const GramFactor& factor, std::size_t n, const SeedSpec& seed);

/// Consecutive row blocks; throws SizeMismatch unless nss * sss == y.rows().
std::vector<ScoreMatrix> split_subsamples(const ScoreMatrix& y, std::size_t nss,
                                          std::size_t sss);

}  // namespace valsim
