#include "valsim/mvn_sampler.hpp"

#include <cmath>
#include <string>

#include "valsim/error.hpp"

namespace valsim {

namespace {

void validate_correlation(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    raise(ErrorCode::kInvalidArgument,
          "correlation matrix must be square and non-empty, got " +
              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const Eigen::Index p = m.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (m(i, i) != 1.0) {
      raise(ErrorCode::kInvalidArgument,
            "correlation matrix diagonal entry (" + std::to_string(i + 1) + "," +
                std::to_string(i + 1) + ") is not 1");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (!std::isfinite(m(i, j)) || m(i, j) != m(j, i)) {
        raise(ErrorCode::kInvalidArgument,
              "correlation matrix is not symmetric at (" + std::to_string(i + 1) +
                  "," + std::to_string(j + 1) + ")");
      }
      if (m(i, j) < -1.0 || m(i, j) > 1.0) {
        raise(ErrorCode::kInvalidArgument,
              "correlation entry (" + std::to_string(i + 1) + "," +
                  std::to_string(j + 1) + ") outside [-1, 1]");
      }
    }
  }
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      raise(ErrorCode::kInvalidArgument, "correlation matrix rows must have equal length");
    }
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix values) : values_(std::move(values)) {
  validate_correlation(values_);
}

CorrelationMatrix::CorrelationMatrix(
    std::initializer_list<std::initializer_list<double>> rows)
    : CorrelationMatrix(from_rows(rows)) {}

CorrelationMatrix CorrelationMatrix::identity(Eigen::Index order) {
  return CorrelationMatrix(Matrix::Identity(order, order), TrustedTag{});
}

CorrelationMatrix CorrelationMatrix::trusted(Matrix values) {
  return CorrelationMatrix(std::move(values), TrustedTag{});
}

GramFactor gram_factor(const CorrelationMatrix& sigma) {
  const Matrix& s = sigma.matrix();
  const Eigen::Index p = s.rows();
  Matrix lower = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = s(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (pivot < -kSemidefiniteTolerance) {
      raise(ErrorCode::kNotPositiveSemidefinite,
            "Cholesky pivot " + std::to_string(pivot) + " at column " +
                std::to_string(j + 1));
    }
    const double diag = pivot > 0.0 ? std::sqrt(pivot) : 0.0;
    lower(j, j) = diag;
    for (Eigen::Index i = j + 1; i < p; ++i) {
      double v = s(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      if (diag == 0.0) {
        // A zero pivot forces the whole column below it to vanish.
        if (std::abs(v) > kSemidefiniteTolerance) {
          raise(ErrorCode::kNotPositiveSemidefinite,
                "zero pivot at column " + std::to_string(j + 1) +
                    " with nonzero residual " + std::to_string(v));
        }
        lower(i, j) = 0.0;
      } else {
        lower(i, j) = v / diag;
      }
    }
  }
  return GramFactor(std::move(lower));
}

ScoreMatrix standard_normal_matrix(std::size_t n, std::size_t p, const SeedSpec& seed) {
  if (n < 1 || p < 1) {
    raise(ErrorCode::kInvalidArgument, "standard_normal_matrix requires n >= 1 and p >= 1");
  }
  NormalStream stream(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = stream.next();
  }
  return ScoreMatrix(std::move(x));
}

ScoreMatrix mvn_sample(const GramFactor& factor, std::size_t n, const SeedSpec& seed) {
  const ScoreMatrix x =
      standard_normal_matrix(n, static_cast<std::size_t>(factor.order()), seed);
  const Matrix& a = factor.lower();
  const Matrix& xv = x.matrix();
  // Explicit triangular product keeps the summation order fixed.
  Matrix y(xv.rows(), xv.cols());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k <= j; ++k) acc += xv(i, k) * a(j, k);
      y(i, j) = acc;
    }
  }
  return ScoreMatrix(std::move(y));
}

ScoreMatrix mvn_sample(const CorrelationMatrix& sigma, std::size_t n, const SeedSpec& seed) {
  return mvn_sample(gram_factor(sigma), n, seed);
}

std::vector<ScoreMatrix> split_subsamples(const ScoreMatrix& y, std::size_t nss,
                                          std::size_t sss) {
  if (nss == 0 || sss == 0 || nss * sss != static_cast<std::size_t>(y.rows())) {
    raise(ErrorCode::kSizeMismatch,
          std::to_string(nss) + " x " + std::to_string(sss) + " != " +
              std::to_string(y.rows()) + " rows");
  }
  std::vector<ScoreMatrix> parts;
  parts.reserve(nss);
  for (std::size_t s = 0; s < nss; ++s) {
    parts.emplace_back(Matrix(y.matrix().middleRows(
        static_cast<Eigen::Index>(s * sss), static_cast<Eigen::Index>(sss))));
  }
  return parts;
}

}  // namespace valsim
