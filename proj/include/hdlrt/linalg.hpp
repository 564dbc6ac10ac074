#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdlrt/errors.hpp"

namespace hdlrt {

// Dense row-major matrix of doubles. Minimal on purpose: the statistics in
// this library only need means, scatter/correlation matrices and Cholesky
// factorizations of small (p <= a few hundred) symmetric matrices.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// An n x p sample: rows are observations, columns are variates.
// Invariants: n >= 2, p >= 1, all entries finite.
class DataMatrix {
public:
  explicit DataMatrix(Matrix values);

  std::size_t n() const { return values_.rows(); }
  std::size_t p() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }

private:
  Matrix values_;
};

// A p x p symmetric matrix. Construction verifies symmetry to within 1e-12
// relative to the largest entry and stores the symmetrized values.
class SymmetricMatrix {
public:
  explicit SymmetricMatrix(Matrix values);
  static SymmetricMatrix identity(std::size_t p);

  std::size_t dim() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

  double trace() const;
  SymmetricMatrix block(std::size_t offset, std::size_t size) const;
  SymmetricMatrix scaled(double factor) const;

private:
  SymmetricMatrix() = default;
  Matrix values_;
  friend class CholeskyFactor;
  friend SymmetricMatrix make_symmetric_unchecked(Matrix values);
};

// Internal: wrap an exactly-symmetric matrix without the tolerance check.
SymmetricMatrix make_symmetric_unchecked(Matrix values);

// Lower-triangular Cholesky factor of an SPD matrix. A pivot that falls at or
// below 1e-13 times the largest diagonal entry raises NotPositiveDefinite;
// this is the library's positive-definiteness test.
class CholeskyFactor {
public:
  static CholeskyFactor compute(const SymmetricMatrix& m);

  std::size_t dim() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }
  double log_determinant() const;  // of the factored matrix, 2*sum(log L_ii)

  // Solve L y = x in place.
  void solve_lower(std::span<double> x) const;

private:
  Matrix lower_;
};

struct MeanScatter {
  std::vector<double> mean;
  SymmetricMatrix scatter;  // sum_i (x_i - mean)(x_i - mean)', i.e. n * S
};

// Two-pass mean and scatter matrix.
MeanScatter mean_and_scatter(const DataMatrix& data);

// Pearson sample correlation matrix. Throws DegenerateColumn when a column is
// (numerically) constant.
SymmetricMatrix sample_correlation(const DataMatrix& data);

// log det of an SPD matrix via Cholesky. Throws NotPositiveDefinite when the
// pivot test fails (for example, a rank-deficient scatter with p >= n).
double logdet_spd(const SymmetricMatrix& m);

}  // namespace hdlrt
