#include "hdlrt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hdlrt {

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 1) {
    throw InvalidData("data matrix needs at least 2 rows and 1 column, got " +
                      std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
  }
  if (!values_.all_finite()) {
    throw InvalidData("data matrix contains non-finite entries");
  }
}

SymmetricMatrix::SymmetricMatrix(Matrix values) {
  if (values.rows() != values.cols()) {
    throw DimensionMismatch("symmetric matrix must be square, got " +
                            std::to_string(values.rows()) + "x" + std::to_string(values.cols()));
  }
  if (!values.all_finite()) {
    throw InvalidData("symmetric matrix contains non-finite entries");
  }
  const std::size_t p = values.rows();
  double max_abs = 0.0;
  for (double v : values.data()) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(values(i, j) - values(j, i)) > 1e-12 * max_abs) {
        throw InvalidData("matrix is not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      }
      const double avg = 0.5 * (values(i, j) + values(j, i));
      values(i, j) = avg;
      values(j, i) = avg;
    }
  }
  values_ = std::move(values);
}

SymmetricMatrix make_symmetric_unchecked(Matrix values) {
  SymmetricMatrix m;
  m.values_ = std::move(values);
  return m;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t p) {
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i) m(i, i) = 1.0;
  return make_symmetric_unchecked(std::move(m));
}

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += values_(i, i);
  return t;
}

SymmetricMatrix SymmetricMatrix::block(std::size_t offset, std::size_t size) const {
  if (offset + size > dim()) {
    throw DimensionMismatch("block exceeds matrix dimension");
  }
  Matrix b(size, size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) b(i, j) = values_(offset + i, offset + j);
  return make_symmetric_unchecked(std::move(b));
}

SymmetricMatrix SymmetricMatrix::scaled(double factor) const {
  Matrix b(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) b(i, j) = factor * values_(i, j);
  return make_symmetric_unchecked(std::move(b));
}

CholeskyFactor CholeskyFactor::compute(const SymmetricMatrix& m) {
  const std::size_t p = m.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, m(i, i));
  if (!(max_diag > 0.0)) {
    throw NotPositiveDefinite("matrix diagonal is not positive");
  }
  constexpr double kRelPivotTol = 1e-13;
  const double pivot_floor = kRelPivotTol * max_diag;

  Matrix L(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > pivot_floor)) {
      throw NotPositiveDefinite("Cholesky pivot " + std::to_string(j) +
                                " at or below tolerance; matrix is numerically rank deficient");
    }
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  CholeskyFactor f;
  f.lower_ = std::move(L);
  return f;
}

double CholeskyFactor::log_determinant() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

void CholeskyFactor::solve_lower(std::span<double> x) const {
  const std::size_t p = dim();
  for (std::size_t i = 0; i < p; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * x[k];
    x[i] = s / lower_(i, i);
  }
}

MeanScatter mean_and_scatter(const DataMatrix& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);

  Matrix scatter(p, p);
  std::vector<double> c(p);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < p; ++j) c[j] = row[j] - mean[j];
    for (std::size_t j = 0; j < p; ++j) {
      const double cj = c[j];
      double* out = &scatter(j, j);
      for (std::size_t k = j; k < p; ++k) out[k - j] += cj * c[k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) scatter(j, k) = scatter(k, j);
  return {std::move(mean), make_symmetric_unchecked(std::move(scatter))};
}

SymmetricMatrix sample_correlation(const DataMatrix& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  MeanScatter ms = mean_and_scatter(data);

  // A column counts as constant when its centered sum of squares is no larger
  // than the rounding noise of the centering itself.
  std::vector<double> max_abs(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < p; ++j) max_abs[j] = std::max(max_abs[j], std::abs(row[j]));
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double noise = 16.0 * 2.220446049250313e-16 * (max_abs[j] + std::abs(ms.mean[j]));
    if (ms.scatter(j, j) <= static_cast<double>(n) * noise * noise) {
      throw DegenerateColumn("column " + std::to_string(j) + " is constant");
    }
  }

  Matrix r(p, p);
  std::vector<double> inv_norm(p);
  for (std::size_t j = 0; j < p; ++j) inv_norm[j] = 1.0 / std::sqrt(ms.scatter(j, j));
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      const double v = std::clamp(ms.scatter(i, j) * inv_norm[i] * inv_norm[j], -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return make_symmetric_unchecked(std::move(r));
}

double logdet_spd(const SymmetricMatrix& m) {
  return CholeskyFactor::compute(m).log_determinant();
}

}  // namespace hdlrt
