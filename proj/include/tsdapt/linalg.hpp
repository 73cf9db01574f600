#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tsdapt::linalg {

// Dense row-major matrix. Zero-row matrices are allowed so that empty
// datasets can travel through the I/O layer; numerical routines reject them.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void append_row(std::span<const double> values);

  Matrix transpose() const;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm(const Matrix& a);
double trace(const Matrix& a);
double dot(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);

// Column means of X (length X.cols()), summed in row order.
std::vector<double> column_means(const Matrix& x);

// Rows of X selected by index, in the given order.
Matrix select_rows(const Matrix& x, std::span<const std::size_t> indices);

// Covariance with a ridge on the diagonal and its Cholesky factorization.
// Construction fails with DegenerateCovariance when a pivot is not positive.
class SpdEstimate {
 public:
  // matrix must be symmetric; ridge is added to its diagonal here.
  SpdEstimate(Matrix matrix, double ridge);

  std::size_t dim() const noexcept { return matrix_.rows(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  double ridge() const noexcept { return ridge_; }
  const Matrix& chol() const noexcept { return chol_; }
  double logdet() const noexcept { return logdet_; }

 private:
  Matrix matrix_;
  double ridge_;
  Matrix chol_;
  double logdet_ = 0.0;
};

// (1/max(n-1,1)) * (X - mean)^T (X - mean) + ridge * I.
SpdEstimate covariance(const Matrix& x, double ridge);

// Default ridge rule for covariance consumers: 1e-6 * trace / dim of the
// unregularized covariance, floored so that it is never zero.
double default_ridge(const Matrix& x);

struct SymEig {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

// Cyclic Jacobi. Throws NumericalFailure if the sweep cap is hit.
SymEig sym_eig(const Matrix& a);

struct Svd {
  Matrix u;                             // rows x k, orthonormal columns
  std::vector<double> singular_values;  // descending, k = min(rows, cols)
  Matrix v;                             // cols x k, orthonormal columns
};

// One-sided Jacobi (Hestenes). Throws NumericalFailure if the sweep cap is hit.
Svd svd(const Matrix& a);

// Solves S.matrix() * X = B with the stored Cholesky factor.
Matrix spd_solve(const SpdEstimate& s, const Matrix& b);

// Eigenvalues at or below this fraction of the largest are treated as zero.
inline constexpr double kRankCutoff = 1e-10;

// V diag(lambda^p) V^T. For p < 0 eigenvalues under the rank cutoff map to
// zero (pseudo-inverse semantics); for p > 0 negative round-off maps to zero.
Matrix fractional_spd_power(const SpdEstimate& s, double p);

// Number of eigenvalues above kRankCutoff * lambda_max.
std::size_t numerical_rank(const SymEig& eig);

}  // namespace tsdapt::linalg
