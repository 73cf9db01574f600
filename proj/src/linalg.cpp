#include "tsdapt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsdapt/error.hpp"

namespace tsdapt::linalg {

namespace {

constexpr int kMaxSweeps = 100;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

// Unregularized sample covariance, exactly symmetric by construction.
Matrix sample_covariance(const Matrix& x) {
  require(x.rows() >= 1 && x.cols() >= 1, "covariance: need at least one row");
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const auto mean = column_means(x);
  const double denom = static_cast<double>(std::max<std::size_t>(n - 1, 1));
  Matrix c(d, d);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (x(i, p) - mean[p]) * (x(i, q) - mean[q]);
      c(p, q) = s / denom;
      c(q, p) = c(p, q);
    }
  }
  return c;
}

// Sorts eigen/singular pairs descending; ties keep their original order.
std::vector<std::size_t> descending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

Matrix permute_columns(const Matrix& m, const std::vector<std::size_t>& order) {
  Matrix out(m.rows(), order.size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < order.size(); ++c) out(r, c) = m(r, order[c]);
  return out;
}

// Fills the flagged columns of u with unit vectors orthogonal to every other
// column (Gram-Schmidt over the standard basis, applied twice).
void complete_orthonormal(Matrix& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows();
  std::vector<bool> filled(u.cols());
  for (std::size_t c = 0; c < u.cols(); ++c) filled[c] = !missing[c];
  std::size_t next_basis = 0;
  for (std::size_t c = 0; c < u.cols(); ++c) {
    if (filled[c]) continue;
    while (next_basis < m) {
      std::vector<double> v(m, 0.0);
      v[next_basis++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < u.cols(); ++k) {
          if (!filled[k]) continue;
          double proj = 0.0;
          for (std::size_t r = 0; r < m; ++r) proj += u(r, k) * v[r];
          for (std::size_t r = 0; r < m; ++r) v[r] -= proj * u(r, k);
        }
      }
      double norm = std::sqrt(dot(v, v));
      if (norm > 0.5) {
        for (std::size_t r = 0; r < m; ++r) u(r, c) = v[r] / norm;
        filled[c] = true;
        break;
      }
    }
    if (!filled[c]) throw Error(ErrorCode::NumericalFailure, "svd: cannot complete basis");
  }
}

Svd svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorCode::NumericalFailure, "svd: Jacobi sweeps did not converge");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(s);
  }
  const auto order = descending_order(sigma);
  Svd out;
  out.u = Matrix(m, n);
  out.v = permute_columns(v, order);
  out.singular_values.resize(n);
  std::vector<bool> missing(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t j = order[c];
    out.singular_values[c] = sigma[j];
    if (sigma[j] <= 1e-200) {
      missing[c] = true;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) out.u(i, c) = w(i, j) / sigma[j];
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end())
    complete_orthonormal(out.u, missing);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(0, rows.empty() ? 0 : rows.front().size());
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  require(values.size() == cols_, "Matrix::append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix difference: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
  if (x.rows() > 0)
    for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

Matrix select_rows(const Matrix& x, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), x.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    auto src = x.row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

SpdEstimate::SpdEstimate(Matrix matrix, double ridge) : matrix_(std::move(matrix)), ridge_(ridge) {
  require(matrix_.rows() == matrix_.cols() && matrix_.rows() >= 1, "SpdEstimate: need a square matrix");
  require(std::isfinite(ridge_) && ridge_ >= 0.0, "SpdEstimate: ridge must be nonnegative");
  require(matrix_.all_finite(), "SpdEstimate: non-finite entries");
  const std::size_t d = matrix_.rows();
  double scale = 0.0;
  for (double v : matrix_.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      require(std::abs(matrix_(i, j) - matrix_(j, i)) <= 1e-12 * scale, "SpdEstimate: matrix is not symmetric");
  for (std::size_t i = 0; i < d; ++i) matrix_(i, i) += ridge_;

  chol_ = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = matrix_(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= chol_(j, k) * chol_(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag))
      throw Error(ErrorCode::DegenerateCovariance,
                  "Cholesky pivot " + std::to_string(j) + " is not positive; raise the ridge");
    const double ljj = std::sqrt(diag);
    chol_(j, j) = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = matrix_(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= chol_(i, k) * chol_(j, k);
      chol_(i, j) = s / ljj;
    }
  }
  for (std::size_t i = 0; i < d; ++i) logdet_ += 2.0 * std::log(chol_(i, i));
}

SpdEstimate covariance(const Matrix& x, double ridge) {
  return SpdEstimate(sample_covariance(x), ridge);
}

double default_ridge(const Matrix& x) {
  const Matrix c = sample_covariance(x);
  const double r = 1e-6 * trace(c) / static_cast<double>(c.rows());
  return std::max(r, 1e-12);
}

SymEig sym_eig(const Matrix& a_in) {
  require(a_in.rows() == a_in.cols() && a_in.rows() >= 1, "sym_eig: need a square matrix");
  const std::size_t n = a_in.rows();
  Matrix a = a_in;
  Matrix v = Matrix::identity(n);
  const double norm = frobenius_norm(a);
  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0 || std::sqrt(off) <= 1e-15 * norm) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NumericalFailure, "sym_eig: Jacobi sweeps did not converge");

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = descending_order(diag);
  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = diag[order[i]];
  out.vectors = permute_columns(v, order);
  return out;
}

Svd svd(const Matrix& a) {
  require(a.rows() >= 1 && a.cols() >= 1, "svd: empty matrix");
  require(a.all_finite(), "svd: non-finite entries");
  if (a.rows() >= a.cols()) return svd_tall(a);
  Svd t = svd_tall(a.transpose());
  return Svd{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

Matrix spd_solve(const SpdEstimate& s, const Matrix& b) {
  const std::size_t d = s.dim();
  require(b.rows() == d, "spd_solve: row count mismatch");
  const Matrix& l = s.chol();
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double v = x(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x(k, c);
      x(i, c) = v / l(i, i);
    }
    for (std::size_t i = d; i-- > 0;) {
      double v = x(i, c);
      for (std::size_t k = i + 1; k < d; ++k) v -= l(k, i) * x(k, c);
      x(i, c) = v / l(i, i);
    }
  }
  return x;
}

Matrix fractional_spd_power(const SpdEstimate& s, double p) {
  const SymEig eig = sym_eig(s.matrix());
  const std::size_t d = s.dim();
  const double cutoff = kRankCutoff * std::max(eig.values.front(), 0.0);
  std::vector<double> powered(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double lambda = eig.values[i];
    if (p < 0.0)
      powered[i] = lambda <= cutoff ? 0.0 : std::pow(lambda, p);
    else
      powered[i] = lambda <= 0.0 ? 0.0 : std::pow(lambda, p);
  }
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += eig.vectors(i, k) * powered[k] * eig.vectors(j, k);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

std::size_t numerical_rank(const SymEig& eig) {
  if (eig.values.empty()) return 0;
  const double cutoff = kRankCutoff * std::max(eig.values.front(), 0.0);
  return static_cast<std::size_t>(
      std::count_if(eig.values.begin(), eig.values.end(), [&](double l) { return l > cutoff; }));
}

}  // namespace tsdapt::linalg
