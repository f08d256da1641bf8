#include "mpsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpsim {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw LinalgError("DenseMatrix: entry count " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

double DenseMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double DenseMatrix::frobenius_norm_squared() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw LinalgError("matrix product: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

// Householder reduction of a full symmetric matrix (row-major, n×n, destroyed)
// to tridiagonal form. diag gets the n diagonal entries, off[i] couples i and i+1.
void tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& diag,
                    std::vector<double>& off) {
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  std::vector<double> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    const double* col = &a[k * n + k + 1];  // row k right of the diagonal == column k below it
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(col[i]));
    diag[k] = a[k * n + k];
    if (scale == 0.0) {
      off[k] = 0.0;
      continue;
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = col[i] / scale;
      norm2 += v[i] * v[i];
    }
    const double norm = std::sqrt(norm2);
    const double alpha = v[0] > 0.0 ? -norm : norm;
    off[k] = alpha * scale;
    v[0] -= alpha;
    const double vnorm2 = norm2 - 2.0 * alpha * (v[0] + alpha) + alpha * alpha;
    if (vnorm2 == 0.0) continue;
    const double tau = 2.0 / vnorm2;

    double* trailing = &a[(k + 1) * n + (k + 1)];
    for (std::size_t i = 0; i < m; ++i) p[i] = tau * dot(trailing + i * n, v.data(), m);
    const double half = 0.5 * tau * dot(p.data(), v.data(), m);
    for (std::size_t i = 0; i < m; ++i) p[i] -= half * v[i];
    for (std::size_t i = 0; i < m; ++i) {
      double* row = trailing + i * n;
      const double vi = v[i];
      const double wi = p[i];
#pragma omp simd
      for (std::size_t j = 0; j < m; ++j) row[j] -= vi * p[j] + wi * v[j];
    }
  }
  if (n >= 2) {
    diag[n - 2] = a[(n - 2) * n + (n - 2)];
    off[n - 2] = a[(n - 2) * n + (n - 1)];
  }
  if (n >= 1) diag[n - 1] = a[(n - 1) * n + (n - 1)];
  off[n - 1] = 0.0;
}

// Implicit-shift QL on a symmetric tridiagonal matrix; eigenvalues overwrite diag.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double>& off) {
  constexpr int kMaxIterations = 60;
  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t n = diag.size();
  for (std::size_t l = 0; l < n; ++l) {
    int iterations = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > kMaxIterations) {
        throw LinalgError("eigvalsh: QL iteration did not converge for eigenvalue " +
                          std::to_string(l));
      }
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, shift = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * off[i];
        const double b = c * off[i];
        r = std::hypot(f, g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= shift;
          off[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - shift;
        r = (diag[i] - g) * s + 2.0 * c * b;
        shift = s * r;
        diag[i + 1] = g + shift;
        g = c * r - b;
      }
      if (underflow) continue;
      diag[l] -= shift;
      off[l] = g;
      off[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

DenseMatrix sample_covariance(const DenseMatrix& x) {
  const std::size_t p = x.rows();
  const std::size_t m = x.cols();
  if (m == 0) throw LinalgError("sample_covariance: data matrix has no columns");
  if (!x.all_finite()) throw LinalgError("sample_covariance: non-finite entry");

  constexpr std::size_t kRowBlock = 48;
  constexpr std::size_t kColBlock = 512;
  DenseMatrix w(p, p);
  for (std::size_t k0 = 0; k0 < m; k0 += kColBlock) {
    const std::size_t kn = std::min(kColBlock, m - k0);
    for (std::size_t i0 = 0; i0 < p; i0 += kRowBlock) {
      const std::size_t i1 = std::min(p, i0 + kRowBlock);
      for (std::size_t j0 = 0; j0 <= i0; j0 += kRowBlock) {
        const std::size_t j1 = std::min(p, j0 + kRowBlock);
        for (std::size_t i = i0; i < i1; ++i) {
          const double* xi = x.row(i).data() + k0;
          const std::size_t jend = std::min(j1, i + 1);
          for (std::size_t j = j0; j < jend; ++j) {
            w(i, j) += dot(xi, x.row(j).data() + k0, kn);
          }
        }
      }
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      w(i, j) *= inv_m;
      w(j, i) = w(i, j);
    }
  }
  return w;
}

Spectrum eigvalsh(const DenseMatrix& s) {
  if (!s.square()) throw LinalgError("eigvalsh: matrix is not square");
  if (!s.all_finite()) throw LinalgError("eigvalsh: non-finite entry");
  const std::size_t n = s.rows();
  Spectrum out;
  if (n == 0) return out;

  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (s(i, j) + s(j, i));

  std::vector<double> diag, off;
  tridiagonalize(a, n, diag, off);
  tridiagonal_ql(diag, off);
  std::sort(diag.begin(), diag.end());
  out.eigenvalues = std::move(diag);
  return out;
}

double spectral_norm(const DenseMatrix& a) {
  if (!a.all_finite()) throw LinalgError("spectral_norm: non-finite entry");
  if (a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0) return 0.0;
  // Gram matrix of the smaller side.
  const bool wide = a.cols() > a.rows();
  const std::size_t n = wide ? a.rows() : a.cols();
  DenseMatrix gram(n, n);
  if (wide) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        gram(i, j) = gram(j, i) = dot(a.row(i).data(), a.row(j).data(), a.cols());
  } else {
    const DenseMatrix t = a.transpose();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        gram(i, j) = gram(j, i) = dot(t.row(i).data(), t.row(j).data(), t.cols());
  }
  const Spectrum spec = eigvalsh(gram);
  return std::sqrt(std::max(0.0, spec.max()));
}

bool SpectrumResiduals::ok() const {
  return trace_residual <= tolerance && frobenius_residual <= tolerance;
}

SpectrumResiduals spectrum_residuals(const DenseMatrix& s, const Spectrum& spectrum) {
  SpectrumResiduals r;
  const double p = static_cast<double>(s.rows());
  const double scale = s.max_abs();
  std::vector<double> squares(spectrum.eigenvalues.size());
  std::transform(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(), squares.begin(),
                 [](double v) { return v * v; });
  r.trace_residual = std::abs(pairwise_sum(spectrum.eigenvalues) - s.trace());
  // The squared sum lives on the scale max|S|², so it is compared after dividing by max|S|.
  const double frob = s.frobenius_norm_squared();
  r.frobenius_residual =
      scale > 0.0 ? std::abs(pairwise_sum(squares) - frob) / scale : std::abs(pairwise_sum(squares) - frob);
  r.tolerance = p * 1e-10 * std::max(scale, std::numeric_limits<double>::min());
  return r;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace mpsim
