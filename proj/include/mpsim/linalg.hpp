#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsim {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense real matrix, row-major storage.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> entries() const { return data_; }
  std::span<double> entries() { return data_; }

  bool all_finite() const;
  double max_abs() const;
  double trace() const;
  double frobenius_norm_squared() const;

  DenseMatrix transpose() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

// Ascending eigenvalues of a symmetric matrix.
struct Spectrum {
  std::vector<double> eigenvalues;

  std::size_t size() const { return eigenvalues.size(); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

/// W = (1/m) X Xᵀ for a p×m data matrix X. The result is exactly symmetric.
DenseMatrix sample_covariance(const DenseMatrix& x);

/// Eigenvalues of (S + Sᵀ)/2 via Householder tridiagonalization followed by
/// implicit-shift QL. Throws LinalgError on non-finite input or when an
/// eigenvalue fails to converge within the iteration cap.
Spectrum eigvalsh(const DenseMatrix& s);

/// Largest singular value. Computed from the spectrum of AᵀA (or AAᵀ,
/// whichever is smaller).
double spectral_norm(const DenseMatrix& a);

struct SpectrumResiduals {
  double trace_residual = 0.0;      // |Σλ − tr S|
  double frobenius_residual = 0.0;  // |Σλ² − ‖S‖²_F|
  double tolerance = 0.0;           // p·1e-10·max|S| (scaled by max|S| for the squared sum)
  bool ok() const;
};

/// Trace and Frobenius consistency between a symmetric matrix and its computed spectrum.
SpectrumResiduals spectrum_residuals(const DenseMatrix& s, const Spectrum& spectrum);

/// Deterministic pairwise summation.
double pairwise_sum(std::span<const double> values);

}  // namespace mpsim
