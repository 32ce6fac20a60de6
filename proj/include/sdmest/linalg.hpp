#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "sdmest/rng.hpp"

namespace sdmest {

using cxd = std::complex<double>;

/// Dense complex matrix, row-major. Sized for the small (D <= 12) systems of
/// this project but written for general dimensions.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static CMat identity(std::size_t n);
  static CMat diagonal(const std::vector<cxd>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_ && rows_ > 0; }

  cxd& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  CMat adjoint() const;
  CMat operator*(const CMat& rhs) const;
  CMat operator+(const CMat& rhs) const;
  CMat operator-(const CMat& rhs) const;
  CMat& operator*=(cxd s);

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  /// max |M - M^H| over entries; matrix must be square.
  double hermitian_residual() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cxd> a_;
};

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  std::optional<CMat> eigenvectors; // columns, same order as eigenvalues
};

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Converged when the off-diagonal Frobenius norm drops below 1e-12 times the
/// diagonal norm. Throws std::invalid_argument on non-square or non-Hermitian
/// input (tolerance 1e-10 on max |M - M^H|).
EigenResult hermitian_eigenvalues(const CMat& m, bool want_vectors = false);

/// Gauss-Jordan inverse with partial pivoting. Throws std::runtime_error on
/// singular input or when the Frobenius condition estimate reaches 1e12.
CMat invert(const CMat& m);

/// Haar-distributed random unitary: QR of an i.i.d. standard-complex-Gaussian
/// matrix, with columns rephased by the R-diagonal phases so the distribution
/// is invariant under fixed unitary left-multiplication.
CMat sample_haar_unitary(std::size_t n, Rng& rng);

}  // namespace sdmest
