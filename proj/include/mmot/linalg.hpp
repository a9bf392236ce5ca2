#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mmot {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

  double frobenius_norm() const;
  double max_asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

// Eigenvalues ordered by modulus (descending); equal moduli (relative 1e-8)
// are ordered by argument in [0, 2pi), so the member of a conjugate pair with
// positive imaginary part comes first.
using ComplexSpectrum = std::vector<std::complex<double>>;

void canonical_sort(ComplexSpectrum& values);

// All eigenvalues of a square matrix: balancing, reduction to upper
// Hessenberg form and Francis double-shift QR. Throws NoConvergence after
// 100 * dim QR sweeps.
ComplexSpectrum eig_general(const DenseMatrix& m);

enum class Which { Smallest, Largest };

struct SymmetricEigen {
  std::vector<double> values;  // ordered as requested: ascending for Smallest
  DenseMatrix vectors;         // column c belongs to values[c]
};

// Cyclic Jacobi rotations; requires symmetry within 1e-9 (relative to the
// largest entry).
SymmetricEigen eig_symmetric(const DenseMatrix& m, std::size_t k, Which which);

}  // namespace mmot
