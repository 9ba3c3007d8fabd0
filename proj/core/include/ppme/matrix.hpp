#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace ppme {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when operands of a matrix operation have incompatible shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an eigenvalue routine receives a matrix that is not Hermitian
/// within kHermitianTolerance.
class NotHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Entrywise bound on |H - H^dagger| accepted by the Hermitian eigensolver.
inline constexpr double kHermitianTolerance = 1e-9;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);
  /// Row-major nested initializer; every row must have as many entries as
  /// there are rows.
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t dim() const { return dim_; }
  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  /// Largest entry modulus.
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(ComplexMatrix m, Complex scale);

std::vector<Complex> apply(const ComplexMatrix& m, std::span<const Complex> v);

/// A*B - B*A.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product a (x) b; a indexes the slow (outer) factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over the second factor of a (outer_dim * inner_dim) space.
ComplexMatrix partial_trace_inner(const ComplexMatrix& m, std::size_t outer_dim,
                                  std::size_t inner_dim);

/// max_ij |H_ij - conj(H_ji)|.
double hermiticity_residual(const ComplexMatrix& m);

/// Max entrywise |a - b|.
double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b);

/// Frobenius norm.
double frobenius_norm(const ComplexMatrix& m);

/// Real eigenvalues of a Hermitian matrix in ascending order.
///
/// Uses cyclic complex Jacobi rotations, which keep absolute accuracy at the
/// level of eps * ||H|| even for degenerate spectra (rank-one projectors,
/// multiples of the identity). Dimension 3 runs on fixed-size storage.
/// Throws NotHermitianError if hermiticity_residual(h) > kHermitianTolerance.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

/// <v|H|v> / <v|v>; v must be nonzero.
double rayleigh_quotient(const ComplexMatrix& h, std::span<const Complex> v);

// Fixed-size 3x3 path used by the trajectory and master-equation hot loops.
using Vec3 = std::array<Complex, 3>;
using Mat3 = std::array<Complex, 9>;

Mat3 to_mat3(const ComplexMatrix& m);
ComplexMatrix from_mat3(const Mat3& m);

inline Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Mat3 mul(const Mat3& a, const Mat3& b);
Mat3 adjoint(const Mat3& m);
std::array<double, 3> hermitian_eigenvalues3(const Mat3& h);

}  // namespace ppme
