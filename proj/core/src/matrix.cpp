#include "ppme/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ppme {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_.size() != dim_ * dim_) {
    throw DimensionError("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                         " entries, got " + std::to_string(entries_.size()));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
  entries_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DimensionError("ComplexMatrix: rows must form a square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

static void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator+=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator-=");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
ComplexMatrix operator*(ComplexMatrix m, Complex scale) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_same_dim(lhs, rhs, "operator*");
  const std::size_t n = lhs.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

std::vector<Complex> apply(const ComplexMatrix& m, std::span<const Complex> v) {
  if (v.size() != m.dim()) throw DimensionError("apply: vector length does not match matrix");
  std::vector<Complex> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix partial_trace_inner(const ComplexMatrix& m, std::size_t outer_dim,
                                  std::size_t inner_dim) {
  if (m.dim() != outer_dim * inner_dim) {
    throw DimensionError("partial_trace_inner: matrix is not outer_dim * inner_dim");
  }
  ComplexMatrix out(outer_dim);
  for (std::size_t i = 0; i < outer_dim; ++i)
    for (std::size_t j = 0; j < outer_dim; ++j)
      for (std::size_t k = 0; k < inner_dim; ++k)
        out(i, j) += m(i * inner_dim + k, j * inner_dim + k);
  return out;
}

double hermiticity_residual(const ComplexMatrix& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      r = std::max(r, std::abs(m(i, j) - std::conj(m(j, i))));
  return r;
}

double max_abs_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_difference");
  double r = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    r = std::max(r, std::abs(a.entries()[k] - b.entries()[k]));
  return r;
}

double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

namespace {

// Cyclic Jacobi on a Hermitian matrix held in row-major storage `a` of
// dimension n. Destroys `a`; returns the diagonal in ascending order.
template <typename Storage>
void jacobi_diagonalize(Storage& a, std::size_t n) {
  auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };
  // Symmetrize so that roundoff-level anti-Hermitian parts cannot stall
  // convergence.
  for (std::size_t i = 0; i < n; ++i) {
    at(i, i) = at(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex h = 0.5 * (at(i, j) + std::conj(at(j, i)));
      at(i, j) = h;
      at(j, i) = std::conj(h);
    }
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) scale += std::norm(a[k]);
  if (scale == 0.0) return;

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += std::norm(at(i, j));
    if (off <= 1e-32 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = std::abs(at(p, q));
        if (g == 0.0) continue;
        const Complex phase = at(p, q) / g;  // e^{i phi}
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        // U = diag(1, e^{-i phi}) on (p,q) followed by a real rotation.
        const Complex upp = c, upq = s;
        const Complex uqp = -s * std::conj(phase), uqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = at(k, p), akq = at(k, q);
          at(k, p) = akp * upp + akq * uqp;
          at(k, q) = akp * upq + akq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = at(p, k), aqk = at(q, k);
          at(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          at(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        at(p, p) = at(p, p).real();
        at(q, q) = at(q, q).real();
      }
    }
  }
}

void require_hermitian(const ComplexMatrix& h) {
  const double r = hermiticity_residual(h);
  if (r > kHermitianTolerance) {
    throw NotHermitianError("hermitian_eigenvalues: hermiticity residual " + std::to_string(r) +
                            " exceeds tolerance");
  }
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  require_hermitian(h);
  if (h.dim() == 3) {
    const auto e = hermitian_eigenvalues3(to_mat3(h));
    return {e.begin(), e.end()};
  }
  std::vector<Complex> a(h.entries().begin(), h.entries().end());
  jacobi_diagonalize(a, h.dim());
  std::vector<double> out(h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i) out[i] = a[i * h.dim() + i].real();
  std::sort(out.begin(), out.end());
  return out;
}

double rayleigh_quotient(const ComplexMatrix& h, std::span<const Complex> v) {
  const auto hv = apply(h, v);
  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += std::conj(v[i]) * hv[i];
    den += std::norm(v[i]);
  }
  if (den == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
  return num.real() / den;
}

Mat3 to_mat3(const ComplexMatrix& m) {
  if (m.dim() != 3) throw DimensionError("to_mat3: matrix is not 3x3");
  Mat3 out;
  std::copy(m.entries().begin(), m.entries().end(), out.begin());
  return out;
}

ComplexMatrix from_mat3(const Mat3& m) { return ComplexMatrix(3, {m.begin(), m.end()}); }

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const Complex x = a[i * 3 + k];
      out[i * 3 + 0] += x * b[k * 3 + 0];
      out[i * 3 + 1] += x * b[k * 3 + 1];
      out[i * 3 + 2] += x * b[k * 3 + 2];
    }
  return out;
}

Mat3 adjoint(const Mat3& m) {
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[j * 3 + i] = std::conj(m[i * 3 + j]);
  return out;
}

std::array<double, 3> hermitian_eigenvalues3(const Mat3& h) {
  Mat3 a = h;
  jacobi_diagonalize(a, 3);
  std::array<double, 3> out{a[0].real(), a[4].real(), a[8].real()};
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ppme
