#include "qsing/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qsing {

ComplexMatrix::ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
  if (dim < 1) throw ValidationError("matrix dimension must be >= 1");
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim())
    throw ValidationError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
}

}  // namespace

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  ComplexMatrix out(a.dim());
  for (std::size_t k = 0; k < out.entries().size(); ++k)
    out.entries()[k] = a.entries()[k] + b.entries()[k];
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  ComplexMatrix out(a.dim());
  for (std::size_t k = 0; k < out.entries().size(); ++k)
    out.entries()[k] = a.entries()[k] - b.entries()[k];
  return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  const int n = a.dim();
  ComplexMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cxd aik = a(i, k);
      if (aik == cxd{}) continue;
      for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix operator*(cxd scalar, const ComplexMatrix& a) {
  ComplexMatrix out(a.dim());
  for (std::size_t k = 0; k < out.entries().size(); ++k) out.entries()[k] = scalar * a.entries()[k];
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) out(i, j) = std::conj(a(j, i));
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const int na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const cxd aij = a(i, j);
      if (aij == cxd{}) continue;
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

cxd trace(const ComplexMatrix& a) {
  cxd t = 0.0;
  for (int i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const cxd& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cxd& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.dim() < 1) throw ValidationError("HermitianMatrix requires an initialized matrix");
  double worst = 0.0;
  for (int i = 0; i < m_.dim(); ++i)
    for (int j = i; j < m_.dim(); ++j)
      worst = std::max(worst, std::abs(m_(i, j) - std::conj(m_(j, i))));
  const double tol = 1e-10 * (1.0 + max_abs(m_));
  if (worst > tol)
    throw ValidationError("matrix is not Hermitian: max asymmetry " + std::to_string(worst));
}

namespace {

// Diagonalizes the 2x2 Hermitian block [[a, b], [conj(b), d]] with b != 0.
// Returns the unitary columns (u0, u1) for the smaller eigenvalue and
// (-conj(u1), conj(u0)) for the larger one.
void block_eigenvectors(double a, double d, cxd b, cxd& u0, cxd& u1) {
  const double half_gap = 0.5 * (d - a);
  const double r = std::hypot(half_gap, std::abs(b));
  cxd v0, v1;
  if (a >= d) {
    // lambda_minus - a = half_gap - r: both terms <= 0, no cancellation.
    v0 = b;
    v1 = cxd(half_gap - r, 0.0);
  } else {
    // lambda_plus - a = half_gap + r is safe; rotate its eigenvector by 90 degrees.
    const double t = half_gap + r;
    v0 = cxd(-t, 0.0);
    v1 = std::conj(b);
  }
  const double nv = std::sqrt(std::norm(v0) + std::norm(v1));
  u0 = v0 / nv;
  u1 = v1 / nv;
}

}  // namespace

EigDecomposition eigh(const HermitianMatrix& a) {
  const int n = a.dim();
  // Work on the exactly-Hermitian average to absorb tolerance-level asymmetry.
  ComplexMatrix w(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(1.0, frobenius_norm(w));
  const double stop = 1e-15 * scale;
  const int max_sweeps = 100;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * std::norm(w(i, j));
    if (std::sqrt(off) <= stop) break;
    if (sweep == max_sweeps - 1) throw Error("eigh: Jacobi sweep limit reached");

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cxd b = w(p, q);
        if (std::abs(b) <= 1e-300) {
          w(p, q) = 0.0;
          w(q, p) = 0.0;
          continue;
        }
        cxd u0, u1;
        block_eigenvectors(w(p, p).real(), w(q, q).real(), b, u0, u1);
        const cxd g_pq = -std::conj(u1), g_qq = std::conj(u0);
        // Columns: W <- W G
        for (int k = 0; k < n; ++k) {
          const cxd wp = w(k, p), wq = w(k, q);
          w(k, p) = wp * u0 + wq * u1;
          w(k, q) = wp * g_pq + wq * g_qq;
        }
        // Rows: W <- G^dagger W
        for (int k = 0; k < n; ++k) {
          const cxd wp = w(p, k), wq = w(q, k);
          w(p, k) = std::conj(u0) * wp + std::conj(u1) * wq;
          w(q, k) = std::conj(g_pq) * wp + std::conj(g_qq) * wq;
        }
        w(p, q) = 0.0;
        w(q, p) = 0.0;
        w(p, p) = cxd(w(p, p).real(), 0.0);
        w(q, q) = cxd(w(q, q).real(), 0.0);
        // V <- V G
        for (int k = 0; k < n; ++k) {
          const cxd vp = v(k, p), vq = v(k, q);
          v(k, p) = vp * u0 + vq * u1;
          v(k, q) = vp * g_pq + vq * g_qq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return w(i, i).real() < w(j, j).real(); });

  EigDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n);
  for (int c = 0; c < n; ++c) {
    out.eigenvalues[c] = w(order[c], order[c]).real();
    for (int r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
  }
  return out;
}

namespace {

HermitianMatrix spectral_map(const EigDecomposition& eig, const std::vector<double>& mapped) {
  const int n = eig.eigenvectors.dim();
  ComplexMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cxd s = 0.0;
      for (int k = 0; k < n; ++k)
        s += eig.eigenvectors(i, k) * mapped[k] * std::conj(eig.eigenvectors(j, k));
      out(i, j) = s;
    }
  // Force exact Hermiticity before wrapping.
  for (int i = 0; i < n; ++i) {
    out(i, i) = cxd(out(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      const cxd avg = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = avg;
      out(j, i) = std::conj(avg);
    }
  }
  return HermitianMatrix(std::move(out));
}

}  // namespace

HermitianMatrix matrix_log(const HermitianMatrix& p, double eigen_floor) {
  const EigDecomposition eig = eigh(p);
  if (eig.eigenvalues.front() <= eigen_floor)
    throw RankDeficientState("matrix_log: eigenvalue " + std::to_string(eig.eigenvalues.front()) +
                             " at or below floor " + std::to_string(eigen_floor));
  std::vector<double> mapped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = std::log(eig.eigenvalues[k]);
  return spectral_map(eig, mapped);
}

HermitianMatrix matrix_exp(const HermitianMatrix& a) {
  const EigDecomposition eig = eigh(a);
  std::vector<double> mapped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = std::exp(eig.eigenvalues[k]);
  return spectral_map(eig, mapped);
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim())
    throw ValidationError("trace_product: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
  cxd t = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
  if (std::abs(t.imag()) > 1e-10 * (1.0 + std::abs(t.real())))
    throw ValidationError("trace_product: non-real trace for Hermitian pair, imag = " +
                          std::to_string(t.imag()));
  return t.real();
}

}  // namespace qsing
