#ifndef QSING_LINALG_HPP
#define QSING_LINALG_HPP

#include <complex>
#include <span>
#include <vector>

#include "qsing/errors.hpp"

namespace qsing {

using cxd = std::complex<double>;

// Dense row-major complex square matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim);
  static ComplexMatrix identity(int dim);

  int dim() const { return dim_; }
  cxd& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const cxd& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  std::span<const cxd> entries() const { return a_; }
  std::span<cxd> entries() { return a_; }

 private:
  int dim_ = 0;
  std::vector<cxd> a_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cxd scalar, const ComplexMatrix& a);
ComplexMatrix dagger(const ComplexMatrix& a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
cxd trace(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);

// Hermitian to within 1e-10 * (1 + max|A|); checked on construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m);
  const ComplexMatrix& mat() const { return m_; }
  int dim() const { return m_.dim(); }
  const cxd& operator()(int i, int j) const { return m_(i, j); }

 private:
  ComplexMatrix m_;
};

struct EigDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, columns paired with eigenvalues
};

// Cyclic Jacobi eigensolver for Hermitian matrices (intended for dim <= 64).
EigDecomposition eigh(const HermitianMatrix& a);

// V diag(log lambda) V^dagger. Throws RankDeficientState if any eigenvalue <= eigen_floor.
HermitianMatrix matrix_log(const HermitianMatrix& p, double eigen_floor = 1e-12);

HermitianMatrix matrix_exp(const HermitianMatrix& a);

// Re Tr(AB). For Hermitian pairs the imaginary part must vanish; asserted to 1e-10.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace qsing

#endif
