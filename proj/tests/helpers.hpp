#ifndef QSING_TESTS_HELPERS_HPP
#define QSING_TESTS_HELPERS_HPP

#include <cmath>
#include <vector>

#include "qsing/quantum.hpp"
#include "qsing/rng.hpp"
#include "qsing/shadows.hpp"

namespace qsing::test {

inline ComplexMatrix mat2(cxd a, cxd b, cxd c, cxd d) {
  ComplexMatrix m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

inline HermitianMatrix herm2(cxd a, cxd b, cxd c, cxd d) {
  return HermitianMatrix(mat2(a, b, c, d));
}

inline DensityMatrix diag_rho(double p0, double p1) {
  return DensityMatrix(herm2(p0, 0.0, 0.0, p1));
}

inline HermitianMatrix random_hermitian(int dim, Rng& rng) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) {
    m(i, i) = rng.gaussian();
    for (int j = i + 1; j < dim; ++j) {
      const cxd z(rng.gaussian(), rng.gaussian());
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(m));
}

// Ginibre construction: full rank with probability 1.
inline DensityMatrix random_density(int dim, Rng& rng) {
  ComplexMatrix g(dim);
  for (auto& z : g.entries()) z = cxd(rng.gaussian(), rng.gaussian());
  ComplexMatrix ggd = g * dagger(g);
  const double tr = trace(ggd).real();
  return DensityMatrix(HermitianMatrix(cxd(1.0 / tr, 0.0) * ggd));
}

// Exact-enumeration channel inverse check: max entrywise error of
// sum_m Tr(Pi_m rho) snapshot_m - rho.
inline double unbiasedness_error(const DensityMatrix& rho, const PauliShadowScheme& scheme) {
  const std::vector<double> p = born_probabilities(rho, scheme.povm());
  ComplexMatrix acc(rho.dim());
  for (std::size_t m = 0; m < scheme.n_outcomes(); ++m)
    acc = acc + cxd(p[m], 0.0) * scheme.snapshot(m).mat.mat();
  return max_abs(acc - rho.mat().mat());
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qsing::test

#endif
