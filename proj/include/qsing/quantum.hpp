#ifndef QSING_QUANTUM_HPP
#define QSING_QUANTUM_HPP

#include <span>
#include <string>
#include <vector>

#include "qsing/linalg.hpp"

namespace qsing {

// Physical state: PSD to 1e-10 and unit trace to 1e-10. Eigenvalues are
// computed during validation and kept (ascending).
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix m);
  const HermitianMatrix& mat() const { return m_; }
  int dim() const { return m_.dim(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double min_eigenvalue() const { return eigenvalues_.front(); }

 private:
  HermitianMatrix m_;
  std::vector<double> eigenvalues_;
};

// Measurement: PSD elements summing to the identity.
class Povm {
 public:
  Povm(std::vector<HermitianMatrix> elements, std::vector<std::string> labels);
  std::size_t size() const { return elements_.size(); }
  int dim() const { return elements_.front().dim(); }
  const HermitianMatrix& element(std::size_t m) const { return elements_[m]; }
  const std::string& label(std::size_t m) const { return labels_[m]; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<HermitianMatrix> elements_;
  std::vector<std::string> labels_;
};

// Tr(Pi_m rho) for each element, clipped to [0,1] within 1e-12; sums to 1 within 1e-10.
std::vector<double> born_probabilities(const DensityMatrix& rho, const Povm& povm);

// Tr[rho (log rho - log sigma)] with the 0 log 0 = 0 convention on rho's spectrum.
// sigma must be full rank above eigen_floor.
double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                double eigen_floor = 1e-12);

// -Tr(rho log rho), 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);

double kl_divergence(std::span<const double> q, std::span<const double> p);

// True iff the vectorized elements span the full Hermitian space
// (numerical Gram rank with relative tolerance 1e-8).
bool is_tomographically_complete(const Povm& povm);

}  // namespace qsing

#endif
