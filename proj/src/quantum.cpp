#include "qsing/quantum.hpp"

#include <cmath>
#include <string>

namespace qsing {

DensityMatrix::DensityMatrix(HermitianMatrix m) : m_(std::move(m)) {
  const cxd tr = trace(m_.mat());
  if (std::abs(tr - cxd(1.0, 0.0)) > 1e-10)
    throw ValidationError("density matrix trace deviates from 1 by " +
                          std::to_string(std::abs(tr - cxd(1.0, 0.0))));
  eigenvalues_ = eigh(m_).eigenvalues;
  if (eigenvalues_.front() < -1e-10)
    throw ValidationError("density matrix has eigenvalue " +
                          std::to_string(eigenvalues_.front()));
}

Povm::Povm(std::vector<HermitianMatrix> elements, std::vector<std::string> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
  if (elements_.empty()) throw ValidationError("POVM needs at least one element");
  const int d = elements_.front().dim();
  if (labels_.empty()) {
    for (std::size_t m = 0; m < elements_.size(); ++m) labels_.push_back("m" + std::to_string(m));
  }
  if (labels_.size() != elements_.size())
    throw ValidationError("POVM label count does not match element count");
  ComplexMatrix sum(d);
  for (const auto& e : elements_) {
    if (e.dim() != d) throw ValidationError("POVM elements have mixed dimensions");
    if (eigh(e).eigenvalues.front() < -1e-10)
      throw ValidationError("POVM element is not positive semidefinite");
    sum = sum + e.mat();
  }
  if (frobenius_norm(sum - ComplexMatrix::identity(d)) > 1e-10)
    throw ValidationError("POVM elements do not sum to the identity");
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const Povm& povm) {
  if (rho.dim() != povm.dim())
    throw ValidationError("born_probabilities: state and POVM dimensions differ");
  std::vector<double> p(povm.size());
  double sum = 0.0;
  for (std::size_t m = 0; m < povm.size(); ++m) {
    double v = trace_product(povm.element(m), rho.mat());
    if (v < 0.0) {
      if (v < -1e-12) throw ValidationError("born probability " + std::to_string(v) + " < 0");
      v = 0.0;
    } else if (v > 1.0) {
      if (v > 1.0 + 1e-12) throw ValidationError("born probability " + std::to_string(v) + " > 1");
      v = 1.0;
    }
    p[m] = v;
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw ValidationError("born probabilities sum to " + std::to_string(sum));
  return p;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lam : rho.eigenvalues())
    if (lam > 0.0) s -= lam * std::log(lam);
  return s;
}

double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                                double eigen_floor) {
  if (rho.dim() != sigma.dim())
    throw ValidationError("quantum_relative_entropy: dimension mismatch");
  const HermitianMatrix log_sigma = matrix_log(sigma.mat(), eigen_floor);
  double tr_rho_log_rho = 0.0;
  for (double lam : rho.eigenvalues())
    if (lam > 0.0) tr_rho_log_rho += lam * std::log(lam);
  return tr_rho_log_rho - trace_product(rho.mat(), log_sigma);
}

double kl_divergence(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw ValidationError("kl_divergence: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;  // 0 log 0 = 0
    if (p[i] <= 0.0)
      throw SupportViolation("kl_divergence: q[" + std::to_string(i) + "] > 0 but p is 0");
    s += q[i] * (std::log(q[i]) - std::log(p[i]));
  }
  return s;
}

bool is_tomographically_complete(const Povm& povm) {
  const std::size_t m = povm.size();
  ComplexMatrix gram(static_cast<int>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      gram(static_cast<int>(i), static_cast<int>(j)) =
          trace_product(povm.element(i), povm.element(j));
  const auto eig = eigh(HermitianMatrix(std::move(gram)));
  const double top = eig.eigenvalues.back();
  if (top <= 0.0) return false;
  int rank = 0;
  for (double lam : eig.eigenvalues)
    if (lam > 1e-8 * top) ++rank;
  const int d = povm.dim();
  return rank == d * d;
}

}  // namespace qsing
