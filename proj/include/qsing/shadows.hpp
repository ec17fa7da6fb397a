#ifndef QSING_SHADOWS_HPP
#define QSING_SHADOWS_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsing/quantum.hpp"
#include "qsing/rng.hpp"

namespace qsing {

// Classical-shadow snapshot: Hermitian, unit trace, generally NOT positive.
struct Snapshot {
  HermitianMatrix mat;
  std::string outcome;
};

// Uniform random Pauli-basis measurement: per qubit the 6-outcome POVM
// (1/3)|v><v| over the Z, X, Y eigenbases, with the matching inverse-channel
// snapshot 3|v><v| - I per outcome. Multi-qubit schemes are tensor products.
class PauliShadowScheme {
 public:
  explicit PauliShadowScheme(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  int dim() const { return 1 << n_qubits_; }
  std::size_t n_outcomes() const { return snapshots_.size(); }
  const Povm& povm() const { return povm_; }
  const Snapshot& snapshot(std::size_t outcome) const;
  const std::string& label(std::size_t outcome) const { return povm_.label(outcome); }
  std::size_t outcome_index(std::string_view label) const;

 private:
  int n_qubits_;
  Povm povm_;
  std::vector<Snapshot> snapshots_;
};

// n i.i.d. outcome indices drawn from Tr(Pi_m rho). Deterministic given the rng state.
std::vector<std::size_t> sample_outcomes(const DensityMatrix& rho, const PauliShadowScheme& scheme,
                                         std::size_t n, Rng& rng);

HermitianMatrix mean_snapshot(std::span<const Snapshot> snapshots);
HermitianMatrix mean_snapshot(const PauliShadowScheme& scheme,
                              std::span<const std::size_t> outcomes);

}  // namespace qsing

#endif
