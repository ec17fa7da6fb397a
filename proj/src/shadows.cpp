#include "qsing/shadows.hpp"

#include <algorithm>
#include <cmath>

namespace qsing {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct QubitOutcome {
  const char* label;
  cxd v0, v1;  // measured eigenvector
};

// Order matches the 6-outcome Pauli POVM: Z then X then Y, "+" before "-".
const QubitOutcome kQubitOutcomes[6] = {
    {"Z+", {1.0, 0.0}, {0.0, 0.0}},
    {"Z-", {0.0, 0.0}, {1.0, 0.0}},
    {"X+", {kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}},
    {"X-", {kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}},
    {"Y+", {kInvSqrt2, 0.0}, {0.0, kInvSqrt2}},
    {"Y-", {kInvSqrt2, 0.0}, {0.0, -kInvSqrt2}},
};

ComplexMatrix projector(const QubitOutcome& o) {
  ComplexMatrix m(2);
  m(0, 0) = o.v0 * std::conj(o.v0);
  m(0, 1) = o.v0 * std::conj(o.v1);
  m(1, 0) = o.v1 * std::conj(o.v0);
  m(1, 1) = o.v1 * std::conj(o.v1);
  return m;
}

}  // namespace

PauliShadowScheme::PauliShadowScheme(int n_qubits)
    : n_qubits_(n_qubits),
      povm_([n_qubits] {
        if (n_qubits < 1 || n_qubits > 3)
          throw ValidationError("PauliShadowScheme supports 1 to 3 qubits");
        std::size_t count = 1;
        for (int q = 0; q < n_qubits; ++q) count *= 6;
        std::vector<HermitianMatrix> elements;
        std::vector<std::string> labels;
        elements.reserve(count);
        labels.reserve(count);
        for (std::size_t code = 0; code < count; ++code) {
          ComplexMatrix el(1);
          el(0, 0) = 1.0;
          std::string label;
          std::size_t rest = code;
          std::size_t radix = count;
          for (int q = 0; q < n_qubits; ++q) {
            radix /= 6;
            const std::size_t k = rest / radix;
            rest %= radix;
            el = kron(el, cxd(1.0 / 3.0, 0.0) * projector(kQubitOutcomes[k]));
            if (q > 0) label += ',';
            label += kQubitOutcomes[k].label;
          }
          elements.emplace_back(std::move(el));
          labels.push_back(std::move(label));
        }
        return Povm(std::move(elements), std::move(labels));
      }()) {
  const std::size_t count = povm_.size();
  snapshots_.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    ComplexMatrix snap(1);
    snap(0, 0) = 1.0;
    std::size_t rest = code;
    std::size_t radix = count;
    for (int q = 0; q < n_qubits_; ++q) {
      radix /= 6;
      const std::size_t k = rest / radix;
      rest %= radix;
      // Inverse measurement channel per qubit: 3|v><v| - I.
      ComplexMatrix per_qubit = cxd(3.0, 0.0) * projector(kQubitOutcomes[k]) -
                                ComplexMatrix::identity(2);
      snap = kron(snap, per_qubit);
    }
    HermitianMatrix h(std::move(snap));
    if (std::abs(trace(h.mat()) - cxd(1.0, 0.0)) > 1e-12)
      throw Error("snapshot trace deviates from 1");
    snapshots_.push_back(Snapshot{std::move(h), povm_.label(code)});
  }
}

const Snapshot& PauliShadowScheme::snapshot(std::size_t outcome) const {
  if (outcome >= snapshots_.size())
    throw ValidationError("unknown outcome index " + std::to_string(outcome));
  return snapshots_[outcome];
}

std::size_t PauliShadowScheme::outcome_index(std::string_view label) const {
  for (std::size_t m = 0; m < povm_.size(); ++m)
    if (povm_.label(m) == label) return m;
  throw ValidationError("unknown outcome label \"" + std::string(label) + "\"");
}

std::vector<std::size_t> sample_outcomes(const DensityMatrix& rho, const PauliShadowScheme& scheme,
                                         std::size_t n, Rng& rng) {
  if (n < 1) throw ValidationError("sample_outcomes: n must be >= 1");
  const std::vector<double> p = born_probabilities(rho, scheme.povm());
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    acc += p[m];
    cdf[m] = acc;
  }
  cdf.back() = 1.0;
  std::vector<std::size_t> outcomes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    outcomes[i] = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  return outcomes;
}

HermitianMatrix mean_snapshot(std::span<const Snapshot> snapshots) {
  if (snapshots.empty()) throw ValidationError("mean_snapshot: empty snapshot list");
  const int d = snapshots.front().mat.dim();
  ComplexMatrix sum(d);
  for (const Snapshot& s : snapshots) {
    if (s.mat.dim() != d) throw ValidationError("mean_snapshot: mixed dimensions");
    sum = sum + s.mat.mat();
  }
  return HermitianMatrix(cxd(1.0 / static_cast<double>(snapshots.size()), 0.0) * sum);
}

HermitianMatrix mean_snapshot(const PauliShadowScheme& scheme,
                              std::span<const std::size_t> outcomes) {
  if (outcomes.empty()) throw ValidationError("mean_snapshot: empty outcome list");
  ComplexMatrix sum(scheme.dim());
  for (std::size_t o : outcomes) sum = sum + scheme.snapshot(o).mat.mat();
  return HermitianMatrix(cxd(1.0 / static_cast<double>(outcomes.size()), 0.0) * sum);
}

}  // namespace qsing
