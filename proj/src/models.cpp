#include "qsing/models.hpp"

#include <cmath>
#include <limits>

namespace qsing {

namespace {

constexpr double kPi = 3.14159265358979323846;

DensityMatrix diag_state(double p0, double p1) {
  ComplexMatrix m(2);
  m(0, 0) = p0;
  m(1, 1) = p1;
  return DensityMatrix(HermitianMatrix(std::move(m)));
}

// pure_weight |phi(angle)><phi(angle)| + (1 - pure_weight) I/2 with phi = (cos, sin)^T.
DensityMatrix bloch_mixture(double angle, double pure_weight) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double w = pure_weight, r = 1.0 - pure_weight;
  ComplexMatrix m(2);
  m(0, 0) = w * c * c + 0.5 * r;
  m(0, 1) = w * c * s;
  m(1, 0) = w * c * s;
  m(1, 1) = w * s * s + 0.5 * r;
  return DensityMatrix(HermitianMatrix(std::move(m)));
}

}  // namespace

bool ParameterDomain::contains(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim())
    throw ValidationError("parameter length " + std::to_string(theta.size()) +
                          " does not match domain dimension " + std::to_string(dim()));
  for (std::size_t j = 0; j < box.size(); ++j)
    if (theta[j] < box[j][0] || theta[j] > box[j][1]) return false;
  return !extra_constraint || extra_constraint(theta);
}

ParametricModel::ParametricModel(std::string id, int hilbert_dim, ParameterDomain domain,
                                 SigmaFn sigma, std::vector<double> theta0, LogPriorFn log_prior)
    : id_(std::move(id)),
      hilbert_dim_(hilbert_dim),
      domain_(std::move(domain)),
      sigma_(std::move(sigma)),
      theta0_(std::move(theta0)),
      log_prior_(std::move(log_prior)) {
  if (domain_.dim() < 1) throw ValidationError("model domain must have dimension >= 1");
  if (static_cast<int>(theta0_.size()) != domain_.dim())
    throw ValidationError("theta0 length does not match domain dimension");
  if (!domain_.contains(theta0_)) throw ValidationError("theta0 outside model domain");
}

bool ParametricModel::domain_contains(std::span<const double> theta) const {
  return domain_.contains(theta);
}

DensityMatrix ParametricModel::sigma(std::span<const double> theta) const {
  if (!domain_.contains(theta)) throw OutOfDomain("parameter outside domain of model " + id_);
  return sigma_(theta);
}

double ParametricModel::log_prior(std::span<const double> theta) const {
  if (!domain_.contains(theta)) throw OutOfDomain("parameter outside domain of model " + id_);
  return log_prior_ ? log_prior_(theta) : 0.0;
}

ParametricModel make_model(const std::string& id) {
  if (id == "ex41_regular") {
    ParameterDomain dom{{{0.0, kPi / 2.0}}, nullptr};
    return ParametricModel(id, 2, std::move(dom),
                           [](std::span<const double> t) {
                             const double c = std::cos(t[0]), s = std::sin(t[0]);
                             return diag_state(c * c, s * s);
                           },
                           {kPi / 4.0});
  }
  if (id == "ex42_singular") {
    ParameterDomain dom{{{-kPi, kPi}, {-kPi - kPi / 2.0, kPi + kPi / 3.0}},
                        [](std::span<const double> t) {
                          const double x = t[0] - t[1];
                          return x >= -kPi / 3.0 && x <= kPi / 2.0;
                        }};
    return ParametricModel(id, 2, std::move(dom),
                           [](std::span<const double> t) {
                             const double u = t[0] - t[1] + kPi / 3.0;
                             const double c = std::cos(u), s = std::sin(u);
                             return diag_state(c * c, s * s);
                           },
                           {0.0, 0.0});
  }
  if (id == "sec42_regular") {
    const double s = std::sin(kPi / 32.0);
    const double pure_weight = 1.0 - s * s;  // cos^2(pi/32)
    ParameterDomain dom{{{0.0, kPi / 2.0}}, nullptr};
    return ParametricModel(id, 2, std::move(dom),
                           [pure_weight](std::span<const double> t) {
                             return bloch_mixture(t[0], pure_weight);
                           },
                           {kPi / 4.0});
  }
  const bool quadratic = (id == "ex43_depol:quadratic");
  const bool cusp = (id == "ex43_depol:cusp");
  if (quadratic || cusp) {
    ParameterDomain dom{{{0.0, kPi / 2.0}, {-0.5, 0.5}, {-0.5, 0.5}}, nullptr};
    return ParametricModel(id, 2, std::move(dom),
                           [quadratic](std::span<const double> t) {
                             const double f = quadratic
                                                  ? t[1] * t[1] + t[2] * t[2]
                                                  : (t[1] * t[1] - t[2] * t[2] * t[2]) *
                                                        (t[1] * t[1] - t[2] * t[2] * t[2]);
                             const double sf = std::sin(f);
                             return bloch_mixture(t[0], sf * sf);
                           },
                           {kPi / 4.0, 0.0, 0.0});
  }
  throw ValidationError("unknown model id \"" + id + "\" (known: ex41_regular, ex42_singular, "
                        "sec42_regular, ex43_depol:quadratic, ex43_depol:cusp)");
}

std::vector<std::string> model_ids() {
  return {"ex41_regular", "ex42_singular", "sec42_regular", "ex43_depol:quadratic",
          "ex43_depol:cusp"};
}

double log_likelihood(const ParametricModel& model, std::span<const double> theta,
                      std::span<const std::size_t> outcomes, const Povm& povm) {
  const DensityMatrix sig = model.sigma(theta);
  const std::vector<double> p = born_probabilities(sig, povm);
  std::vector<std::size_t> counts(p.size(), 0);
  for (std::size_t o : outcomes) {
    if (o >= p.size()) throw ValidationError("outcome index out of range");
    ++counts[o];
  }
  double ll = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (counts[m] == 0) continue;
    if (p[m] <= 1e-300) return -std::numeric_limits<double>::infinity();
    ll += static_cast<double>(counts[m]) * std::log(p[m]);
  }
  return ll;
}

}  // namespace qsing
