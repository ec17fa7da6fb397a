#ifndef QSING_MODELS_HPP
#define QSING_MODELS_HPP

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qsing/quantum.hpp"

namespace qsing {

// Compact box domain with an optional extra predicate (e.g. linear inequalities).
struct ParameterDomain {
  std::vector<std::array<double, 2>> box;
  std::function<bool(std::span<const double>)> extra_constraint;

  int dim() const { return static_cast<int>(box.size()); }
  bool contains(std::span<const double> theta) const;
};

// Parametric quantum state model theta -> sigma(theta) over a compact domain,
// with a prior log-density (uniform by default; the constant cancels in the posterior).
class ParametricModel {
 public:
  using SigmaFn = std::function<DensityMatrix(std::span<const double>)>;
  using LogPriorFn = std::function<double(std::span<const double>)>;

  ParametricModel(std::string id, int hilbert_dim, ParameterDomain domain, SigmaFn sigma,
                  std::vector<double> theta0, LogPriorFn log_prior = {});

  const std::string& id() const { return id_; }
  int dim_param() const { return domain_.dim(); }
  int hilbert_dim() const { return hilbert_dim_; }
  const ParameterDomain& domain() const { return domain_; }
  const std::vector<double>& theta0() const { return theta0_; }

  bool domain_contains(std::span<const double> theta) const;
  DensityMatrix sigma(std::span<const double> theta) const;
  double log_prior(std::span<const double> theta) const;
  // The default true state: sigma at the registered optimal parameter.
  DensityMatrix true_state() const { return sigma(theta0_); }

 private:
  std::string id_;
  int hilbert_dim_;
  ParameterDomain domain_;
  SigmaFn sigma_;
  std::vector<double> theta0_;
  LogPriorFn log_prior_;
};

// Built-in registry. Known ids:
//   ex41_regular, ex42_singular, sec42_regular,
//   ex43_depol:quadratic, ex43_depol:cusp
ParametricModel make_model(const std::string& id);
std::vector<std::string> model_ids();

// Sum of log Tr(Pi_x sigma(theta)) over the outcome list; -inf if any outcome
// has probability <= 1e-300.
double log_likelihood(const ParametricModel& model, std::span<const double> theta,
                      std::span<const std::size_t> outcomes, const Povm& povm);

}  // namespace qsing

#endif
