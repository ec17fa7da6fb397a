#ifndef QSING_THEORY_HPP
#define QSING_THEORY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsing/models.hpp"

namespace qsing {

// Fisher/Hessian matrices at theta0 (d x d, row-major, symmetric) and the
// regular-case coefficients derived from them.
struct FisherReport {
  std::vector<double> theta0;
  int d = 0;
  std::vector<double> I;    // classical Fisher information
  std::vector<double> J;    // Hessian of the KL divergence
  std::vector<double> I_q;  // Tr(rho dlogsigma dlogsigma^T)
  std::vector<double> J_q;  // Hessian of the quantum relative entropy
  std::optional<double> lambda_q, nu_q, nu_prime_q;
};

struct ReferenceEntry {
  double value;
  std::string source;
};

// Read-only analytic reference values for the built-in models.
struct ReferenceConstants {
  std::string model_id;
  std::optional<ReferenceEntry> lambda, nu, r_cq, multiplicity;
  std::optional<ReferenceEntry> lambda_q, nu_q, nu_prime_q;  // tabulated, may disagree with
                                                             // the computed trace formulas
  std::optional<ReferenceEntry> j, j_q, trace_ratio;
};

// Average log loss K(theta) = KL(p(.|theta0) || p(.|theta)) over the POVM alphabet,
// with theta0 the model's registered optimal parameter.
double eval_K(const ParametricModel& model, const Povm& povm, std::span<const double> theta);

// Average quantum log loss K^Q(theta) = D(sigma(theta0) || sigma(theta)).
double eval_KQ(const ParametricModel& model, std::span<const double> theta);

// Central finite differences with one Richardson level. fd_step 0 selects
// 1e-4 of the per-dimension domain width.
FisherReport numerical_hessians(const ParametricModel& model, const DensityMatrix& rho_true,
                                const Povm& povm, std::span<const double> theta0,
                                double fd_step = 0.0);

// lambda_q = Tr(J_q J^-1)/2, nu_q = Tr(I_q J^-1)/2, nu_prime_q = Tr(J_q J^-1 I J^-1)/2.
// Throws SingularHessian when J is not invertible (condition number >= 1e8).
void fill_regular_coefficients(FisherReport& report);

ReferenceConstants reference(const std::string& model_id);

}  // namespace qsing

#endif
