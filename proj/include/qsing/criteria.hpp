#ifndef QSING_CRITERIA_HPP
#define QSING_CRITERIA_HPP

#include <optional>
#include <span>

#include "qsing/posterior.hpp"
#include "qsing/shadows.hpp"
#include "qsing/theory.hpp"

namespace qsing {

struct CriteriaReport {
  double g_n_q = 0.0;  // quantum generalization loss -Tr(rho log sigma_B)
  double t_n_q = 0.0;  // quantum training loss over snapshots
  double c_n_q = 0.0;  // averaged posterior covariance term
  double qwaic = 0.0;  // t_n_q + c_n_q
  double g_n = 0.0;    // classical generalization loss
  double t_n = 0.0;    // classical training loss
  double waic = 0.0;   // t_n + posterior functional variance
  std::optional<double> qaic_ll;
  std::size_t n = 0;
};

double quantum_generalization_loss(const DensityMatrix& rho_true, const DensityMatrix& sigma_b,
                                   double eigen_floor = 1e-12);

double quantum_training_loss(std::span<const Snapshot> snapshots, const DensityMatrix& sigma_b,
                             double eigen_floor = 1e-12);
double quantum_training_loss(const PauliShadowScheme& scheme,
                             std::span<const std::size_t> outcomes, const DensityMatrix& sigma_b,
                             double eigen_floor = 1e-12);

// (1/n) sum_i Cov_theta[ log p(x_i|theta), Tr(rho_hat_i log sigma(theta)) ].
// Terms with equal outcome symbols are identical, so the sum is grouped over
// the alphabet. snapshot_table is indexed by outcome symbol.
double c_n_q(const PosteriorSamples& samples, std::span<const std::size_t> outcomes,
             std::span<const Snapshot> snapshot_table);

inline double qwaic(double t_n_q, double c_n_q_value) { return t_n_q + c_n_q_value; }

struct ClassicalLosses {
  double g_n, t_n, waic;
};

// G_n by exact summation over the outcome alphabet against q_true; T_n and the
// WAIC variance term from the posterior caches.
ClassicalLosses classical_losses(const PosteriorSamples& samples,
                                 std::span<const std::size_t> outcomes,
                                 std::span<const double> q_true);

// Maximum-likelihood parameter by dense grid search (401 points per dimension)
// plus golden-section refinement along each coordinate.
std::vector<double> max_likelihood_theta(const ParametricModel& model,
                                         std::span<const std::size_t> outcomes, const Povm& povm);

// -(1/n) sum_i log p(x_i|theta_hat) + (d + Tr(J_q I^-1)) / (2n), with the
// Fisher matrices evaluated at theta_hat. Throws SingularHessian if I is not
// positive definite.
double qaic_ll(const ParametricModel& model, std::span<const std::size_t> outcomes,
               const Povm& povm, std::span<const double> theta_hat, const FisherReport& hessians);

// Everything the experiment harness records for one dataset + chain.
CriteriaReport compute_criteria(const ParametricModel& model, const PosteriorSamples& samples,
                                std::span<const std::size_t> outcomes,
                                const PauliShadowScheme& scheme, const DensityMatrix& rho_true);

}  // namespace qsing

#endif
