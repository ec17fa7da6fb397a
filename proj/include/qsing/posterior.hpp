#ifndef QSING_POSTERIOR_HPP
#define QSING_POSTERIOR_HPP

#include <span>
#include <vector>

#include "qsing/models.hpp"
#include "qsing/rng.hpp"

namespace qsing {

struct MhConfig {
  std::size_t n_samples = 5000;  // total chain length, burn-in included
  std::size_t burn_in = 500;
  std::vector<double> step_scale = {0.05};  // per dimension; a single entry broadcasts
  bool adapt_during_burn_in = true;
  double target_acceptance = 0.3;
};

// Post-burn-in chain states plus the per-sample caches the criteria need:
// log sigma(theta_s) and log p(symbol | theta_s) for every POVM outcome symbol.
struct PosteriorSamples {
  std::vector<std::vector<double>> thetas;
  double acceptance_rate = 0.0;  // over the post-burn-in phase
  std::vector<HermitianMatrix> log_sigma_cache;
  std::vector<std::vector<double>> log_lik_cache;
  std::vector<double> final_step_scale;

  std::size_t size() const { return thetas.size(); }
};

// Random-walk Metropolis-Hastings targeting prior(theta) * prod_i p(x_i | theta).
// Proposals outside the domain or hitting a rank-deficient state are rejected.
// The step scale adapts toward target_acceptance during burn-in, then freezes.
PosteriorSamples run_mh(const ParametricModel& model, std::span<const std::size_t> outcomes,
                        const Povm& povm, const MhConfig& config, Rng& rng);

// (1/S) sum_s sigma(theta_s): the posterior predictive state.
DensityMatrix bayes_mean_state(const ParametricModel& model, const PosteriorSamples& samples);

HermitianMatrix posterior_matrix_mean_log(const PosteriorSamples& samples);
HermitianMatrix posterior_matrix_var_log(const PosteriorSamples& samples);

// mean(f*g) - mean(f)*mean(g), computed in centered form.
double posterior_cov(std::span<const double> f, std::span<const double> g);

}  // namespace qsing

#endif
