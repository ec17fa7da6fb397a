#include "qsing/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace qsing {

namespace {

struct StateEval {
  double log_post;
  std::vector<double> log_p;  // per outcome symbol
  HermitianMatrix log_sigma;
};

// Evaluates the chain state at theta; nullopt means "reject" (rank-deficient
// sigma or an observed symbol with vanishing probability).
std::optional<StateEval> evaluate_state(const ParametricModel& model, const Povm& povm,
                                        std::span<const std::size_t> counts,
                                        std::span<const double> theta) {
  const DensityMatrix sig = model.sigma(theta);
  if (sig.min_eigenvalue() <= 1e-12) return std::nullopt;
  const std::vector<double> p = born_probabilities(sig, povm);
  std::vector<double> log_p(p.size());
  double loglik = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    log_p[m] = p[m] > 0.0 ? std::log(p[m]) : -std::numeric_limits<double>::infinity();
    if (counts[m] == 0) continue;
    if (p[m] <= 1e-300) return std::nullopt;
    loglik += static_cast<double>(counts[m]) * log_p[m];
  }
  return StateEval{loglik + model.log_prior(theta), std::move(log_p),
                   matrix_log(sig.mat(), 1e-12)};
}

std::vector<double> initial_point(const ParametricModel& model, Rng& rng) {
  const auto& box = model.domain().box;
  std::vector<double> theta(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) theta[j] = 0.5 * (box[j][0] + box[j][1]);
  if (model.domain_contains(theta)) return theta;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t j = 0; j < box.size(); ++j)
      theta[j] = box[j][0] + rng.uniform() * (box[j][1] - box[j][0]);
    if (model.domain_contains(theta)) return theta;
  }
  throw ValidationError("run_mh: could not find a feasible start point in the domain");
}

}  // namespace

PosteriorSamples run_mh(const ParametricModel& model, std::span<const std::size_t> outcomes,
                        const Povm& povm, const MhConfig& config, Rng& rng) {
  if (outcomes.empty()) throw ValidationError("run_mh: outcome list must be nonempty");
  if (config.burn_in >= config.n_samples)
    throw ValidationError("run_mh: burn_in must be smaller than n_samples");
  const int d = model.dim_param();
  std::vector<double> base_step = config.step_scale;
  if (base_step.size() == 1) base_step.assign(d, base_step[0]);
  if (static_cast<int>(base_step.size()) != d)
    throw ValidationError("run_mh: step_scale length does not match parameter dimension");
  for (double s : base_step)
    if (!(s > 0.0)) throw ValidationError("run_mh: step_scale entries must be positive");

  std::vector<std::size_t> counts(povm.size(), 0);
  for (std::size_t o : outcomes) {
    if (o >= counts.size()) throw ValidationError("run_mh: outcome index out of range");
    ++counts[o];
  }

  std::vector<double> theta = initial_point(model, rng);
  std::optional<StateEval> current = evaluate_state(model, povm, counts, theta);
  if (!current) {
    // Start point is rank-deficient; look for a usable one.
    for (int attempt = 0; attempt < 100000 && !current; ++attempt) {
      const auto& box = model.domain().box;
      for (int j = 0; j < d; ++j) theta[j] = box[j][0] + rng.uniform() * (box[j][1] - box[j][0]);
      if (!model.domain_contains(theta)) continue;
      current = evaluate_state(model, povm, counts, theta);
    }
    if (!current) throw AllProposalsRejected("run_mh: no evaluable start point found");
  }

  const std::size_t retained = config.n_samples - config.burn_in;
  PosteriorSamples out;
  out.thetas.reserve(retained);
  out.log_sigma_cache.reserve(retained);
  out.log_lik_cache.reserve(retained);

  double log_scale = 0.0;
  std::size_t accepted_burn_in = 0, accepted_post = 0;
  std::vector<double> proposal(d);

  for (std::size_t t = 0; t < config.n_samples; ++t) {
    const bool in_burn_in = t < config.burn_in;
    const double scale = std::exp(log_scale);
    for (int j = 0; j < d; ++j) proposal[j] = theta[j] + scale * base_step[j] * rng.gaussian();

    bool accepted = false;
    if (model.domain_contains(proposal)) {
      if (auto cand = evaluate_state(model, povm, counts, proposal)) {
        const double log_alpha = cand->log_post - current->log_post;
        if (log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha) {
          theta = proposal;
          current = std::move(cand);
          accepted = true;
        }
      }
    }

    if (in_burn_in) {
      if (accepted) ++accepted_burn_in;
      if (config.adapt_during_burn_in) {
        const double gain = std::pow(static_cast<double>(t + 1), -0.6);
        log_scale += gain * ((accepted ? 1.0 : 0.0) - config.target_acceptance);
        log_scale = std::clamp(log_scale, std::log(1e-6), std::log(1e3));
      }
      if (t + 1 == config.burn_in && config.burn_in > 0 &&
          static_cast<double>(accepted_burn_in) < 0.001 * static_cast<double>(config.burn_in))
        throw AllProposalsRejected("run_mh: burn-in acceptance below 0.001 (" +
                                   std::to_string(accepted_burn_in) + "/" +
                                   std::to_string(config.burn_in) + ")");
    } else {
      if (accepted) ++accepted_post;
      out.thetas.push_back(theta);
      out.log_sigma_cache.push_back(current->log_sigma);
      out.log_lik_cache.push_back(current->log_p);
    }
  }

  out.acceptance_rate = static_cast<double>(accepted_post) / static_cast<double>(retained);
  const double scale = std::exp(log_scale);
  out.final_step_scale.resize(d);
  for (int j = 0; j < d; ++j) out.final_step_scale[j] = scale * base_step[j];
  return out;
}

DensityMatrix bayes_mean_state(const ParametricModel& model, const PosteriorSamples& samples) {
  if (samples.size() == 0) throw ValidationError("bayes_mean_state: no samples");
  ComplexMatrix sum(model.hilbert_dim());
  for (const auto& theta : samples.thetas) sum = sum + model.sigma(theta).mat().mat();
  const cxd w(1.0 / static_cast<double>(samples.size()), 0.0);
  return DensityMatrix(HermitianMatrix(w * sum));
}

HermitianMatrix posterior_matrix_mean_log(const PosteriorSamples& samples) {
  if (samples.log_sigma_cache.empty())
    throw ValidationError("posterior_matrix_mean_log: empty log sigma cache");
  ComplexMatrix sum(samples.log_sigma_cache.front().dim());
  for (const auto& l : samples.log_sigma_cache) sum = sum + l.mat();
  return HermitianMatrix(cxd(1.0 / static_cast<double>(samples.size()), 0.0) * sum);
}

HermitianMatrix posterior_matrix_var_log(const PosteriorSamples& samples) {
  if (samples.log_sigma_cache.empty())
    throw ValidationError("posterior_matrix_var_log: empty log sigma cache");
  const int dim = samples.log_sigma_cache.front().dim();
  ComplexMatrix sum(dim), sum_sq(dim);
  for (const auto& l : samples.log_sigma_cache) {
    sum = sum + l.mat();
    sum_sq = sum_sq + l.mat() * l.mat();
  }
  const cxd w(1.0 / static_cast<double>(samples.size()), 0.0);
  const ComplexMatrix mean = w * sum;
  ComplexMatrix var = w * sum_sq - mean * mean;
  // Round-off can leave a tiny anti-Hermitian part; drop it.
  for (int i = 0; i < dim; ++i) {
    var(i, i) = cxd(var(i, i).real(), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      const cxd avg = 0.5 * (var(i, j) + std::conj(var(j, i)));
      var(i, j) = avg;
      var(j, i) = std::conj(avg);
    }
  }
  return HermitianMatrix(std::move(var));
}

double posterior_cov(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw ValidationError("posterior_cov: length mismatch");
  if (f.empty()) throw ValidationError("posterior_cov: empty input");
  const double inv_s = 1.0 / static_cast<double>(f.size());
  double mf = 0.0, mg = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) {
    mf += f[s];
    mg += g[s];
  }
  mf *= inv_s;
  mg *= inv_s;
  double acc = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) acc += (f[s] - mf) * (g[s] - mg);
  return acc * inv_s;
}

}  // namespace qsing
