#include "qsing/criteria.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qsing {

double quantum_generalization_loss(const DensityMatrix& rho_true, const DensityMatrix& sigma_b,
                                   double eigen_floor) {
  return -trace_product(rho_true.mat(), matrix_log(sigma_b.mat(), eigen_floor));
}

double quantum_training_loss(std::span<const Snapshot> snapshots, const DensityMatrix& sigma_b,
                             double eigen_floor) {
  if (snapshots.empty()) throw ValidationError("quantum_training_loss: empty snapshot list");
  const HermitianMatrix log_sigma = matrix_log(sigma_b.mat(), eigen_floor);
  double acc = 0.0;
  for (const Snapshot& s : snapshots) acc += trace_product(s.mat, log_sigma);
  return -acc / static_cast<double>(snapshots.size());
}

double quantum_training_loss(const PauliShadowScheme& scheme,
                             std::span<const std::size_t> outcomes, const DensityMatrix& sigma_b,
                             double eigen_floor) {
  if (outcomes.empty()) throw ValidationError("quantum_training_loss: empty outcome list");
  const HermitianMatrix log_sigma = matrix_log(sigma_b.mat(), eigen_floor);
  double acc = 0.0;
  for (std::size_t o : outcomes) acc += trace_product(scheme.snapshot(o).mat, log_sigma);
  return -acc / static_cast<double>(outcomes.size());
}

double c_n_q(const PosteriorSamples& samples, std::span<const std::size_t> outcomes,
             std::span<const Snapshot> snapshot_table) {
  if (outcomes.empty()) throw ValidationError("c_n_q: empty outcome list");
  if (samples.size() == 0) throw ValidationError("c_n_q: no posterior samples");
  const std::size_t n_sym = samples.log_lik_cache.front().size();
  if (snapshot_table.size() != n_sym)
    throw ValidationError("c_n_q: snapshot table and log-likelihood cache sizes differ");

  std::vector<std::size_t> counts(n_sym, 0);
  for (std::size_t o : outcomes) {
    if (o >= n_sym) throw ValidationError("c_n_q: outcome index out of range");
    ++counts[o];
  }

  const std::size_t s_count = samples.size();
  std::vector<double> f(s_count), g(s_count);
  double acc = 0.0;
  for (std::size_t m = 0; m < n_sym; ++m) {
    if (counts[m] == 0) continue;
    for (std::size_t s = 0; s < s_count; ++s) {
      f[s] = samples.log_lik_cache[s][m];
      g[s] = trace_product(snapshot_table[m].mat, samples.log_sigma_cache[s]);
    }
    acc += static_cast<double>(counts[m]) * posterior_cov(f, g);
  }
  return acc / static_cast<double>(outcomes.size());
}

ClassicalLosses classical_losses(const PosteriorSamples& samples,
                                 std::span<const std::size_t> outcomes,
                                 std::span<const double> q_true) {
  if (samples.size() == 0) throw ValidationError("classical_losses: no posterior samples");
  const std::size_t n_sym = samples.log_lik_cache.front().size();
  if (q_true.size() != n_sym)
    throw ValidationError("classical_losses: q_true length does not match the alphabet");

  std::vector<std::size_t> counts(n_sym, 0);
  for (std::size_t o : outcomes) {
    if (o >= n_sym) throw ValidationError("classical_losses: outcome index out of range");
    ++counts[o];
  }

  const std::size_t s_count = samples.size();
  const double inv_s = 1.0 / static_cast<double>(s_count);
  std::vector<double> predictive(n_sym, 0.0), var_log_p(n_sym, 0.0);
  std::vector<double> buf(s_count);
  for (std::size_t m = 0; m < n_sym; ++m) {
    double mean_p = 0.0;
    for (std::size_t s = 0; s < s_count; ++s) {
      buf[s] = samples.log_lik_cache[s][m];
      mean_p += std::exp(buf[s]);
    }
    predictive[m] = mean_p * inv_s;
    if (counts[m] > 0) var_log_p[m] = posterior_cov(buf, buf);
  }

  ClassicalLosses out{0.0, 0.0, 0.0};
  for (std::size_t m = 0; m < n_sym; ++m) {
    if (q_true[m] > 0.0) {
      if (predictive[m] <= 0.0)
        throw SupportViolation("classical_losses: predictive probability 0 at symbol " +
                               std::to_string(m));
      out.g_n -= q_true[m] * std::log(predictive[m]);
    }
    if (counts[m] > 0) {
      if (predictive[m] <= 0.0)
        throw SupportViolation("classical_losses: predictive probability 0 at observed symbol " +
                               std::to_string(m));
      const double w = static_cast<double>(counts[m]) / static_cast<double>(outcomes.size());
      out.t_n -= w * std::log(predictive[m]);
      out.waic += w * var_log_p[m];
    }
  }
  out.waic += out.t_n;
  return out;
}

std::vector<double> max_likelihood_theta(const ParametricModel& model,
                                         std::span<const std::size_t> outcomes, const Povm& povm) {
  if (outcomes.empty()) throw ValidationError("max_likelihood_theta: empty outcome list");
  const int d = model.dim_param();
  const auto& box = model.domain().box;
  auto loglik = [&](std::span<const double> t) {
    if (!model.domain_contains(t)) return -std::numeric_limits<double>::infinity();
    return log_likelihood(model, t, outcomes, povm);
  };

  // Dense grid.
  constexpr int kGrid = 401;
  std::vector<double> best;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::vector<double> t(d);
  std::vector<int> idx(d, 0);
  while (true) {
    for (int j = 0; j < d; ++j)
      t[j] = box[j][0] + (box[j][1] - box[j][0]) * idx[j] / double(kGrid - 1);
    const double ll = loglik(t);
    if (ll > best_ll) {
      best_ll = ll;
      best = t;
    }
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < kGrid) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  if (best.empty()) throw Error("max_likelihood_theta: no feasible grid point");

  // Coordinate-wise golden-section refinement around the best grid point.
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int round = 0; round < (d == 1 ? 1 : 3); ++round) {
    for (int j = 0; j < d; ++j) {
      const double cell = (box[j][1] - box[j][0]) / double(kGrid - 1);
      double lo = std::max(box[j][0], best[j] - cell);
      double hi = std::min(box[j][1], best[j] + cell);
      auto f1d = [&](double x) {
        std::vector<double> u = best;
        u[j] = x;
        return loglik(u);
      };
      double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
      double f1 = f1d(x1), f2 = f1d(x2);
      while (hi - lo > 1e-10) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + golden * (hi - lo);
          f2 = f1d(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - golden * (hi - lo);
          f1 = f1d(x1);
        }
      }
      const double mid = 0.5 * (lo + hi);
      if (f1d(mid) >= best_ll) {
        best[j] = mid;
        best_ll = f1d(mid);
      }
    }
  }
  return best;
}

double qaic_ll(const ParametricModel& model, std::span<const std::size_t> outcomes,
               const Povm& povm, std::span<const double> theta_hat,
               const FisherReport& hessians) {
  if (outcomes.empty()) throw ValidationError("qaic_ll: empty outcome list");
  const int d = hessians.d;
  // I must be positive definite for the penalty to make sense.
  ComplexMatrix i_mat(d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) i_mat(r, c) = hessians.I[r * d + c];
  const EigDecomposition eig = eigh(HermitianMatrix(std::move(i_mat)));
  if (eig.eigenvalues.front() <= 0.0)
    throw SingularHessian("qaic_ll: Fisher information is not positive definite");
  if (eig.eigenvalues.back() / eig.eigenvalues.front() >= 1e8)
    throw SingularHessian("qaic_ll: Fisher information is numerically singular");

  double trace_ratio = 0.0;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      double inv_rc = 0.0;
      for (int k = 0; k < d; ++k)
        inv_rc += (eig.eigenvectors(r, k) * std::conj(eig.eigenvectors(c, k))).real() /
                  eig.eigenvalues[k];
      trace_ratio += hessians.J_q[r * d + c] * inv_rc;  // Tr(J_q I^-1) term by term
    }

  const double n = static_cast<double>(outcomes.size());
  const double nll = -log_likelihood(model, theta_hat, outcomes, povm) / n;
  return nll + (static_cast<double>(d) + trace_ratio) / (2.0 * n);
}

CriteriaReport compute_criteria(const ParametricModel& model, const PosteriorSamples& samples,
                                std::span<const std::size_t> outcomes,
                                const PauliShadowScheme& scheme, const DensityMatrix& rho_true) {
  CriteriaReport report;
  report.n = outcomes.size();

  const DensityMatrix sigma_b = bayes_mean_state(model, samples);
  report.g_n_q = quantum_generalization_loss(rho_true, sigma_b);
  report.t_n_q = quantum_training_loss(scheme, outcomes, sigma_b);

  std::vector<Snapshot> table;
  table.reserve(scheme.n_outcomes());
  for (std::size_t m = 0; m < scheme.n_outcomes(); ++m) table.push_back(scheme.snapshot(m));
  report.c_n_q = c_n_q(samples, outcomes, table);
  report.qwaic = qwaic(report.t_n_q, report.c_n_q);

  const std::vector<double> q_true = born_probabilities(rho_true, scheme.povm());
  const ClassicalLosses cl = classical_losses(samples, outcomes, q_true);
  report.g_n = cl.g_n;
  report.t_n = cl.t_n;
  report.waic = cl.waic;
  return report;
}

}  // namespace qsing
