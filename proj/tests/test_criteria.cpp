#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "qsing/criteria.hpp"

using namespace qsing;
using test::diag_rho;
using test::herm2;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Fixture {
  PauliShadowScheme scheme{1};
  ParametricModel model = make_model("ex41_regular");
  std::vector<std::size_t> outcomes;
  PosteriorSamples samples;

  explicit Fixture(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    outcomes = sample_outcomes(model.true_state(), scheme, n, rng);
    samples = run_mh(model, outcomes, scheme.povm(), MhConfig{}, rng);
  }
};
}  // namespace

TEST_CASE("quantum generalization loss closed forms") {
  const DensityMatrix half = diag_rho(0.5, 0.5);
  CHECK(quantum_generalization_loss(half, half) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const double t = kPi / 8.0;
  const DensityMatrix sigma_b = diag_rho(std::cos(t) * std::cos(t), std::sin(t) * std::sin(t));
  CHECK(quantum_generalization_loss(half, sigma_b) ==
        doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("G^Q minus entropy equals the relative entropy") {
  Rng rng(60);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = test::random_density(2, rng);
    const DensityMatrix sigma_b = test::random_density(2, rng);
    const double lhs = quantum_generalization_loss(rho, sigma_b) - von_neumann_entropy(rho);
    CHECK(lhs == doctest::Approx(quantum_relative_entropy(rho, sigma_b)).epsilon(1e-10));
    CHECK(lhs >= -1e-10);
  }
}

TEST_CASE("quantum training loss: trace-one snapshots against I/2, scalar case") {
  const PauliShadowScheme scheme(1);
  const DensityMatrix half = diag_rho(0.5, 0.5);
  const std::vector<std::size_t> outcomes = {0, 1, 2, 3, 4, 5, 0, 2};
  CHECK(quantum_training_loss(scheme, outcomes, half) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const std::vector<Snapshot> single = {Snapshot{herm2(2.0, 0.0, 0.0, -1.0), "Z+"}};
  const DensityMatrix sigma_b = diag_rho(0.75, 0.25);
  const double expected = -(2.0 * std::log(0.75) - std::log(0.25));
  CHECK(quantum_training_loss(single, sigma_b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-0.81093).epsilon(1e-4));
}

TEST_CASE("unbiasedness transfer: enumeration-weighted training loss equals G^Q") {
  const PauliShadowScheme scheme(1);
  Rng rng(61);
  const DensityMatrix rho = test::random_density(2, rng);
  const DensityMatrix sigma_b = test::random_density(2, rng);
  const HermitianMatrix log_sigma = matrix_log(sigma_b.mat());
  const std::vector<double> q = born_probabilities(rho, scheme.povm());
  double weighted = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m)
    weighted -= q[m] * trace_product(scheme.snapshot(m).mat, log_sigma);
  CHECK(weighted == doctest::Approx(quantum_generalization_loss(rho, sigma_b)).epsilon(1e-10));
}

TEST_CASE("c_n_q vanishes for a degenerate posterior") {
  const PauliShadowScheme scheme(1);
  const ParametricModel model = make_model("ex41_regular");
  PosteriorSamples degenerate;
  const std::vector<double> theta = {0.6};
  const auto p = born_probabilities(model.sigma(theta), scheme.povm());
  const HermitianMatrix log_sigma = matrix_log(model.sigma(theta).mat());
  for (int s = 0; s < 50; ++s) {
    degenerate.thetas.push_back(theta);
    degenerate.log_sigma_cache.push_back(log_sigma);
    std::vector<double> row(p.size());
    for (std::size_t m = 0; m < p.size(); ++m) row[m] = std::log(p[m]);
    degenerate.log_lik_cache.push_back(std::move(row));
  }
  std::vector<Snapshot> table;
  for (std::size_t m = 0; m < 6; ++m) table.push_back(scheme.snapshot(m));
  const std::vector<std::size_t> outcomes = {0, 1, 2, 3};
  CHECK(c_n_q(degenerate, outcomes, table) == doctest::Approx(0.0));
}

TEST_CASE("c_n_q grouped sum matches the direct per-observation sum") {
  const Fixture fx(300, 91);
  std::vector<Snapshot> table;
  for (std::size_t m = 0; m < 6; ++m) table.push_back(fx.scheme.snapshot(m));
  const double grouped = c_n_q(fx.samples, fx.outcomes, table);

  const std::size_t s_count = fx.samples.size();
  std::vector<double> f(s_count), g(s_count);
  std::vector<std::vector<double>> g_by_symbol(6, std::vector<double>(s_count));
  for (std::size_t m = 0; m < 6; ++m)
    for (std::size_t s = 0; s < s_count; ++s)
      g_by_symbol[m][s] = trace_product(table[m].mat, fx.samples.log_sigma_cache[s]);
  double direct = 0.0;
  for (std::size_t o : fx.outcomes) {
    for (std::size_t s = 0; s < s_count; ++s) f[s] = fx.samples.log_lik_cache[s][o];
    direct += posterior_cov(f, g_by_symbol[o]);
  }
  direct /= static_cast<double>(fx.outcomes.size());
  CHECK(grouped == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("qwaic additivity is exact") {
  CHECK(qwaic(1.25, 0.0) == 1.25);
  const Fixture fx(500, 92);
  const CriteriaReport report =
      compute_criteria(fx.model, fx.samples, fx.outcomes, fx.scheme, fx.model.true_state());
  CHECK(report.qwaic == doctest::Approx(report.t_n_q + report.c_n_q).epsilon(1e-12));
  CHECK(report.waic >= report.t_n);  // variance term is nonnegative
  CHECK(report.n == 500);
}

TEST_CASE("classical losses: posterior concentrated at theta0 gives log 6") {
  const PauliShadowScheme scheme(1);
  const ParametricModel model = make_model("ex41_regular");
  PosteriorSamples degenerate;
  const std::vector<double> theta0 = {kPi / 4.0};
  const auto p = born_probabilities(model.sigma(theta0), scheme.povm());
  for (int s = 0; s < 20; ++s) {
    degenerate.thetas.push_back(theta0);
    std::vector<double> row(p.size());
    for (std::size_t m = 0; m < p.size(); ++m) row[m] = std::log(p[m]);
    degenerate.log_lik_cache.push_back(std::move(row));
  }
  const std::vector<std::size_t> outcomes = {0, 1, 2, 3, 4, 5};
  const std::vector<double> q_true(6, 1.0 / 6.0);
  const ClassicalLosses losses = classical_losses(degenerate, outcomes, q_true);
  CHECK(losses.g_n == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(losses.t_n == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(losses.waic == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("qaic_ll: unit information ratio gives penalty 1/n") {
  const PauliShadowScheme scheme(1);
  const ParametricModel model = make_model("ex41_regular");
  Rng rng(93);
  const auto outcomes = sample_outcomes(model.true_state(), scheme, 400, rng);
  const std::vector<double> theta_hat = {kPi / 4.0};

  FisherReport unit;
  unit.d = 1;
  unit.theta0 = theta_hat;
  unit.I = {2.0};
  unit.J = {2.0};
  unit.I_q = {2.0};
  unit.J_q = {2.0};
  const double value = qaic_ll(model, outcomes, scheme.povm(), theta_hat, unit);
  const double nll = -log_likelihood(model, theta_hat, outcomes, scheme.povm()) / 400.0;
  CHECK(value - nll == doctest::Approx(1.0 / 400.0).epsilon(1e-12));

  FisherReport negative = unit;
  negative.I = {-1.0};
  CHECK_THROWS_AS(qaic_ll(model, outcomes, scheme.povm(), theta_hat, negative), SingularHessian);
}

TEST_CASE("qaic_ll penalty for sec42_regular approaches (1 + 8.08)/(2n)") {
  const PauliShadowScheme scheme(1);
  const ParametricModel model = make_model("sec42_regular");
  const std::size_t n = 8000;
  Rng rng(94);
  const auto outcomes = sample_outcomes(model.true_state(), scheme, n, rng);
  const std::vector<double> theta_hat = max_likelihood_theta(model, outcomes, scheme.povm());
  CHECK(std::abs(theta_hat[0] - kPi / 4.0) <= 0.05);

  // Plug-in Fisher matrices at the MLE.
  const DensityMatrix sigma_hat = model.sigma(theta_hat);
  const FisherReport report = numerical_hessians(model, sigma_hat, scheme.povm(), theta_hat);
  const double value = qaic_ll(model, outcomes, scheme.povm(), theta_hat, report);
  const double nll = -log_likelihood(model, theta_hat, outcomes, scheme.povm()) /
                     static_cast<double>(n);
  const double penalty = value - nll;
  CHECK(penalty * 2.0 * static_cast<double>(n) == doctest::Approx(1.0 + 8.08).epsilon(0.06));
  CHECK(penalty == doctest::Approx(5.67e-4).epsilon(0.07));
}

TEST_CASE("compute_criteria wiring: report fields are finite and consistent") {
  const Fixture fx(1000, 95);
  const CriteriaReport report =
      compute_criteria(fx.model, fx.samples, fx.outcomes, fx.scheme, fx.model.true_state());
  for (double v : {report.g_n_q, report.t_n_q, report.c_n_q, report.qwaic, report.g_n, report.t_n,
                   report.waic})
    CHECK(std::isfinite(v));
  // G^Q dominates the entropy of the true state.
  CHECK(report.g_n_q >= von_neumann_entropy(fx.model.true_state()) - 1e-10);
}
