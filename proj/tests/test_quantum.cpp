#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qsing/models.hpp"
#include "qsing/quantum.hpp"
#include "qsing/shadows.hpp"
#include "qsing/theory.hpp"

using namespace qsing;
using test::diag_rho;
using test::herm2;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("born probabilities: maximally mixed and |0><0| under the Pauli POVM") {
  const PauliShadowScheme scheme(1);
  const auto uniform = born_probabilities(diag_rho(0.5, 0.5), scheme.povm());
  for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const auto zero_state = born_probabilities(diag_rho(1.0, 0.0), scheme.povm());
  CHECK(zero_state[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(zero_state[1] == doctest::Approx(0.0));
  for (int m = 2; m < 6; ++m) CHECK(zero_state[m] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("born probabilities sum to one for random states") {
  const PauliShadowScheme scheme(1);
  Rng rng(314);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = born_probabilities(test::random_density(2, rng), scheme.povm());
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-10);
  }
}

TEST_CASE("born probabilities are label-stable under element reordering") {
  const PauliShadowScheme scheme(1);
  Rng rng(8);
  const DensityMatrix rho = test::random_density(2, rng);
  std::vector<HermitianMatrix> shuffled;
  std::vector<std::string> labels;
  const std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
  for (std::size_t m : perm) {
    shuffled.push_back(scheme.povm().element(m));
    labels.push_back(scheme.povm().label(m));
  }
  const Povm reordered(std::move(shuffled), std::move(labels));
  const auto p0 = born_probabilities(rho, scheme.povm());
  const auto p1 = born_probabilities(rho, reordered);
  for (std::size_t k = 0; k < perm.size(); ++k)
    CHECK(p1[k] == doctest::Approx(p0[perm[k]]).epsilon(1e-14));
}

TEST_CASE("quantum relative entropy: identity, closed forms, rank-deficient rho") {
  Rng rng(21);
  const DensityMatrix rho = test::random_density(2, rng);
  CHECK(quantum_relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-10));

  // D(I/2 || diag(cos^2 t, sin^2 t)) at t = pi/8: cos^2 sin^2 = 1/8 gives log(2)/2.
  const double t = kPi / 8.0;
  const DensityMatrix sigma = diag_rho(std::cos(t) * std::cos(t), std::sin(t) * std::sin(t));
  CHECK(quantum_relative_entropy(diag_rho(0.5, 0.5), sigma) ==
        doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

  // Pure reference state: 0 log 0 = 0 on rho's spectrum.
  CHECK(quantum_relative_entropy(diag_rho(1.0, 0.0), diag_rho(0.9, 0.1)) ==
        doctest::Approx(std::log(1.0 / 0.9)).epsilon(1e-12));
}

TEST_CASE("quantum relative entropy raises on rank-deficient sigma") {
  CHECK_THROWS_AS(quantum_relative_entropy(diag_rho(0.5, 0.5), diag_rho(1.0, 0.0)),
                  RankDeficientState);
}

TEST_CASE("quantum relative entropy is nonnegative") {
  Rng rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix a = test::random_density(2, rng);
    const DensityMatrix b = test::random_density(2, rng);
    CHECK(quantum_relative_entropy(a, b) >= -1e-10);
  }
}

TEST_CASE("kl divergence: identity, closed form, deterministic reference") {
  const std::vector<double> q = {0.2, 0.5, 0.3};
  CHECK(kl_divergence(q, q) == doctest::Approx(0.0));

  const std::vector<double> det = {1.0, 0.0};
  const std::vector<double> fair = {0.5, 0.5};
  CHECK(kl_divergence(det, fair) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(kl_divergence(det, std::vector<double>{0.0, 1.0}), SupportViolation);
  CHECK_THROWS_AS(kl_divergence(det, std::vector<double>{1.0, 0.0, 0.0}), ValidationError);
}

TEST_CASE("ex41: KL over Born distributions equals D/3 at t = pi/8") {
  const PauliShadowScheme scheme(1);
  const ParametricModel model = make_model("ex41_regular");
  const double t = kPi / 8.0;
  const DensityMatrix rho = diag_rho(0.5, 0.5);
  const std::vector<double> q = born_probabilities(rho, scheme.povm());
  const std::vector<double> p = born_probabilities(model.sigma(std::vector<double>{t}),
                                                   scheme.povm());
  CHECK(kl_divergence(q, p) == doctest::Approx(std::log(2.0) / 6.0).epsilon(1e-12));
}

TEST_CASE("data processing: KL <= D on ex41 and ex42 grids") {
  const PauliShadowScheme scheme(1);
  for (const char* id : {"ex41_regular", "ex42_singular"}) {
    const ParametricModel model = make_model(id);
    const DensityMatrix rho = model.true_state();
    const std::vector<double> q = born_probabilities(rho, scheme.povm());
    for (int k = 0; k < 100; ++k) {
      std::vector<double> theta;
      if (model.dim_param() == 1) {
        theta = {0.05 + (kPi / 2.0 - 0.1) * k / 99.0};
      } else {
        const double x = -kPi / 3.0 + 0.05 + (kPi / 2.0 + kPi / 3.0 - 0.6) * k / 99.0;
        theta = {x, 0.0};
        if (std::abs(x - kPi / 6.0) < 0.02) continue;  // rank-deficient sliver
      }
      const DensityMatrix sig = model.sigma(theta);
      if (sig.min_eigenvalue() <= 1e-9) continue;
      const std::vector<double> p = born_probabilities(sig, scheme.povm());
      CHECK(kl_divergence(q, p) <= quantum_relative_entropy(rho, sig) + 1e-10);
    }
  }
}

TEST_CASE("tomographic completeness") {
  const PauliShadowScheme scheme(1);
  CHECK(is_tomographically_complete(scheme.povm()));

  std::vector<HermitianMatrix> z_only;
  z_only.push_back(herm2(1.0, 0.0, 0.0, 0.0));
  z_only.push_back(herm2(0.0, 0.0, 0.0, 1.0));
  CHECK_FALSE(is_tomographically_complete(Povm(std::move(z_only), {"Z+", "Z-"})));

  std::vector<HermitianMatrix> split;
  split.push_back(herm2(0.5, 0.0, 0.0, 0.5));
  split.push_back(herm2(0.5, 0.0, 0.0, 0.5));
  CHECK_FALSE(is_tomographically_complete(Povm(std::move(split), {"a", "b"})));
}

TEST_CASE("density matrix validation") {
  CHECK_THROWS_AS(DensityMatrix(herm2(0.7, 0.0, 0.0, 0.7)), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(herm2(1.2, 0.0, 0.0, -0.2)), ValidationError);
}

TEST_CASE("povm validation") {
  std::vector<HermitianMatrix> short_sum;
  short_sum.push_back(herm2(0.5, 0.0, 0.0, 0.5));
  CHECK_THROWS_AS(Povm(std::move(short_sum), {"a"}), ValidationError);
}
