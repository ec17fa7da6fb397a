#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "qsing/shadows.hpp"

using namespace qsing;
using test::diag_rho;

TEST_CASE("snapshots: Z+ matrix, trace, spectrum") {
  const PauliShadowScheme scheme(1);
  const Snapshot& z_plus = scheme.snapshot(scheme.outcome_index("Z+"));
  CHECK(z_plus.mat(0, 0).real() == doctest::Approx(2.0));
  CHECK(z_plus.mat(1, 1).real() == doctest::Approx(-1.0));
  CHECK(std::abs(z_plus.mat(0, 1)) <= 1e-15);

  for (std::size_t m = 0; m < scheme.n_outcomes(); ++m) {
    const Snapshot& s = scheme.snapshot(m);
    CHECK(std::abs(trace(s.mat.mat()) - cxd(1.0, 0.0)) <= 1e-12);
    const auto eig = eigh(s.mat);
    CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(eig.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("snapshot X+ diagonal in the X basis") {
  const PauliShadowScheme scheme(1);
  const Snapshot& x_plus = scheme.snapshot(scheme.outcome_index("X+"));
  // <+|rho_hat|+> = 2 and <-|rho_hat|-> = -1.
  const cxd plus[2] = {std::sqrt(0.5), std::sqrt(0.5)};
  const cxd minus[2] = {std::sqrt(0.5), -std::sqrt(0.5)};
  auto expect = [&](const cxd v[2]) {
    cxd acc = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc += std::conj(v[i]) * x_plus.mat(i, j) * v[j];
    return acc.real();
  };
  CHECK(expect(plus) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(expect(minus) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("exact unbiasedness by enumeration over 20 random states") {
  const PauliShadowScheme scheme(1);
  Rng rng(20240601);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix rho = test::random_density(2, rng);
    CHECK(test::unbiasedness_error(rho, scheme) <= 1e-12);
  }
}

TEST_CASE("unknown outcome labels and indices are rejected") {
  const PauliShadowScheme scheme(1);
  CHECK_THROWS_AS(scheme.outcome_index("Q+"), ValidationError);
  CHECK_THROWS_AS(scheme.snapshot(6), ValidationError);
}

TEST_CASE("sampling: zero-probability outcomes never occur") {
  const PauliShadowScheme scheme(1);
  Rng rng(11);
  const auto outcomes = sample_outcomes(diag_rho(1.0, 0.0), scheme, 20000, rng);
  const std::size_t z_minus = scheme.outcome_index("Z-");
  for (std::size_t o : outcomes) CHECK(o != z_minus);
}

TEST_CASE("sampling: frequencies concentrate for the maximally mixed state") {
  const PauliShadowScheme scheme(1);
  Rng rng(77);
  const std::size_t n = 60000;
  const auto outcomes = sample_outcomes(diag_rho(0.5, 0.5), scheme, n, rng);
  std::vector<std::size_t> counts(6, 0);
  for (std::size_t o : outcomes) ++counts[o];
  for (std::size_t m = 0; m < 6; ++m) {
    const double freq = static_cast<double>(counts[m]) / static_cast<double>(n);
    CHECK(std::abs(freq - 1.0 / 6.0) <= 0.01);
  }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const PauliShadowScheme scheme(1);
  Rng rng_a(5150), rng_b(5150);
  const DensityMatrix rho = diag_rho(0.3, 0.7);
  CHECK(sample_outcomes(rho, scheme, 500, rng_a) == sample_outcomes(rho, scheme, 500, rng_b));
}

TEST_CASE("mean_snapshot: single element, exact enumeration mean, sampled mean") {
  const PauliShadowScheme scheme(1);
  const Snapshot single[] = {scheme.snapshot(0)};
  CHECK(max_abs(mean_snapshot(std::span<const Snapshot>(single)).mat() -
                scheme.snapshot(0).mat.mat()) == 0.0);

  // Outcome-weighted enumeration reproduces rho exactly (channel inverse).
  Rng rng(31);
  const DensityMatrix rho = test::random_density(2, rng);
  CHECK(test::unbiasedness_error(rho, scheme) <= 1e-12);

  // |+><+| from 50000 sampled snapshots.
  ComplexMatrix plus(2);
  plus(0, 0) = 0.5;
  plus(0, 1) = 0.5;
  plus(1, 0) = 0.5;
  plus(1, 1) = 0.5;
  const DensityMatrix rho_plus{HermitianMatrix(std::move(plus))};
  Rng rng2(32);
  const auto outcomes = sample_outcomes(rho_plus, scheme, 50000, rng2);
  const HermitianMatrix mean = mean_snapshot(scheme, outcomes);
  CHECK(frobenius_norm(mean.mat() - rho_plus.mat().mat()) <= 0.05);
}

TEST_CASE("mean_snapshot rejects empty input") {
  CHECK_THROWS_AS(mean_snapshot(std::span<const Snapshot>{}), ValidationError);
}

TEST_CASE("empirical mean error scales as n^{-1/2}") {
  const PauliShadowScheme scheme(1);
  const DensityMatrix rho = diag_rho(0.25, 0.75);
  const std::vector<double> ns = {1e3, 1e4, 1e5};
  std::vector<double> errors;
  for (double nd : ns) {
    const std::size_t n = static_cast<std::size_t>(nd);
    // Average the error over a few repetitions to stabilize the slope.
    double err = 0.0;
    for (int rep = 0; rep < 8; ++rep) {
      Rng rng(1000 + 17 * rep);
      const auto outcomes = sample_outcomes(rho, scheme, n, rng);
      err += frobenius_norm(mean_snapshot(scheme, outcomes).mat() - rho.mat().mat());
    }
    errors.push_back(err / 8.0);
  }
  const double slope = test::loglog_slope(ns, errors);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));  // -0.5 +- 0.15
}

TEST_CASE("two-qubit scheme: tensor structure and unbiasedness") {
  const PauliShadowScheme scheme(2);
  CHECK(scheme.n_outcomes() == 36);
  CHECK(scheme.dim() == 4);
  CHECK(scheme.label(0) == "Z+,Z+");
  Rng rng(88);
  const DensityMatrix rho = test::random_density(4, rng);
  CHECK(test::unbiasedness_error(rho, scheme) <= 1e-12);
}
