#include "qsing/theory.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace qsing {

namespace {

using Vec = std::vector<double>;

Vec mat_mul(const Vec& a, const Vec& b, int d) {
  Vec out(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const double aik = a[i * d + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) out[i * d + j] += aik * b[k * d + j];
    }
  return out;
}

double mat_trace(const Vec& a, int d) {
  double t = 0.0;
  for (int i = 0; i < d; ++i) t += a[i * d + i];
  return t;
}

// Inverse of a real symmetric matrix through the Hermitian eigensolver.
Vec sym_inverse(const Vec& a, int d) {
  ComplexMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = 0.5 * (a[i * d + j] + a[j * d + i]);
  const EigDecomposition eig = eigh(HermitianMatrix(std::move(m)));
  double max_abs_ev = 0.0, min_abs_ev = std::numeric_limits<double>::infinity();
  for (double lam : eig.eigenvalues) {
    max_abs_ev = std::max(max_abs_ev, std::abs(lam));
    min_abs_ev = std::min(min_abs_ev, std::abs(lam));
  }
  if (min_abs_ev == 0.0 || max_abs_ev / min_abs_ev >= 1e8)
    throw SingularHessian("matrix is singular (condition number >= 1e8)");
  Vec out(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k)
        s += (eig.eigenvectors(i, k) * std::conj(eig.eigenvectors(j, k))).real() /
             eig.eigenvalues[k];
      out[i * d + j] = s;
    }
  return out;
}

std::vector<double> shifted(std::span<const double> theta, int j, double delta) {
  std::vector<double> t(theta.begin(), theta.end());
  t[j] += delta;
  return t;
}

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NonFiniteDerivative(what + " evaluated to a non-finite value");
}

// Hessian of f by central second differences at step h (no extrapolation).
Vec hessian_at_step(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> theta0, std::span<const double> h, double f0, int d) {
  Vec out(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j) {
    const double fp = f(shifted(theta0, j, h[j]));
    const double fm = f(shifted(theta0, j, -h[j]));
    check_finite(fp, "loss");
    check_finite(fm, "loss");
    out[j * d + j] = (fp - 2.0 * f0 + fm) / (h[j] * h[j]);
  }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      auto at = [&](double sj, double sk) {
        std::vector<double> t(theta0.begin(), theta0.end());
        t[j] += sj;
        t[k] += sk;
        const double v = f(t);
        check_finite(v, "loss");
        return v;
      };
      const double v = (at(h[j], h[k]) - at(h[j], -h[k]) - at(-h[j], h[k]) + at(-h[j], -h[k])) /
                       (4.0 * h[j] * h[k]);
      out[j * d + k] = v;
      out[k * d + j] = v;
    }
  return out;
}

Vec richardson_hessian(const std::function<double(std::span<const double>)>& f,
                       std::span<const double> theta0, std::span<const double> h, int d) {
  const double f0 = f(theta0);
  check_finite(f0, "loss at theta0");
  std::vector<double> half(h.begin(), h.end());
  for (double& x : half) x *= 0.5;
  const Vec coarse = hessian_at_step(f, theta0, h, f0, d);
  const Vec fine = hessian_at_step(f, theta0, half, f0, d);
  Vec out(coarse.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  return out;
}

}  // namespace

double eval_K(const ParametricModel& model, const Povm& povm, std::span<const double> theta) {
  const std::vector<double> q0 = born_probabilities(model.sigma(model.theta0()), povm);
  const std::vector<double> p = born_probabilities(model.sigma(theta), povm);
  return kl_divergence(q0, p);
}

double eval_KQ(const ParametricModel& model, std::span<const double> theta) {
  return quantum_relative_entropy(model.sigma(model.theta0()), model.sigma(theta));
}

FisherReport numerical_hessians(const ParametricModel& model, const DensityMatrix& rho_true,
                                const Povm& povm, std::span<const double> theta0, double fd_step) {
  const int d = model.dim_param();
  if (static_cast<int>(theta0.size()) != d)
    throw ValidationError("numerical_hessians: theta0 length mismatch");

  std::vector<double> h(d);
  const auto& box = model.domain().box;
  for (int j = 0; j < d; ++j) {
    h[j] = fd_step > 0.0 ? fd_step : 1e-4 * (box[j][1] - box[j][0]);
    if (theta0[j] - 2.0 * h[j] < box[j][0] || theta0[j] + 2.0 * h[j] > box[j][1])
      throw BoundaryTooClose("numerical_hessians: theta0 within 2 steps of the box boundary "
                             "in dimension " + std::to_string(j));
  }
  // The extra constraint must hold on the whole stencil.
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (double sj : {-1.0, 1.0})
        for (double sk : {-1.0, 1.0}) {
          std::vector<double> t(theta0.begin(), theta0.end());
          t[j] += sj * h[j];
          t[k] += sk * h[k];
          if (!model.domain_contains(t))
            throw BoundaryTooClose("numerical_hessians: finite-difference stencil leaves the "
                                   "domain");
        }

  FisherReport report;
  report.theta0.assign(theta0.begin(), theta0.end());
  report.d = d;

  report.J = richardson_hessian(
      [&](std::span<const double> t) { return eval_K(model, povm, t); }, theta0, h, d);
  report.J_q = richardson_hessian(
      [&](std::span<const double> t) { return eval_KQ(model, t); }, theta0, h, d);

  // Classical Fisher information: exact alphabet sum of score outer products,
  // scores by Richardson-extrapolated central first differences.
  const std::vector<double> q_true = born_probabilities(rho_true, povm);
  const std::size_t n_sym = q_true.size();
  std::vector<std::vector<double>> score(d, std::vector<double>(n_sym));
  auto log_probs = [&](std::span<const double> t) {
    std::vector<double> p = born_probabilities(model.sigma(t), povm);
    for (double& v : p) v = std::log(v);
    return p;
  };
  for (int j = 0; j < d; ++j) {
    auto diff_at = [&](double step) {
      const std::vector<double> lp = log_probs(shifted(theta0, j, step));
      const std::vector<double> lm = log_probs(shifted(theta0, j, -step));
      std::vector<double> g(n_sym);
      for (std::size_t m = 0; m < n_sym; ++m) {
        g[m] = (lp[m] - lm[m]) / (2.0 * step);
        check_finite(g[m], "log-probability derivative");
      }
      return g;
    };
    const std::vector<double> coarse = diff_at(h[j]);
    const std::vector<double> fine = diff_at(0.5 * h[j]);
    for (std::size_t m = 0; m < n_sym; ++m) score[j][m] = (4.0 * fine[m] - coarse[m]) / 3.0;
  }
  report.I.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < n_sym; ++m) s += q_true[m] * score[j][m] * score[k][m];
      report.I[j * d + k] = s;
      report.I[k * d + j] = s;
    }

  // I_q from matrix-valued derivatives of log sigma.
  std::vector<ComplexMatrix> dlog(d);
  for (int j = 0; j < d; ++j) {
    auto diff_at = [&](double step) {
      const HermitianMatrix lp = matrix_log(model.sigma(shifted(theta0, j, step)).mat());
      const HermitianMatrix lm = matrix_log(model.sigma(shifted(theta0, j, -step)).mat());
      return cxd(1.0 / (2.0 * step), 0.0) * (lp.mat() - lm.mat());
    };
    const ComplexMatrix coarse = diff_at(h[j]);
    const ComplexMatrix fine = diff_at(0.5 * h[j]);
    dlog[j] = cxd(4.0 / 3.0, 0.0) * fine - cxd(1.0 / 3.0, 0.0) * coarse;
  }
  report.I_q.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      const double v = trace(rho_true.mat().mat() * dlog[j] * dlog[k]).real();
      check_finite(v, "I_q entry");
      report.I_q[j * d + k] = v;
      report.I_q[k * d + j] = v;
    }

  for (const Vec* m : {&report.J, &report.J_q})
    for (double v : *m) check_finite(v, "Hessian entry");
  return report;
}

void fill_regular_coefficients(FisherReport& report) {
  const int d = report.d;
  const Vec j_inv = sym_inverse(report.J, d);
  report.lambda_q = 0.5 * mat_trace(mat_mul(report.J_q, j_inv, d), d);
  report.nu_q = 0.5 * mat_trace(mat_mul(report.I_q, j_inv, d), d);
  report.nu_prime_q =
      0.5 * mat_trace(mat_mul(mat_mul(report.J_q, j_inv, d), mat_mul(report.I, j_inv, d), d), d);
}

ReferenceConstants reference(const std::string& model_id) {
  ReferenceConstants ref;
  ref.model_id = model_id;
  if (model_id == "ex41_regular") {
    ref.lambda = {0.5, "regular realizable one-parameter model: lambda = d/2"};
    ref.nu = {0.5, "regular realizable case: nu = lambda"};
    ref.lambda_q = {3.0, "tabulated analytic value; the trace formula gives 1.5"};
    ref.nu_prime_q = {3.0, "tabulated analytic value; the trace formula gives 1.5"};
    ref.nu_q = {4.0, "tabulated analytic value; the trace formula gives 1.5"};
    return ref;
  }
  if (model_id == "ex42_singular") {
    ref.lambda = {0.5, "normal crossing along theta1 = theta2 with vanishing order 2"};
    ref.r_cq = {3.0, "quantum-to-classical loss ratio under the uniform Pauli measurement"};
    return ref;
  }
  if (model_id == "sec42_regular") {
    ref.j = {1.308, "closed-form Hessian of the KL divergence at theta0 = pi/4"};
    ref.j_q = {10.565, "closed-form Hessian of the relative entropy at theta0 = pi/4"};
    ref.trace_ratio = {8.08, "Tr(J_q J^-1) = 2 lambda_q for this model"};
    return ref;
  }
  if (model_id == "ex43_depol:quadratic") {
    ref.lambda = {0.25, "vanishing order 8 after the blowup of the origin in the theta2 plane"};
    return ref;
  }
  if (model_id == "ex43_depol:cusp") {
    ref.lambda = {5.0 / 48.0, "resolution of the squared cusp (theta21^2 - theta22^3)^2 "
                              "composed with the quartic vanishing of the loss"};
    ref.multiplicity = {1.0, "single divisor attains the minimum"};
    return ref;
  }
  throw ValidationError("no reference constants for model id \"" + model_id + "\"");
}

}  // namespace qsing
