// Python bindings for the main operations: states and measurements, classical
// shadows, the MH posterior, the information criteria, Fisher numerics and the
// experiment harness.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsing/criteria.hpp"
#include "qsing/experiment.hpp"

namespace py = pybind11;
using namespace qsing;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const ComplexArray& array) {
  const auto buf = array.request();
  if (buf.ndim != 2 || buf.shape[0] != buf.shape[1])
    throw ValidationError("expected a square 2-d complex array");
  const int dim = static_cast<int>(buf.shape[0]);
  ComplexMatrix m(dim);
  const auto* data = static_cast<const std::complex<double>*>(buf.ptr);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = data[i * dim + j];
  return m;
}

py::array to_array(const ComplexMatrix& m) {
  const int dim = m.dim();
  py::array_t<std::complex<double>> out({dim, dim});
  auto buf = out.mutable_unchecked<2>();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) buf(i, j) = m(i, j);
  return out;
}

DensityMatrix to_density(const ComplexArray& array) {
  return DensityMatrix(HermitianMatrix(to_matrix(array)));
}

py::array matrix_list(const std::vector<double>& m, int d) {
  py::array_t<double> out({d, d});
  auto buf = out.mutable_unchecked<2>();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) buf(i, j) = m[i * d + j];
  return out;
}

MhConfig mh_config_from_kwargs(std::size_t n_samples, std::size_t burn_in,
                               const std::vector<double>& step_scale, bool adapt,
                               double target_acceptance) {
  MhConfig config;
  config.n_samples = n_samples;
  config.burn_in = burn_in;
  config.step_scale = step_scale;
  config.adapt_during_burn_in = adapt;
  config.target_acceptance = target_acceptance;
  return config;
}

ExperimentConfig experiment_config_from_dict(const py::dict& d) {
  ExperimentConfig config;
  for (const auto& item : d) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "model_id")
      config.model_id = py::cast<std::string>(item.second);
    else if (key == "master_seed")
      config.master_seed = py::cast<std::uint64_t>(item.second);
    else if (key == "theta_true")
      config.theta_true = py::cast<std::vector<double>>(item.second);
    else if (key == "rho_true")
      config.rho_true_mat = to_matrix(py::cast<ComplexArray>(item.second));
    else if (key == "n_grid")
      config.n_grid = py::cast<std::vector<std::size_t>>(item.second);
    else if (key == "repetitions")
      config.repetitions = py::cast<std::size_t>(item.second);
    else if (key == "output_dir")
      config.output_dir = py::cast<std::string>(item.second);
    else if (key == "mh") {
      const py::dict mh = py::cast<py::dict>(item.second);
      for (const auto& mh_item : mh) {
        const std::string mh_key = py::cast<std::string>(mh_item.first);
        if (mh_key == "n_samples")
          config.mh.n_samples = py::cast<std::size_t>(mh_item.second);
        else if (mh_key == "burn_in")
          config.mh.burn_in = py::cast<std::size_t>(mh_item.second);
        else if (mh_key == "step_scale")
          config.mh.step_scale = py::cast<std::vector<double>>(mh_item.second);
        else if (mh_key == "adapt_during_burn_in")
          config.mh.adapt_during_burn_in = py::cast<bool>(mh_item.second);
        else if (mh_key == "target_acceptance")
          config.mh.target_acceptance = py::cast<double>(mh_item.second);
        else
          throw ValidationError("unknown mh config key \"" + mh_key + "\"");
      }
    } else {
      throw ValidationError("unknown config key \"" + key + "\"");
    }
  }
  return config;
}

py::dict record_to_dict(const RunRecord& r) {
  py::dict d;
  d["model_id"] = r.model_id;
  d["n"] = r.n;
  d["rep"] = r.rep;
  d["seed"] = r.seed;
  d["g_n_q"] = r.criteria.g_n_q;
  d["t_n_q"] = r.criteria.t_n_q;
  d["c_n_q"] = r.criteria.c_n_q;
  d["qwaic"] = r.criteria.qwaic;
  d["g_n"] = r.criteria.g_n;
  d["t_n"] = r.criteria.t_n;
  d["waic"] = r.criteria.waic;
  d["acceptance_rate"] = r.acceptance_rate;
  d["wall_time_ms"] = r.wall_time_ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(qsing, m) {
  m.doc() = "Bayesian quantum state estimation: shadows, MH posteriors, QWAIC";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RankDeficientState>(m, "RankDeficientStateError", PyExc_ArithmeticError);
  py::register_exception<SupportViolation>(m, "SupportViolationError", PyExc_ArithmeticError);
  py::register_exception<OutOfDomain>(m, "OutOfDomainError", PyExc_ValueError);
  py::register_exception<SingularHessian>(m, "SingularHessianError", PyExc_ArithmeticError);

  m.def("eigh", [](const ComplexArray& a) {
    const EigDecomposition eig = eigh(HermitianMatrix(to_matrix(a)));
    return py::make_tuple(py::cast(eig.eigenvalues), to_array(eig.eigenvectors));
  }, py::arg("a"), "Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix");

  m.def("matrix_log", [](const ComplexArray& a, double eigen_floor) {
    return to_array(matrix_log(HermitianMatrix(to_matrix(a)), eigen_floor).mat());
  }, py::arg("a"), py::arg("eigen_floor") = 1e-12);

  m.def("matrix_exp", [](const ComplexArray& a) {
    return to_array(matrix_exp(HermitianMatrix(to_matrix(a))).mat());
  }, py::arg("a"));

  m.def("trace_product", [](const ComplexArray& a, const ComplexArray& b) {
    return trace_product(HermitianMatrix(to_matrix(a)), HermitianMatrix(to_matrix(b)));
  }, py::arg("a"), py::arg("b"), "Re Tr(AB) for Hermitian A, B");

  m.def("von_neumann_entropy",
        [](const ComplexArray& rho) { return von_neumann_entropy(to_density(rho)); },
        py::arg("rho"));

  m.def("quantum_relative_entropy",
        [](const ComplexArray& rho, const ComplexArray& sigma, double eigen_floor) {
          return quantum_relative_entropy(to_density(rho), to_density(sigma), eigen_floor);
        },
        py::arg("rho"), py::arg("sigma"), py::arg("eigen_floor") = 1e-12);

  m.def("kl_divergence", [](const std::vector<double>& q, const std::vector<double>& p) {
    return kl_divergence(q, p);
  }, py::arg("q"), py::arg("p"));

  py::class_<PauliShadowScheme>(m, "PauliShadowScheme")
      .def(py::init<int>(), py::arg("n_qubits"))
      .def_property_readonly("n_qubits", &PauliShadowScheme::n_qubits)
      .def_property_readonly("dim", &PauliShadowScheme::dim)
      .def_property_readonly("n_outcomes", &PauliShadowScheme::n_outcomes)
      .def("labels",
           [](const PauliShadowScheme& s) {
             std::vector<std::string> out;
             for (std::size_t k = 0; k < s.n_outcomes(); ++k) out.push_back(s.label(k));
             return out;
           })
      .def("povm_elements",
           [](const PauliShadowScheme& s) {
             std::vector<py::array> out;
             for (std::size_t k = 0; k < s.povm().size(); ++k)
               out.push_back(to_array(s.povm().element(k).mat()));
             return out;
           })
      .def("snapshot",
           [](const PauliShadowScheme& s, std::size_t k) { return to_array(s.snapshot(k).mat.mat()); },
           py::arg("outcome"))
      .def("outcome_index",
           [](const PauliShadowScheme& s, const std::string& label) { return s.outcome_index(label); },
           py::arg("label"));

  m.def("is_tomographically_complete", [](const std::vector<ComplexArray>& elements) {
    std::vector<HermitianMatrix> mats;
    for (const auto& e : elements) mats.emplace_back(to_matrix(e));
    return is_tomographically_complete(Povm(std::move(mats), {}));
  }, py::arg("elements"));

  m.def("sample_outcomes",
        [](const ComplexArray& rho, const PauliShadowScheme& scheme, std::size_t n,
           std::uint64_t seed) {
          Rng rng(seed);
          return sample_outcomes(to_density(rho), scheme, n, rng);
        },
        py::arg("rho"), py::arg("scheme"), py::arg("n"), py::arg("seed"));

  m.def("mean_snapshot",
        [](const PauliShadowScheme& scheme, const std::vector<std::size_t>& outcomes) {
          return to_array(mean_snapshot(scheme, outcomes).mat());
        },
        py::arg("scheme"), py::arg("outcomes"));

  py::class_<ParametricModel>(m, "Model")
      .def_property_readonly("id", &ParametricModel::id)
      .def_property_readonly("dim_param", &ParametricModel::dim_param)
      .def_property_readonly("hilbert_dim", &ParametricModel::hilbert_dim)
      .def_property_readonly("theta0", &ParametricModel::theta0)
      .def("domain_contains",
           [](const ParametricModel& model, const std::vector<double>& theta) {
             return model.domain_contains(theta);
           },
           py::arg("theta"))
      .def("sigma",
           [](const ParametricModel& model, const std::vector<double>& theta) {
             return to_array(model.sigma(theta).mat().mat());
           },
           py::arg("theta"))
      .def("true_state",
           [](const ParametricModel& model) { return to_array(model.true_state().mat().mat()); })
      .def("log_likelihood",
           [](const ParametricModel& model, const std::vector<double>& theta,
              const std::vector<std::size_t>& outcomes, const PauliShadowScheme& scheme) {
             return log_likelihood(model, theta, outcomes, scheme.povm());
           },
           py::arg("theta"), py::arg("outcomes"), py::arg("scheme"));

  m.def("make_model", &make_model, py::arg("model_id"));
  m.def("model_ids", &model_ids);

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_property_readonly("thetas",
                             [](const PosteriorSamples& s) {
                               const std::size_t rows = s.size();
                               const std::size_t cols = rows ? s.thetas[0].size() : 0;
                               py::array_t<double> out({rows, cols});
                               auto buf = out.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < rows; ++i)
                                 for (std::size_t j = 0; j < cols; ++j) buf(i, j) = s.thetas[i][j];
                               return out;
                             })
      .def_property_readonly("acceptance_rate",
                             [](const PosteriorSamples& s) { return s.acceptance_rate; })
      .def("__len__", &PosteriorSamples::size);

  m.def("run_mh",
        [](const ParametricModel& model, const std::vector<std::size_t>& outcomes,
           const PauliShadowScheme& scheme, std::uint64_t seed, std::size_t n_samples,
           std::size_t burn_in, const std::vector<double>& step_scale, bool adapt,
           double target_acceptance) {
          Rng rng(seed);
          return run_mh(model, outcomes, scheme.povm(),
                        mh_config_from_kwargs(n_samples, burn_in, step_scale, adapt,
                                              target_acceptance),
                        rng);
        },
        py::arg("model"), py::arg("outcomes"), py::arg("scheme"), py::arg("seed"),
        py::arg("n_samples") = 5000, py::arg("burn_in") = 500,
        py::arg("step_scale") = std::vector<double>{0.05}, py::arg("adapt_during_burn_in") = true,
        py::arg("target_acceptance") = 0.3);

  m.def("bayes_mean_state",
        [](const ParametricModel& model, const PosteriorSamples& samples) {
          return to_array(bayes_mean_state(model, samples).mat().mat());
        },
        py::arg("model"), py::arg("samples"));

  m.def("compute_criteria",
        [](const ParametricModel& model, const PosteriorSamples& samples,
           const std::vector<std::size_t>& outcomes, const PauliShadowScheme& scheme,
           const ComplexArray& rho_true) {
          const CriteriaReport r =
              compute_criteria(model, samples, outcomes, scheme, to_density(rho_true));
          py::dict d;
          d["g_n_q"] = r.g_n_q;
          d["t_n_q"] = r.t_n_q;
          d["c_n_q"] = r.c_n_q;
          d["qwaic"] = r.qwaic;
          d["g_n"] = r.g_n;
          d["t_n"] = r.t_n;
          d["waic"] = r.waic;
          d["n"] = r.n;
          return d;
        },
        py::arg("model"), py::arg("samples"), py::arg("outcomes"), py::arg("scheme"),
        py::arg("rho_true"));

  m.def("numerical_hessians",
        [](const ParametricModel& model, std::optional<std::vector<double>> theta,
           double fd_step) {
          const PauliShadowScheme scheme(model.hilbert_dim() == 2 ? 1 : 2);
          const std::vector<double> at = theta ? *theta : model.theta0();
          FisherReport report =
              numerical_hessians(model, model.true_state(), scheme.povm(), at, fd_step);
          py::dict d;
          d["theta0"] = report.theta0;
          d["I"] = matrix_list(report.I, report.d);
          d["J"] = matrix_list(report.J, report.d);
          d["I_q"] = matrix_list(report.I_q, report.d);
          d["J_q"] = matrix_list(report.J_q, report.d);
          try {
            fill_regular_coefficients(report);
            d["lambda_q"] = *report.lambda_q;
            d["nu_q"] = *report.nu_q;
            d["nu_prime_q"] = *report.nu_prime_q;
          } catch (const SingularHessian&) {
            d["lambda_q"] = py::none();
            d["nu_q"] = py::none();
            d["nu_prime_q"] = py::none();
          }
          return d;
        },
        py::arg("model"), py::arg("theta") = py::none(), py::arg("fd_step") = 0.0);

  m.def("reference", [](const std::string& model_id) {
    const ReferenceConstants ref = reference(model_id);
    py::dict d;
    auto put = [&](const char* name, const std::optional<ReferenceEntry>& entry) {
      if (entry) {
        py::dict e;
        e["value"] = entry->value;
        e["source"] = entry->source;
        d[name] = e;
      }
    };
    put("lambda", ref.lambda);
    put("nu", ref.nu);
    put("r_cq", ref.r_cq);
    put("multiplicity", ref.multiplicity);
    put("lambda_q", ref.lambda_q);
    put("nu_q", ref.nu_q);
    put("nu_prime_q", ref.nu_prime_q);
    put("j", ref.j);
    put("j_q", ref.j_q);
    put("trace_ratio", ref.trace_ratio);
    return d;
  }, py::arg("model_id"));

  m.def("derive_child_seed", &derive_child_seed, py::arg("master_seed"), py::arg("n"),
        py::arg("rep"));

  m.def("run_experiment",
        [](const py::dict& config_dict, int threads) {
          const ExperimentConfig config = experiment_config_from_dict(config_dict);
          const auto [records, aggregates] = run_experiment(config, threads);
          py::list record_list;
          for (const RunRecord& r : records) record_list.append(record_to_dict(r));
          py::list aggregate_list;
          for (const AggregateRow& row : aggregates) {
            py::dict d;
            d["n"] = row.n;
            for (const auto& [name, stats] : row.metrics) {
              py::dict s;
              s["mean"] = stats.mean;
              s["std"] = stats.stddev;
              s["stderr"] = stats.stderr_mean;
              d[name.c_str()] = s;
            }
            aggregate_list.append(d);
          }
          return py::make_tuple(record_list, aggregate_list);
        },
        py::arg("config"), py::arg("threads") = 1);

  m.def("run_experiment_to_dir",
        [](const py::dict& config_dict, const std::string& out_dir, int threads) {
          ExperimentConfig config = experiment_config_from_dict(config_dict);
          config.output_dir = out_dir;
          const auto [records, aggregates] = run_experiment(config, threads);
          write_outputs(records, aggregates, config, out_dir);
        },
        py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);
}
