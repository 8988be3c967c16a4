#include "gssl/error.hpp"
#include "gssl/bench.hpp"
#include "gssl/deformed.hpp"
#include "gssl/fast_taylor.hpp"
#include "gssl/graph.hpp"
#include "gssl/kernel_model.hpp"
#include "gssl/mknn.hpp"
#include "gssl/pdl.hpp"
#include "gssl/propagation.hpp"
#include "gssl/tllt.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gssl;

namespace {

// -1 marks an unlabeled sample on the Python side.
std::vector<Label> to_labels(const std::vector<int>& raw) {
  std::vector<Label> out;
  out.reserve(raw.size());
  for (int v : raw) out.push_back(v < 0 ? Label{} : Label{v});
  return out;
}

std::vector<int> from_labels(const std::vector<Label>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l ? *l : -1);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-based semi-supervised learning";
  m.attr("__version__") = "0.1.0";

  py::register_exception<gssl::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<gssl::InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<gssl::GraphError>(m, "GraphError", PyExc_RuntimeError);
  py::register_exception<gssl::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<gssl::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Matrix& x, const std::vector<int>& labels, int num_classes,
                       std::vector<int> truth) {
             return Dataset(x, to_labels(labels), num_classes, std::move(truth));
           }),
           py::arg("features"), py::arg("labels"), py::arg("num_classes"),
           py::arg("truth") = std::vector<int>{})
      .def_property_readonly("features", &Dataset::features)
      .def_property_readonly("labels", [](const Dataset& d) { return from_labels(d.labels()); })
      .def_property_readonly("truth", &Dataset::truth)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def("__len__", &Dataset::size);

  py::class_<Graph>(m, "Graph")
      .def_static("from_dense", &Graph::from_dense)
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("degrees", &Graph::degrees)
      .def_property_readonly("volume", &Graph::volume)
      .def("dense_weights", [](const Graph& g) { return Matrix(g.weights()); });

  py::class_<PropagationResult>(m, "PropagationResult")
      .def_readonly("scores", &PropagationResult::scores)
      .def_readonly("predicted", &PropagationResult::predicted)
      .def_readonly("iterations", &PropagationResult::iterations)
      .def_readonly("converged", &PropagationResult::converged);

  py::class_<KernelModel>(m, "KernelModel")
      .def_readonly("kind", &KernelModel::kind)
      .def_readonly("coefficients", &KernelModel::coefficients)
      .def_readonly("bias", &KernelModel::bias)
      .def_readonly("sigma", &KernelModel::sigma)
      .def("raw_outputs", &KernelModel::raw_outputs)
      .def("to_json", [](const KernelModel& km) { return serialize_model(km); })
      .def_static("from_json", [](const std::string& s) { return parse_model(s); });

  m.def("one_hot_seeds", &one_hot_seeds);
  m.def("gen_two_moons", &gen_two_moons, py::arg("n"), py::arg("noise"), py::arg("labels_per_class"),
        py::arg("seed"));
  m.def("gen_blobs", &gen_blobs, py::arg("n"), py::arg("centers"), py::arg("stddev"),
        py::arg("labels_per_class"), py::arg("seed"));
  m.def("auto_sigma", &auto_sigma, py::arg("features"), py::arg("k"));
  m.def(
      "build_knn_graph",
      [](const Dataset& d, Index k, std::optional<double> sigma, bool constrained) {
        return build_knn_graph(d, k, sigma,
                               constrained ? std::optional(constraints_from_labels(d)) : std::nullopt);
      },
      py::arg("data"), py::arg("k"), py::arg("sigma") = py::none(), py::arg("constrained") = false);
  m.def("commute_time", &commute_time, py::arg("graph"), py::arg("i"), py::arg("j"));

  m.def("lgc", &lgc_closed, py::arg("graph"), py::arg("seeds"), py::arg("alpha"));
  m.def(
      "lgc_iterate",
      [](const Graph& g, const LabelMatrix& y, double alpha, double tol, int max_it) {
        return lgc_iterate(g, y, PropagationConfig{alpha, tol, max_it});
      },
      py::arg("graph"), py::arg("seeds"), py::arg("alpha"), py::arg("tolerance") = 1e-8,
      py::arg("max_iterations") = 10000);
  m.def("gfhf", &gfhf, py::arg("graph"), py::arg("data"));
  m.def("flap", py::overload_cast<const Graph&, const Dataset&, double, double>(&flap_closed),
        py::arg("graph"), py::arg("data"), py::arg("alpha"), py::arg("gamma") = 1.0);
  m.def(
      "fast_lgc",
      [](const Dataset& d, const LabelMatrix& y, double alpha, double sigma) { return fast_lgc(d, y, alpha, sigma); },
      py::arg("data"), py::arg("seeds"), py::arg("alpha"), py::arg("sigma"));
  m.def(
      "mknn",
      [](const Graph& g, const Dataset& d, double alpha, Index k) {
        const Graph constrained = apply_constraints(g, constraints_from_labels(d));
        return mknn_classify(fatigue_similarity(constrained, alpha), d, k);
      },
      py::arg("graph"), py::arg("data"), py::arg("alpha") = 0.99, py::arg("k") = 3);
  m.def("reconstruct_weights", &reconstruct_weights, py::arg("x"), py::arg("neighbors"));
  m.def(
      "deformed",
      [](const Graph& g, const Dataset& d, double beta, double gamma) {
        DeformedConfig cfg;
        cfg.beta = beta;
        cfg.gamma = gamma;
        return deformed_transductive(g, d, cfg);
      },
      py::arg("graph"), py::arg("data"), py::arg("beta") = 1.0, py::arg("gamma") = 0.1);
  m.def(
      "deformed_inductive",
      [](const Dataset& d, const Graph& g, double beta, double gamma, double alpha_rkhs, double sigma) {
        return deformed_inductive(d, g, DeformedConfig{beta, gamma, alpha_rkhs, sigma});
      },
      py::arg("data"), py::arg("graph"), py::arg("beta") = 1.0, py::arg("gamma") = 0.1,
      py::arg("alpha_rkhs") = 1e-3, py::arg("sigma") = 1.0);
  m.def(
      "train_pdl",
      [](const Dataset& d, Index k, double alpha, double gamma) {
        PdlOptions opt;
        opt.posterior.k = k;
        opt.posterior.alpha = alpha;
        opt.gamma = gamma;
        PdlFit fit = train_pdl(d, opt);
        return py::make_tuple(fit.estimate.posteriors, fit.model);
      },
      py::arg("data"), py::arg("k") = 10, py::arg("alpha") = 0.99, py::arg("gamma") = 100.0);
  m.def("predict_posteriors", &predict_posteriors, py::arg("model"), py::arg("x"));
  m.def(
      "tllt",
      [](const Dataset& d, const Graph& g, double gamma_fb, double eps, Index s0) {
        TlltResult r = tllt_run(d, g, TeacherConfig{gamma_fb, eps, s0});
        return py::make_tuple(r.result, history_jsonl(r.state.history));
      },
      py::arg("data"), py::arg("graph"), py::arg("gamma_fb") = 1.0, py::arg("epsilon") = 1e-6,
      py::arg("s_initial") = 1);
  m.def(
      "run_experiment",
      [](const std::string& config, bool include_timing) {
        return report_json(run_experiment(config), include_timing);
      },
      py::arg("config"), py::arg("include_timing") = true);
}
