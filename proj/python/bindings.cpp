#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clustclass/archive.hpp"
#include "clustclass/cohort.hpp"
#include "clustclass/dataset.hpp"
#include "clustclass/error.hpp"
#include "clustclass/evaluation.hpp"
#include "clustclass/jcc.hpp"
#include "clustclass/pipeline.hpp"
#include "clustclass/slsvm.hpp"
#include "clustclass/synth.hpp"
#include "clustclass/theory.hpp"

namespace py = pybind11;
using namespace clustclass;

namespace {

AccInit parse_init(const std::string& name) {
  if (name == "random") return AccInit::kRandom;
  if (name == "kmeans") return AccInit::kKMeans;
  throw ArgumentError("init must be random or kmeans, got '" + name + "'");
}

ModelArchive fit_arrays(const Matrix& x, const std::vector<int>& y, const std::string& kind,
                        std::optional<double> T, double lambda_plus, double lambda_minus, double C,
                        double rho, double lambda, std::size_t K, double smoothing, int L,
                        std::uint64_t seed, bool standardize, std::size_t restarts,
                        std::size_t max_iters, const std::string& init, std::vector<std::string> names) {
  TrainSpec s;
  s.kind = parse_model_kind(kind);
  s.T = T;
  s.lambda_plus = lambda_plus;
  s.lambda_minus = lambda_minus;
  s.C = C;
  s.rho = rho;
  s.lambda = lambda;
  s.K = K;
  s.smoothing = smoothing;
  s.L = L;
  s.seed = seed;
  s.standardize = standardize;
  s.restarts = restarts;
  s.max_iters = max_iters;
  s.init = parse_init(init);
  return fit_model(make_dataset(x, y, std::move(names)), s);
}

py::dict solution_dict(const SvmSolution& s) {
  py::dict d;
  d["beta"] = s.model.beta;
  d["beta0"] = s.model.beta0;
  d["objective"] = s.objective;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint clustering and sparse classification";
  m.attr("__version__") = CLUSTCLASS_VERSION;

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(e.category()) + ": " + e.what()).c_str());
    }
  });

  py::class_<ModelArchive>(m, "Model")
      .def_property_readonly("kind", [](const ModelArchive& a) { return to_string(a.kind); })
      .def_property_readonly("feature_names", [](const ModelArchive& a) { return a.feature_names; })
      .def_property_readonly("dim", &ModelArchive::dim)
      .def("predict_scores", [](const ModelArchive& a, const Matrix& x) { return predict_scores(a, x); })
      .def(
          "predict",
          [](const ModelArchive& a, const Matrix& x) {
            std::vector<int> clusters, labels;
            std::vector<double> scores;
            for (const auto& r : predict(a, x)) {
              clusters.push_back(r.cluster);
              scores.push_back(r.score);
              labels.push_back(r.label);
            }
            return py::make_tuple(clusters, scores, labels);
          },
          "Returns (cluster, score, label) lists; cluster is -1 for single-model kinds.")
      .def("to_json", [](const ModelArchive& a) { return archive_to_json(a); })
      .def("save", [](const ModelArchive& a, const std::filesystem::path& p) { save_archive(a, p); });

  m.def("fit", &fit_arrays, py::arg("features"), py::arg("labels"), py::arg("kind") = "slsvm",
        py::arg("T") = py::none(), py::arg("lambda_plus") = 1.0, py::arg("lambda_minus") = 1.0,
        py::arg("C") = 1.0, py::arg("rho") = 0.0, py::arg("lam") = 1.0, py::arg("K") = kDefaultLrtK,
        py::arg("smoothing") = 1.0, py::arg("L") = 2, py::arg("seed") = 0, py::arg("standardize") = true,
        py::arg("restarts") = 5, py::arg("max_iters") = 100, py::arg("init") = "random",
        py::arg("feature_names") = std::vector<std::string>{});
  m.def("load_model", [](const std::filesystem::path& p) { return load_archive(p); }, py::arg("path"));
  m.def("model_from_json", &archive_from_json, py::arg("text"));

  m.def(
      "generate_planted",
      [](int D, int L, int support_size, std::size_t N, double positive_ratio, double separation,
         double noise_sd, std::uint64_t seed, bool poisson) {
        SynthConfig c;
        c.D = D;
        c.L_true = L;
        c.support_size = support_size;
        c.N = N;
        c.positive_ratio = positive_ratio;
        c.separation = separation;
        c.noise_sd = noise_sd;
        c.seed = seed;
        c.noise = poisson ? SynthNoise::kPoisson : SynthNoise::kGaussian;
        const auto p = generate_planted(c);
        return py::make_tuple(p.data.features, p.data.labels, p.assignment);
      },
      py::arg("D") = 10, py::arg("L") = 2, py::arg("support_size") = 2, py::arg("N") = 1000,
      py::arg("positive_ratio") = 0.1697, py::arg("separation") = 6.0, py::arg("noise_sd") = 1.0,
      py::arg("seed") = 0, py::arg("poisson") = false,
      "Returns (features, labels, cluster of each positive); positives come first.");

  m.def(
      "train_constrained",
      [](const Matrix& pos, const Matrix& neg, double lambda_plus, double lambda_minus, double T) {
        return solution_dict(train_constrained(pos, neg, {lambda_plus, lambda_minus, T}));
      },
      py::arg("positives"), py::arg("negatives"), py::arg("lambda_plus") = 1.0,
      py::arg("lambda_minus") = 1.0, py::arg("T") = std::numeric_limits<double>::infinity());

  m.def(
      "solve_exact",
      [](const Matrix& pos, const Matrix& neg, int L, double lambda_plus, double lambda_minus, double T) {
        JccInstance inst;
        inst.positives = pos;
        inst.negatives = neg;
        inst.L = L;
        inst.params = {lambda_plus, lambda_minus, T};
        const auto sol = solve_exact(inst);
        const auto mip = verify_mip_equivalence(inst, sol);
        py::list models;
        for (const auto& lm : sol.models) models.append(py::make_tuple(lm.beta, lm.beta0));
        py::dict d;
        d["assignment"] = sol.assignment;
        d["objective"] = sol.objective;
        d["models"] = models;
        d["assignments_evaluated"] = sol.assignments_evaluated;
        d["mip_objective"] = mip.mip_objective;
        d["mip_agrees"] = mip.objectives_agree && mip.unassigned_slacks_zero;
        return d;
      },
      py::arg("positives"), py::arg("negatives"), py::arg("L"), py::arg("lambda_plus") = 1.0,
      py::arg("lambda_minus") = 1.0, py::arg("T") = std::numeric_limits<double>::infinity());

  m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) { return auc(s, y); },
        py::arg("scores"), py::arg("labels"));
  m.def(
      "roc_curve",
      [](const std::vector<double>& s, const std::vector<int>& y) {
        const auto roc = roc_curve(s, y);
        std::vector<double> far, dr, th;
        for (const auto& p : roc.points) {
          far.push_back(p.false_alarm_rate);
          dr.push_back(p.detection_rate);
          th.push_back(p.threshold);
        }
        return py::make_tuple(far, dr, th, roc.auc);
      },
      py::arg("scores"), py::arg("labels"), "Returns (false_alarm_rate, detection_rate, threshold, auc).");

  m.def(
      "proportion_ztest",
      [](std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
        const auto t = proportion_ztest(k1, n1, k2, n2);
        py::dict d;
        d["p1"] = t.p1;
        d["p2"] = t.p2;
        d["pooled"] = t.pooled;
        d["sigma"] = t.sigma;
        d["z"] = t.z;
        d["p_value"] = t.p_value;
        return d;
      },
      py::arg("k1"), py::arg("n1"), py::arg("k2"), py::arg("n2"));

  m.def("sample_size_rhs", &sample_size_rhs, py::arg("N"), py::arg("Q"), py::arg("D"), py::arg("epsilon"),
        py::arg("delta"));
  m.def("min_sample_size", &min_sample_size, py::arg("Q"), py::arg("D"), py::arg("epsilon"), py::arg("delta"));
  m.def("vc_bound", &vc_bound, py::arg("L"), py::arg("D"));
  m.def("generalization_gap", &generalization_gap, py::arg("N"), py::arg("V"), py::arg("rho"));
}
