// Copyright 2026 The LabelDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.h"
#include "labeldp/accounting.h"
#include "labeldp/audit.h"
#include "labeldp/core.h"
#include "labeldp/mechanisms.h"
#include "labeldp/postproc.h"
#include "labeldp/random.h"
#include "labeldp/status.h"

namespace py = pybind11;

namespace labeldp {
namespace {

std::pair<double, double> Pair(const PrivacyBudget& b) {
  return {b.epsilon, b.delta};
}

LabelDistribution Prior(const std::vector<double>& prior, int num_classes) {
  if (prior.empty()) return LabelDistribution::Uniform(num_classes);
  return LabelDistribution::FromProbabilities(prior);
}

std::tuple<std::vector<std::vector<double>>, std::vector<int>>
GenerateMixtureRows(int num_classes, int dim, int n, double separation,
                    uint64_t seed) {
  RandomStream stream(seed);
  const Dataset d = GenerateMixture(num_classes, dim, n, separation, stream);
  std::vector<std::vector<double>> features;
  for (const Example& e : d.examples()) features.push_back(e.features);
  return {features, d.Labels()};
}

std::tuple<int, std::string, std::string> RunCli(
    const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::Run(args, out, err);
  }
  return {code, out.str(), err.str()};
}

}  // namespace
}  // namespace labeldp

PYBIND11_MODULE(_labeldp, m) {
  using namespace labeldp;  // NOLINT(build/namespaces)
  m.doc() = "Label differential privacy: mechanisms, accounting, auditing";
  py::register_exception<Error>(m, "LabelDpError", PyExc_ValueError);

  m.def("laplace_epsilon",
        [](double scale) { return Pair(LaplaceLabelDpEpsilon(scale)); },
        py::arg("scale"), "(epsilon, delta) of additive Laplace label noise.");
  m.def("gaussian_epsilon",
        [](double stddev, double delta) {
          return Pair(GaussianLabelDpEpsilon(stddev, delta));
        },
        py::arg("stddev"), py::arg("delta"),
        "(epsilon, delta) of additive Gaussian label noise.");
  m.def("gaussian_sigma_classic", &GaussianSigmaClassic, py::arg("epsilon"),
        py::arg("delta"));
  m.def("pate_budget",
        [](int64_t sampled, int64_t answered, double sigma1, double sigma2,
           double delta) {
          return Pair(PateBudget({sampled, answered, sigma1, sigma2}, delta));
        },
        py::arg("sampled"), py::arg("answered"), py::arg("sigma1"),
        py::arg("sigma2"), py::arg("delta"));

  m.def("laplace_perturb",
        [](int label, int num_classes, double scale, uint64_t seed) {
          RandomStream stream(seed);
          return LaplacePerturb(label, num_classes, {scale}, stream).values();
        },
        py::arg("label"), py::arg("num_classes"), py::arg("scale"),
        py::arg("seed"));
  m.def("gaussian_perturb",
        [](int label, int num_classes, double stddev, uint64_t seed) {
          RandomStream stream(seed);
          return GaussianPerturb(label, num_classes, {stddev}, stream)
              .values();
        },
        py::arg("label"), py::arg("num_classes"), py::arg("stddev"),
        py::arg("seed"));
  m.def("randomized_response",
        [](int label, int num_classes, double epsilon, uint64_t seed) {
          RandomStream stream(seed);
          return RandomizedResponse(label, num_classes, epsilon, stream);
        },
        py::arg("label"), py::arg("num_classes"), py::arg("epsilon"),
        py::arg("seed"));

  m.def("laplace_posterior",
        [](const std::vector<double>& o, double scale,
           const std::vector<double>& prior) {
          const NoisyObservation obs(o);
          return LaplacePosterior(obs, scale, Prior(prior, obs.num_classes()))
              .probs();
        },
        py::arg("observation"), py::arg("scale"),
        py::arg("prior") = std::vector<double>{},
        "Posterior over labels; the prior defaults to uniform.");
  m.def("gaussian_posterior",
        [](const std::vector<double>& o, double stddev,
           const std::vector<double>& prior) {
          const NoisyObservation obs(o);
          return GaussianPosterior(obs, stddev,
                                   Prior(prior, obs.num_classes()))
              .probs();
        },
        py::arg("observation"), py::arg("stddev"),
        py::arg("prior") = std::vector<double>{});
  m.def("min_projection",
        [](const std::vector<double>& v) { return MinProjection(v).probs(); },
        py::arg("values"), "Euclidean projection onto the simplex.");

  m.def("epsilon_from_cgr", &EpsilonFromCgr, py::arg("correct_guess_rate"));
  m.def("clopper_pearson", &ClopperPearson, py::arg("successes"),
        py::arg("trials"), py::arg("level") = 0.95);

  m.def("generate_mixture", &GenerateMixtureRows, py::arg("num_classes"),
        py::arg("dim"), py::arg("n"), py::arg("separation"), py::arg("seed"),
        "(features, labels) of a Gaussian mixture.");
  m.def("run_cli", &RunCli, py::arg("args"),
        "Runs a labeldp command; returns (exit_code, stdout, stderr).");
}
