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

#include "labeldp/mechanisms.h"

#include <cmath>
#include <limits>

#include "labeldp/status.h"

namespace labeldp {

NoisyObservation LaplacePerturb(int label, int num_classes,
                                const LaplaceParams& params,
                                RandomStream& stream) {
  if (!(params.scale >= 0.0) || !std::isfinite(params.scale)) {
    throw InputError("LaplacePerturb: scale must be finite and >= 0");
  }
  std::vector<double> o = OneHot(label, num_classes);
  for (double& v : o) v += stream.Laplace(params.scale);
  return NoisyObservation(std::move(o));
}

NoisyObservation GaussianPerturb(int label, int num_classes,
                                 const GaussianParams& params,
                                 RandomStream& stream) {
  if (!(params.stddev >= 0.0) || !std::isfinite(params.stddev)) {
    throw InputError("GaussianPerturb: stddev must be finite and >= 0");
  }
  std::vector<double> o = OneHot(label, num_classes);
  for (double& v : o) v += stream.Gaussian(0.0, params.stddev);
  return NoisyObservation(std::move(o));
}

double RandomizedResponseKeepProbability(int num_classes, double epsilon) {
  if (num_classes < 2) throw InputError("RandomizedResponse: need C >= 2");
  if (!(epsilon > 0.0)) {
    throw InputError("RandomizedResponse: epsilon must be positive");
  }
  if (std::isinf(epsilon)) return 1.0;
  // e^eps / (e^eps + C - 1) written to stay finite for large epsilon.
  return 1.0 / (1.0 + (num_classes - 1) * std::exp(-epsilon));
}

int RandomizedResponse(int label, int num_classes, double epsilon,
                       RandomStream& stream) {
  const double keep = RandomizedResponseKeepProbability(num_classes, epsilon);
  if (label < 0 || label >= num_classes) {
    throw InputError("RandomizedResponse: label out of range");
  }
  if (std::isinf(epsilon) || stream.Uniform() < keep) return label;
  const int other = static_cast<int>(stream.UniformIndex(num_classes - 1));
  return other < label ? other : other + 1;
}

}  // namespace labeldp
