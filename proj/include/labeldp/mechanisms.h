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

// Label perturbation mechanisms. Soft randomized response adds iid noise to
// the one-hot encoding of a label; classic randomized response replaces the
// label with a uniformly random other class.

#ifndef LABELDP_MECHANISMS_H_
#define LABELDP_MECHANISMS_H_

#include "labeldp/core.h"
#include "labeldp/random.h"

namespace labeldp {

// Laplace scale b (density proportional to exp(-|x| / b)); the standard
// deviation is sqrt(2) * b. Zero selects the noiseless mode.
struct LaplaceParams {
  double scale = 0.0;
};

// Per-coordinate standard deviation. Zero selects the noiseless mode.
struct GaussianParams {
  double stddev = 0.0;
};

// one_hot(label) + iid Laplace(scale) per coordinate.
NoisyObservation LaplacePerturb(int label, int num_classes,
                                const LaplaceParams& params,
                                RandomStream& stream);

// one_hot(label) + iid N(0, stddev^2) per coordinate.
NoisyObservation GaussianPerturb(int label, int num_classes,
                                 const GaussianParams& params,
                                 RandomStream& stream);

// Probability that randomized response returns the true label,
// e^eps / (e^eps + C - 1). Infinite epsilon gives 1.
double RandomizedResponseKeepProbability(int num_classes, double epsilon);

// Keeps `label` with RandomizedResponseKeepProbability, otherwise returns one
// of the other C - 1 classes uniformly. epsilon may be +infinity.
int RandomizedResponse(int label, int num_classes, double epsilon,
                       RandomStream& stream);

}  // namespace labeldp

#endif  // LABELDP_MECHANISMS_H_
