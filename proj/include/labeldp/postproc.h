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

// Post-processing of soft randomized response outputs: Bayesian posteriors
// under Laplace or Gaussian noise and Euclidean projection onto the simplex.
//
// All posterior arithmetic happens in log space. Priors are clamped to
// [kPriorFloor, 1] and renormalized before their logarithm is taken, so a
// model that assigns zero probability to a class cannot zero out the
// posterior.

#ifndef LABELDP_POSTPROC_H_
#define LABELDP_POSTPROC_H_

#include <string>
#include <vector>

#include "labeldp/core.h"

namespace labeldp {

inline constexpr double kPriorFloor = 1e-6;

enum class PosteriorKind { kLaplaceBayes, kGaussianBayes, kMinProjection, kIdentity };

std::string PosteriorKindName(PosteriorKind kind);
// Accepts "laplace", "gaussian", "min-projection", "identity".
PosteriorKind ParsePosteriorKind(const std::string& name);

enum class NoiseFamily { kLaplace, kGaussian };

// A noise distribution together with its parameter (Laplace scale or
// Gaussian standard deviation).
struct NoiseModel {
  NoiseFamily family = NoiseFamily::kLaplace;
  double param = 1.0;
};

// Clamps every entry to [kPriorFloor, 1] and renormalizes.
LabelDistribution ClampPrior(const LabelDistribution& prior);

// p(y = c | o) = SoftMax_c(f(o, c) / scale + log prior_c) with
// f(o, c) = -sum_k |o_k - [c == k]|. Throws InputError unless scale > 0.
LabelDistribution LaplacePosterior(const NoisyObservation& o, double scale,
                                   const LabelDistribution& prior);

// p(y = c | o) = SoftMax_c(o_c / stddev^2 + log prior_c). Throws InputError
// unless stddev > 0.
LabelDistribution GaussianPosterior(const NoisyObservation& o, double stddev,
                                    const LabelDistribution& prior);

// log p(o | y = label): the sum of per-coordinate log densities of the noise
// around one_hot(label), normalizing constants included.
double NoiseLogLikelihood(const NoisyObservation& o, int label,
                          const NoiseModel& noise);

// Bayes' rule evaluated directly: prior times the explicit product of noise
// densities, normalized. Serves as the reference the closed-form posteriors
// are checked against.
LabelDistribution DirectBayesPosterior(const NoisyObservation& o,
                                       const NoiseModel& noise,
                                       const LabelDistribution& prior);

// Euclidean projection of `o` onto the probability simplex using the
// sort-and-threshold method. Ties in the sort keep original index order.
LabelDistribution MinProjection(std::span<const double> o);
LabelDistribution MinProjection(const NoisyObservation& o);

// Dispatches on `kind`. `noise_param` is the Laplace scale or Gaussian
// standard deviation for the Bayesian kinds and ignored otherwise. kIdentity
// requires `o` to already be a valid distribution (noiseless mode).
LabelDistribution PostProcess(PosteriorKind kind, double noise_param,
                              const NoisyObservation& o,
                              const LabelDistribution& prior);

}  // namespace labeldp

#endif  // LABELDP_POSTPROC_H_
