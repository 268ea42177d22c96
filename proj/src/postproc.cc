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

#include "labeldp/postproc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "labeldp/status.h"

namespace labeldp {
namespace {

void CheckShapes(const NoisyObservation& o, const LabelDistribution& prior) {
  if (o.num_classes() != prior.num_classes()) {
    throw InputError("posterior: observation has " +
                     std::to_string(o.num_classes()) + " classes, prior has " +
                     std::to_string(prior.num_classes()));
  }
}

std::vector<double> LogPrior(const LabelDistribution& prior) {
  const LabelDistribution clamped = ClampPrior(prior);
  std::vector<double> logs(clamped.num_classes());
  for (int c = 0; c < clamped.num_classes(); ++c) {
    logs[c] = std::log(clamped[c]);
  }
  return logs;
}

}  // namespace

std::string PosteriorKindName(PosteriorKind kind) {
  switch (kind) {
    case PosteriorKind::kLaplaceBayes:
      return "laplace";
    case PosteriorKind::kGaussianBayes:
      return "gaussian";
    case PosteriorKind::kMinProjection:
      return "min-projection";
    case PosteriorKind::kIdentity:
      return "identity";
  }
  return "unknown";
}

PosteriorKind ParsePosteriorKind(const std::string& name) {
  for (PosteriorKind kind :
       {PosteriorKind::kLaplaceBayes, PosteriorKind::kGaussianBayes,
        PosteriorKind::kMinProjection, PosteriorKind::kIdentity}) {
    if (PosteriorKindName(kind) == name) return kind;
  }
  throw ConfigError("unknown posterior kind '" + name + "'");
}

LabelDistribution ClampPrior(const LabelDistribution& prior) {
  std::vector<double> p = prior.probs();
  double total = 0.0;
  for (double& v : p) {
    v = std::clamp(v, kPriorFloor, 1.0);
    total += v;
  }
  for (double& v : p) v /= total;
  return LabelDistribution::FromProbabilities(std::move(p));
}

LabelDistribution LaplacePosterior(const NoisyObservation& o, double scale,
                                   const LabelDistribution& prior) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InputError("LaplacePosterior: scale must be positive and finite");
  }
  CheckShapes(o, prior);
  const int num_classes = o.num_classes();
  std::vector<double> logits = LogPrior(prior);
  // f(o, c) = -sum_k |o_k - [c == k]| differs from -sum_k |o_k| only in
  // coordinate c.
  double base = 0.0;
  for (int k = 0; k < num_classes; ++k) base -= std::fabs(o[k]);
  for (int c = 0; c < num_classes; ++c) {
    const double f = base + std::fabs(o[c]) - std::fabs(o[c] - 1.0);
    logits[c] += f / scale;
  }
  return SoftMax(logits);
}

LabelDistribution GaussianPosterior(const NoisyObservation& o, double stddev,
                                    const LabelDistribution& prior) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw InputError("GaussianPosterior: stddev must be positive and finite");
  }
  CheckShapes(o, prior);
  std::vector<double> logits = LogPrior(prior);
  const double variance = stddev * stddev;
  for (int c = 0; c < o.num_classes(); ++c) logits[c] += o[c] / variance;
  return SoftMax(logits);
}

double NoiseLogLikelihood(const NoisyObservation& o, int label,
                          const NoiseModel& noise) {
  if (!(noise.param > 0.0) || !std::isfinite(noise.param)) {
    throw InputError("NoiseLogLikelihood: noise parameter must be positive");
  }
  const std::vector<double> center = OneHot(label, o.num_classes());
  double total = 0.0;
  for (int k = 0; k < o.num_classes(); ++k) {
    const double x = o[k] - center[k];
    if (noise.family == NoiseFamily::kLaplace) {
      // log( exp(-|x| / b) / (2 b) )
      total += -std::fabs(x) / noise.param - std::log(2.0 * noise.param);
    } else {
      // log( exp(-x^2 / (2 s^2)) / (s sqrt(2 pi)) )
      const double s = noise.param;
      total += -x * x / (2.0 * s * s) - std::log(s) -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
  }
  return total;
}

LabelDistribution DirectBayesPosterior(const NoisyObservation& o,
                                       const NoiseModel& noise,
                                       const LabelDistribution& prior) {
  CheckShapes(o, prior);
  const LabelDistribution clamped = ClampPrior(prior);
  const int num_classes = o.num_classes();
  std::vector<double> log_joint(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    log_joint[k] = NoiseLogLikelihood(o, k, noise) + std::log(clamped[k]);
  }
  const double max_log = *std::max_element(log_joint.begin(), log_joint.end());
  if (!std::isfinite(max_log)) {
    throw InternalError("DirectBayesPosterior: no posterior mass");
  }
  double evidence = 0.0;
  for (double lj : log_joint) evidence += std::exp(lj - max_log);
  const double log_evidence = max_log + std::log(evidence);
  std::vector<double> posterior(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    posterior[k] = std::exp(log_joint[k] - log_evidence);
  }
  // Renormalize away rounding so the result passes simplex validation.
  const double total = std::accumulate(posterior.begin(), posterior.end(), 0.0);
  for (double& p : posterior) p /= total;
  return LabelDistribution::FromProbabilities(std::move(posterior));
}

LabelDistribution MinProjection(std::span<const double> o) {
  const size_t n = o.size();
  if (n == 0) throw InputError("MinProjection: empty input");
  for (double v : o) {
    if (!std::isfinite(v)) throw InputError("MinProjection: non-finite input");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return o[a] > o[b]; });

  // Largest k with s_k > (sum_{i<=k} s_i - 1) / k. k = 1 always qualifies.
  double prefix = 0.0;
  double threshold = o[order[0]] - 1.0;
  for (size_t k = 1; k <= n; ++k) {
    prefix += o[order[k - 1]];
    const double candidate = (prefix - 1.0) / static_cast<double>(k);
    if (o[order[k - 1]] > candidate) threshold = candidate;
  }

  std::vector<double> projected(n);
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    projected[i] = std::max(o[i] - threshold, 0.0);
    total += projected[i];
  }
  // Exact arithmetic gives total == 1; absorb rounding drift.
  for (double& p : projected) p = std::min(p / total, 1.0);
  return LabelDistribution::FromProbabilities(std::move(projected));
}

LabelDistribution MinProjection(const NoisyObservation& o) {
  return MinProjection(std::span<const double>(o.values()));
}

LabelDistribution PostProcess(PosteriorKind kind, double noise_param,
                              const NoisyObservation& o,
                              const LabelDistribution& prior) {
  switch (kind) {
    case PosteriorKind::kLaplaceBayes:
      return LaplacePosterior(o, noise_param, prior);
    case PosteriorKind::kGaussianBayes:
      return GaussianPosterior(o, noise_param, prior);
    case PosteriorKind::kMinProjection:
      return MinProjection(o);
    case PosteriorKind::kIdentity:
      return LabelDistribution::FromProbabilities(o.values());
  }
  throw InternalError("PostProcess: unhandled kind");
}

}  // namespace labeldp
