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

// Additive Laplace with iterative Bayesian inference.
//
// Every label is perturbed exactly once (one-hot plus iid noise). Training
// then repeatedly turns each noisy observation into a soft target by
// combining it with the current model's prediction as a prior, and takes an
// SGD step toward that posterior. Only the noisy observations and the public
// features are read after the noising pass, so the privacy cost is that of a
// single application of the noise mechanism.
//
// The Gaussian-noise variant (AGIBI) swaps Laplace noise and posterior for
// their Gaussian counterparts and is (epsilon, delta)-DP instead of pure DP.

#ifndef LABELDP_ALIBI_H_
#define LABELDP_ALIBI_H_

#include <vector>

#include "json.hpp"
#include "labeldp/accounting.h"
#include "labeldp/core.h"
#include "labeldp/model.h"
#include "labeldp/postproc.h"
#include "labeldp/random.h"

namespace labeldp {

struct AlibiConfig {
  NoiseFamily noise = NoiseFamily::kLaplace;
  // Laplace scale or Gaussian standard deviation. Zero is the noiseless mode:
  // observations are exact one-hots and are used as targets directly.
  double noise_param = 1.0;
  PosteriorKind posterior = PosteriorKind::kLaplaceBayes;
  ModelSpec model;
  TrainConfig train;
  // Only used to report the Gaussian variant's budget.
  double delta = 1e-5;
};

// Throws ConfigError when the posterior kind does not match the noise family
// (Laplace posterior needs Laplace noise, Gaussian posterior needs Gaussian
// noise) or kIdentity is paired with nonzero noise.
void ValidateAlibiConfig(const AlibiConfig& config);
nlohmann::json ToJson(const AlibiConfig& config);

// Features together with their one-shot noisy label observations. Holds no
// true labels.
struct NoisedDataset {
  std::vector<std::vector<double>> features;
  std::vector<NoisyObservation> observations;
  int num_classes = 2;

  friend bool operator==(const NoisedDataset&, const NoisedDataset&) = default;
};

NoisedDataset NoiseDataset(const Dataset& dataset, const AlibiConfig& config,
                           RandomStream& stream);

// Budget of one noising pass: (2 / scale, 0) for Laplace, the exact Gaussian
// bound at config.delta otherwise.
PrivacyBudget AlibiBudget(const AlibiConfig& config);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  // Accuracy against the clean labels of the training set; reported for
  // diagnostics only, never fed back into training.
  double train_accuracy = 0.0;
  // Negative when no test set was supplied.
  double test_accuracy = -1.0;
};

struct AlibiResult {
  Model model;
  PrivacyBudget budget;
  std::vector<EpochMetrics> history;
};

// Trains on an already noised dataset. `on_target` (optional) observes every
// soft target fed to SGD.
Model TrainOnNoised(const NoisedDataset& noised, const AlibiConfig& config,
                    const EpochFn& on_epoch = nullptr,
                    const std::function<void(const LabelDistribution&)>&
                        on_target = nullptr);

// Full pipeline: noise once with `stream`, then train. `test` (optional)
// only feeds the reported accuracy history.
AlibiResult AlibiTrain(const Dataset& dataset, const AlibiConfig& config,
                       RandomStream& stream, const Dataset* test = nullptr);

}  // namespace labeldp

#endif  // LABELDP_ALIBI_H_
