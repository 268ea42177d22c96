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

#include "labeldp/alibi.h"

#include <cmath>
#include <limits>

#include "labeldp/mechanisms.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

constexpr uint64_t kInitStream = 0x616c6962;  // "alib"

}  // namespace

void ValidateAlibiConfig(const AlibiConfig& config) {
  if (!(config.noise_param >= 0.0) || !std::isfinite(config.noise_param)) {
    throw ConfigError("noise parameter must be finite and >= 0");
  }
  switch (config.posterior) {
    case PosteriorKind::kLaplaceBayes:
      if (config.noise != NoiseFamily::kLaplace) {
        throw ConfigError("Laplace posterior requires Laplace noise");
      }
      break;
    case PosteriorKind::kGaussianBayes:
      if (config.noise != NoiseFamily::kGaussian) {
        throw ConfigError("Gaussian posterior requires Gaussian noise");
      }
      break;
    case PosteriorKind::kIdentity:
      if (config.noise_param != 0.0) {
        throw ConfigError("identity post-processing requires zero noise");
      }
      break;
    case PosteriorKind::kMinProjection:
      break;
  }
  if (config.noise == NoiseFamily::kGaussian &&
      !(config.delta > 0.0 && config.delta < 1.0)) {
    throw ConfigError("Gaussian noise needs delta in (0, 1)");
  }
}

nlohmann::json ToJson(const AlibiConfig& config) {
  return {{"noise",
           config.noise == NoiseFamily::kLaplace ? "laplace" : "gaussian"},
          {"noise_param", config.noise_param},
          {"posterior", PosteriorKindName(config.posterior)},
          {"model", ToJson(config.model)},
          {"train", ToJson(config.train)},
          {"delta", config.delta}};
}

NoisedDataset NoiseDataset(const Dataset& dataset, const AlibiConfig& config,
                           RandomStream& stream) {
  ValidateAlibiConfig(config);
  NoisedDataset noised;
  noised.num_classes = dataset.num_classes();
  noised.features.reserve(dataset.size());
  noised.observations.reserve(dataset.size());
  for (const Example& e : dataset.examples()) {
    noised.features.push_back(e.features);
    if (config.noise == NoiseFamily::kLaplace) {
      noised.observations.push_back(LaplacePerturb(
          e.label, dataset.num_classes(), {config.noise_param}, stream));
    } else {
      noised.observations.push_back(GaussianPerturb(
          e.label, dataset.num_classes(), {config.noise_param}, stream));
    }
  }
  return noised;
}

PrivacyBudget AlibiBudget(const AlibiConfig& config) {
  ValidateAlibiConfig(config);
  if (config.noise == NoiseFamily::kLaplace) {
    return LaplaceLabelDpEpsilon(config.noise_param);
  }
  if (config.noise_param == 0.0) {
    return {std::numeric_limits<double>::infinity(), config.delta};
  }
  return GaussianLabelDpEpsilon(config.noise_param, config.delta);
}

Model TrainOnNoised(
    const NoisedDataset& noised, const AlibiConfig& config,
    const EpochFn& on_epoch,
    const std::function<void(const LabelDistribution&)>& on_target) {
  ValidateAlibiConfig(config);
  if (config.model.num_classes != noised.num_classes) {
    throw ConfigError("model class count does not match the dataset");
  }
  // In the noiseless mode every observation is an exact one-hot, which is
  // also the limit of the Bayesian posterior as the noise vanishes.
  const PosteriorKind kind = config.noise_param == 0.0
                                 ? PosteriorKind::kIdentity
                                 : config.posterior;
  RandomStream init(config.train.seed, kInitStream);
  Model model = Model::Initialize(config.model, init);
  auto target = [&](size_t i, const Model& current) {
    const LabelDistribution prior = current.Predict(noised.features[i]);
    LabelDistribution post =
        PostProcess(kind, config.noise_param, noised.observations[i], prior);
    if (on_target) on_target(post);
    return post;
  };
  return Fit(std::move(model), noised.features, target, config.train,
             on_epoch);
}

AlibiResult AlibiTrain(const Dataset& dataset, const AlibiConfig& config,
                       RandomStream& stream, const Dataset* test) {
  ValidateAlibiConfig(config);
  const NoisedDataset noised = NoiseDataset(dataset, config, stream);
  std::vector<EpochMetrics> history;
  auto record = [&](int epoch, const Model& model, double loss) {
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss;
    m.train_accuracy = Evaluate(model, dataset);
    if (test != nullptr) m.test_accuracy = Evaluate(model, *test);
    history.push_back(m);
  };
  Model model = TrainOnNoised(noised, config, record);
  return {std::move(model), AlibiBudget(config), std::move(history)};
}

}  // namespace labeldp
