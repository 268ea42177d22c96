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

// Small softmax classifiers trained with momentum SGD on soft-label
// cross-entropy. Hard labels are trained as one-hot soft labels; there is a
// single training path.

#ifndef LABELDP_MODEL_H_
#define LABELDP_MODEL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "labeldp/core.h"
#include "labeldp/random.h"

namespace labeldp {

enum class Architecture { kLinear, kMlp };

std::string ArchitectureName(Architecture arch);
Architecture ParseArchitecture(const std::string& name);

struct ModelSpec {
  Architecture architecture = Architecture::kLinear;
  int input_dim = 1;
  int num_classes = 2;
  // Width of the rectified hidden layer; only used by kMlp.
  int hidden = 0;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;
  uint64_t seed = 0;
};

void ValidateTrainConfig(const TrainConfig& config);
nlohmann::json ToJson(const TrainConfig& config);
nlohmann::json ToJson(const ModelSpec& spec);

struct BatchItem {
  std::span<const double> features;
  LabelDistribution target;
};

// Parameters are stored flat. Linear: W[C][d] then b[C]. Mlp: W1[H][d],
// b1[H], W2[C][H], b2[C].
class Model {
 public:
  static Model Zeros(const ModelSpec& spec);
  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
  static Model Initialize(const ModelSpec& spec, RandomStream& stream);
  static Model FromParameters(const ModelSpec& spec,
                              std::vector<double> parameters);

  const ModelSpec& spec() const { return spec_; }
  const std::vector<double>& parameters() const { return parameters_; }
  std::vector<double>& mutable_parameters() { return parameters_; }
  static size_t NumParameters(const ModelSpec& spec);

  std::vector<double> Logits(std::span<const double> x) const;
  // Throws InputError on a dimension mismatch.
  LabelDistribution Predict(std::span<const double> x) const;
  // Argmax of the prediction, ties to the lowest class.
  int PredictLabel(std::span<const double> x) const;

  // Mean soft-label cross-entropy over `batch`. When `gradient` is non-null
  // it receives d(loss)/d(parameters); weight decay is not included.
  double Loss(std::span<const BatchItem> batch,
              std::vector<double>* gradient) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Model(ModelSpec spec, std::vector<double> parameters)
      : spec_(spec), parameters_(std::move(parameters)) {}
  void CheckInput(std::span<const double> x) const;
  // Hidden activations for kMlp; empty for kLinear.
  std::vector<double> Hidden(std::span<const double> x) const;

  ModelSpec spec_;
  std::vector<double> parameters_;
};

// Momentum buffer for SGD.
struct SgdState {
  std::vector<double> velocity;
};

// One step of momentum SGD on the mean cross-entropy plus
// (weight_decay / 2) * ||w||^2. Returns the pre-step cross-entropy. Throws
// TrainingError if the loss or the updated weights are not finite.
double SgdStep(Model& model, SgdState& state, std::span<const BatchItem> batch,
               const TrainConfig& config);

// Soft target for example `index` given the current model. Called once per
// visit, immediately before the example's batch is stepped.
using TargetFn = std::function<LabelDistribution(size_t index,
                                                 const Model& model)>;
// Invoked after every epoch with the 1-based epoch number.
using EpochFn =
    std::function<void(int epoch, const Model& model, double mean_loss)>;

// Runs `config.epochs` passes over `features`, reshuffling each epoch from a
// stream derived from config.seed. Targets for a batch are computed with the
// model as it stands before that batch's step.
Model Fit(Model model, const std::vector<std::vector<double>>& features,
          const TargetFn& targets, const TrainConfig& config,
          const EpochFn& on_epoch = nullptr);

// Initializes a model from config.seed and fits it to fixed soft targets.
// With a validation set the weights of the epoch with the best validation
// accuracy are returned (earliest on ties), otherwise the final weights.
Model TrainSupervised(const std::vector<std::vector<double>>& features,
                      const std::vector<LabelDistribution>& targets,
                      const ModelSpec& spec, const TrainConfig& config,
                      const Dataset* validation = nullptr);
// One-hot targets from the dataset labels.
Model TrainSupervised(const Dataset& dataset, const ModelSpec& spec,
                      const TrainConfig& config,
                      const Dataset* validation = nullptr);

// Fraction of examples whose argmax prediction equals the label.
double Evaluate(const Model& model, const Dataset& dataset);

// Writes the JSON header {architecture, d, C, hidden, weights} to
// `header_path` and the parameters as little-endian float64 to
// `weights_path`. The header stores the weights path relative to its own
// directory.
void SaveCheckpoint(const Model& model, const std::string& header_path,
                    const std::string& weights_path);
Model LoadCheckpoint(const std::string& header_path);

}  // namespace labeldp

#endif  // LABELDP_MODEL_H_
