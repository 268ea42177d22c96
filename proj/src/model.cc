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

#include "labeldp/model.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <optional>

#include "labeldp/io.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

constexpr uint64_t kInitStream = 0x696e6974;     // "init"
constexpr uint64_t kShuffleStream = 0x73687566;  // "shuf"

void CheckSpec(const ModelSpec& spec) {
  if (spec.input_dim < 1) throw InputError("model: input_dim must be >= 1");
  if (spec.num_classes < 2) throw InputError("model: need >= 2 classes");
  if (spec.architecture == Architecture::kMlp && spec.hidden < 1) {
    throw InputError("model: mlp needs hidden >= 1");
  }
}

uint64_t ToLittleEndian(uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xff) << (56 - 8 * i);
    return out;
  }
}

}  // namespace

std::string ArchitectureName(Architecture arch) {
  return arch == Architecture::kLinear ? "linear" : "mlp";
}

Architecture ParseArchitecture(const std::string& name) {
  if (name == "linear") return Architecture::kLinear;
  if (name == "mlp") return Architecture::kMlp;
  throw ConfigError("unknown architecture '" + name + "'");
}

void ValidateTrainConfig(const TrainConfig& config) {
  if (config.epochs < 1) throw InputError("train config: epochs must be >= 1");
  if (config.batch_size < 1) {
    throw InputError("train config: batch_size must be >= 1");
  }
  if (!(config.learning_rate > 0.0)) {
    throw InputError("train config: learning_rate must be positive");
  }
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw InputError("train config: momentum must lie in [0, 1)");
  }
  if (!(config.weight_decay >= 0.0)) {
    throw InputError("train config: weight_decay must be >= 0");
  }
}

nlohmann::json ToJson(const TrainConfig& config) {
  return {{"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"learning_rate", config.learning_rate},
          {"momentum", config.momentum},
          {"weight_decay", config.weight_decay},
          {"seed", config.seed}};
}

nlohmann::json ToJson(const ModelSpec& spec) {
  return {{"architecture", ArchitectureName(spec.architecture)},
          {"d", spec.input_dim},
          {"C", spec.num_classes},
          {"hidden", spec.hidden}};
}

size_t Model::NumParameters(const ModelSpec& spec) {
  const size_t d = spec.input_dim;
  const size_t c = spec.num_classes;
  if (spec.architecture == Architecture::kLinear) return c * d + c;
  const size_t h = spec.hidden;
  return h * d + h + c * h + c;
}

Model Model::Zeros(const ModelSpec& spec) {
  CheckSpec(spec);
  return Model(spec, std::vector<double>(NumParameters(spec), 0.0));
}

Model Model::Initialize(const ModelSpec& spec, RandomStream& stream) {
  Model model = Zeros(spec);
  auto fill = [&](size_t begin, size_t count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = begin; i < begin + count; ++i) {
      model.parameters_[i] = (2.0 * stream.Uniform() - 1.0) * bound;
    }
  };
  const size_t d = spec.input_dim;
  const size_t c = spec.num_classes;
  if (spec.architecture == Architecture::kLinear) {
    fill(0, c * d + c, spec.input_dim);
  } else {
    const size_t h = spec.hidden;
    fill(0, h * d + h, spec.input_dim);
    fill(h * d + h, c * h + c, spec.hidden);
  }
  return model;
}

Model Model::FromParameters(const ModelSpec& spec,
                            std::vector<double> parameters) {
  CheckSpec(spec);
  if (parameters.size() != NumParameters(spec)) {
    throw InputError("model: expected " + std::to_string(NumParameters(spec)) +
                     " parameters, got " + std::to_string(parameters.size()));
  }
  for (double p : parameters) {
    if (!std::isfinite(p)) throw InputError("model: non-finite parameter");
  }
  return Model(spec, std::move(parameters));
}

void Model::CheckInput(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != spec_.input_dim) {
    throw InputError("model: input has " + std::to_string(x.size()) +
                     " features, expected " + std::to_string(spec_.input_dim));
  }
}

std::vector<double> Model::Hidden(std::span<const double> x) const {
  if (spec_.architecture == Architecture::kLinear) return {};
  const size_t d = spec_.input_dim;
  const size_t h = spec_.hidden;
  const double* w1 = parameters_.data();
  const double* b1 = w1 + h * d;
  std::vector<double> hidden(h);
  for (size_t j = 0; j < h; ++j) {
    double z = b1[j];
    for (size_t k = 0; k < d; ++k) z += w1[j * d + k] * x[k];
    hidden[j] = z > 0.0 ? z : 0.0;
  }
  return hidden;
}

std::vector<double> Model::Logits(std::span<const double> x) const {
  CheckInput(x);
  const size_t c = spec_.num_classes;
  std::vector<double> logits(c);
  if (spec_.architecture == Architecture::kLinear) {
    const size_t d = spec_.input_dim;
    const double* w = parameters_.data();
    const double* b = w + c * d;
    for (size_t i = 0; i < c; ++i) {
      double z = b[i];
      for (size_t k = 0; k < d; ++k) z += w[i * d + k] * x[k];
      logits[i] = z;
    }
    return logits;
  }
  const size_t d = spec_.input_dim;
  const size_t h = spec_.hidden;
  const std::vector<double> hidden = Hidden(x);
  const double* w2 = parameters_.data() + h * d + h;
  const double* b2 = w2 + c * h;
  for (size_t i = 0; i < c; ++i) {
    double z = b2[i];
    for (size_t j = 0; j < h; ++j) z += w2[i * h + j] * hidden[j];
    logits[i] = z;
  }
  return logits;
}

LabelDistribution Model::Predict(std::span<const double> x) const {
  return SoftMax(Logits(x));
}

int Model::PredictLabel(std::span<const double> x) const {
  return Predict(x).Argmax();
}

double Model::Loss(std::span<const BatchItem> batch,
                   std::vector<double>* gradient) const {
  if (batch.empty()) throw InputError("Loss: empty batch");
  if (gradient != nullptr) gradient->assign(parameters_.size(), 0.0);
  const size_t c = spec_.num_classes;
  const size_t d = spec_.input_dim;
  const size_t h = spec_.hidden;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const BatchItem& item : batch) {
    if (item.target.num_classes() != spec_.num_classes) {
      throw InputError("Loss: target has wrong number of classes");
    }
    const std::vector<double> logits = Logits(item.features);
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum_exp = 0.0;
    for (double z : logits) sum_exp += std::exp(z - max_logit);
    const double log_norm = max_logit + std::log(sum_exp);
    for (size_t i = 0; i < c; ++i) {
      if (item.target[i] > 0.0) total -= item.target[i] * (logits[i] - log_norm);
    }
    if (gradient == nullptr) continue;

    // d(loss)/d(logits) = pred - target, with pred computed exactly as
    // Predict() does so that target == Predict(x) yields a zero gradient.
    const LabelDistribution pred = SoftMax(logits);
    std::vector<double> dlogits(c);
    for (size_t i = 0; i < c; ++i) {
      dlogits[i] = (pred[i] - item.target[i]) * scale;
    }
    std::vector<double>& g = *gradient;
    const auto& x = item.features;
    if (spec_.architecture == Architecture::kLinear) {
      for (size_t i = 0; i < c; ++i) {
        for (size_t k = 0; k < d; ++k) g[i * d + k] += dlogits[i] * x[k];
        g[c * d + i] += dlogits[i];
      }
      continue;
    }
    const std::vector<double> hidden = Hidden(x);
    const size_t w2_off = h * d + h;
    const size_t b2_off = w2_off + c * h;
    const double* w2 = parameters_.data() + w2_off;
    std::vector<double> dhidden(h, 0.0);
    for (size_t i = 0; i < c; ++i) {
      for (size_t j = 0; j < h; ++j) {
        g[w2_off + i * h + j] += dlogits[i] * hidden[j];
        dhidden[j] += dlogits[i] * w2[i * h + j];
      }
      g[b2_off + i] += dlogits[i];
    }
    for (size_t j = 0; j < h; ++j) {
      if (hidden[j] <= 0.0) continue;
      for (size_t k = 0; k < d; ++k) g[j * d + k] += dhidden[j] * x[k];
      g[h * d + j] += dhidden[j];
    }
  }
  return total * scale;
}

double SgdStep(Model& model, SgdState& state, std::span<const BatchItem> batch,
               const TrainConfig& config) {
  std::vector<double> gradient;
  const double loss = model.Loss(batch, &gradient);
  if (!std::isfinite(loss)) {
    throw TrainingError("SGD step produced a non-finite loss (learning rate " +
                        FormatDouble(config.learning_rate) + ")");
  }
  std::vector<double>& w = model.mutable_parameters();
  if (state.velocity.size() != w.size()) state.velocity.assign(w.size(), 0.0);
  for (size_t i = 0; i < w.size(); ++i) {
    const double g = gradient[i] + config.weight_decay * w[i];
    state.velocity[i] = config.momentum * state.velocity[i] + g;
    w[i] -= config.learning_rate * state.velocity[i];
    if (!std::isfinite(w[i])) {
      throw TrainingError("SGD step produced non-finite weights");
    }
  }
  return loss;
}

Model Fit(Model model, const std::vector<std::vector<double>>& features,
          const TargetFn& targets, const TrainConfig& config,
          const EpochFn& on_epoch) {
  ValidateTrainConfig(config);
  if (features.empty()) throw InputError("Fit: no training examples");
  RandomStream shuffle(config.seed, kShuffleStream);
  std::vector<size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  SgdState state;
  std::vector<BatchItem> batch;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle.Shuffle(std::span<size_t>(order));
    double loss_sum = 0.0;
    size_t steps = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      batch.clear();
      for (size_t k = start; k < end; ++k) {
        const size_t i = order[k];
        batch.push_back({features[i], targets(i, model)});
      }
      loss_sum += SgdStep(model, state, batch, config);
      ++steps;
    }
    if (on_epoch) on_epoch(epoch, model, loss_sum / static_cast<double>(steps));
  }
  return model;
}

Model TrainSupervised(const std::vector<std::vector<double>>& features,
                      const std::vector<LabelDistribution>& targets,
                      const ModelSpec& spec, const TrainConfig& config,
                      const Dataset* validation) {
  if (features.size() != targets.size()) {
    throw InputError("TrainSupervised: features and targets differ in size");
  }
  ValidateTrainConfig(config);
  RandomStream init(config.seed, kInitStream);
  Model model = Model::Initialize(spec, init);
  std::optional<Model> best;
  double best_accuracy = -1.0;
  EpochFn track;
  if (validation != nullptr) {
    track = [&](int, const Model& current, double) {
      const double accuracy = Evaluate(current, *validation);
      if (accuracy > best_accuracy) {
        best_accuracy = accuracy;
        best = current;
      }
    };
  }
  Model final_model = Fit(
      std::move(model), features,
      [&](size_t i, const Model&) { return targets[i]; }, config, track);
  return best ? *best : final_model;
}

Model TrainSupervised(const Dataset& dataset, const ModelSpec& spec,
                      const TrainConfig& config, const Dataset* validation) {
  std::vector<LabelDistribution> targets;
  targets.reserve(dataset.size());
  for (const Example& e : dataset.examples()) {
    targets.push_back(LabelDistribution::PointMass(e.label,
                                                   dataset.num_classes()));
  }
  return TrainSupervised(dataset.Unlabeled().rows, targets, spec, config,
                         validation);
}

double Evaluate(const Model& model, const Dataset& dataset) {
  if (dataset.empty()) throw InputError("Evaluate: empty dataset");
  size_t correct = 0;
  for (const Example& e : dataset.examples()) {
    if (model.PredictLabel(e.features) == e.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

void SaveCheckpoint(const Model& model, const std::string& header_path,
                    const std::string& weights_path) {
  namespace fs = std::filesystem;
  std::string bytes(model.parameters().size() * sizeof(double), '\0');
  for (size_t i = 0; i < model.parameters().size(); ++i) {
    const uint64_t le =
        ToLittleEndian(std::bit_cast<uint64_t>(model.parameters()[i]));
    std::memcpy(bytes.data() + i * sizeof(double), &le, sizeof(le));
  }
  WriteFileAtomic(weights_path, bytes);
  nlohmann::json header = ToJson(model.spec());
  const fs::path header_dir = fs::path(header_path).parent_path();
  header["weights"] =
      fs::path(weights_path).lexically_proximate(
                                 header_dir.empty() ? fs::path(".") : header_dir)
          .generic_string();
  header["num_parameters"] = model.parameters().size();
  WriteFileAtomic(header_path, header.dump(2) + "\n");
}

Model LoadCheckpoint(const std::string& header_path) {
  namespace fs = std::filesystem;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(ReadFile(header_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(header_path + ": " + e.what(), 0);
  }
  ModelSpec spec;
  std::string weights;
  try {
    spec.architecture =
        ParseArchitecture(header.at("architecture").get<std::string>());
    spec.input_dim = header.at("d").get<int>();
    spec.num_classes = header.at("C").get<int>();
    spec.hidden = header.at("hidden").get<int>();
    weights = header.at("weights").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(header_path + ": " + e.what(), 0);
  }
  const fs::path weights_path = fs::path(header_path).parent_path() / weights;
  const std::string bytes = ReadFile(weights_path.string());
  if (bytes.size() != Model::NumParameters(spec) * sizeof(double)) {
    throw ParseError(weights_path.string() + ": unexpected size", 0);
  }
  std::vector<double> params(Model::NumParameters(spec));
  for (size_t i = 0; i < params.size(); ++i) {
    uint64_t le = 0;
    std::memcpy(&le, bytes.data() + i * sizeof(double), sizeof(le));
    params[i] = std::bit_cast<double>(ToLittleEndian(le));
  }
  return Model::FromParameters(spec, std::move(params));
}

}  // namespace labeldp
