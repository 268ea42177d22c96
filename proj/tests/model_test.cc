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

#include <cmath>
#include <filesystem>
#include <vector>

#include "gtest/gtest.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

ModelSpec Linear(int d, int c) { return {Architecture::kLinear, d, c, 0}; }
ModelSpec Mlp(int d, int c, int h) { return {Architecture::kMlp, d, c, h}; }

LabelDistribution RandomTarget(int c, RandomStream& s) {
  std::vector<double> p(c);
  double total = 0.0;
  for (double& v : p) total += (v = s.UniformOpen());
  for (double& v : p) v /= total;
  return LabelDistribution::FromProbabilities(p);
}

// Central finite differences of the mean soft-label cross-entropy.
void CheckGradient(const ModelSpec& spec, uint64_t seed) {
  RandomStream s(seed);
  Model model = Model::Initialize(spec, s);
  std::vector<std::vector<double>> xs(4, std::vector<double>(spec.input_dim));
  for (auto& x : xs) {
    for (double& v : x) v = s.Gaussian(0.0, 1.0);
  }
  std::vector<BatchItem> batch;
  for (const auto& x : xs) {
    batch.push_back({x, RandomTarget(spec.num_classes, s)});
  }
  std::vector<double> gradient;
  model.Loss(batch, &gradient);
  ASSERT_EQ(gradient.size(), model.parameters().size());
  const double h = 1e-5;
  for (size_t i = 0; i < gradient.size(); ++i) {
    Model plus = model;
    Model minus = model;
    plus.mutable_parameters()[i] += h;
    minus.mutable_parameters()[i] -= h;
    const double numeric =
        (plus.Loss(batch, nullptr) - minus.Loss(batch, nullptr)) / (2 * h);
    EXPECT_NEAR(gradient[i], numeric,
                1e-5 * std::max(1.0, std::abs(numeric)))
        << "parameter " << i;
  }
}

TEST(ModelTest, GradientMatchesFiniteDifferencesLinear) {
  CheckGradient(Linear(5, 4), 1);
}

TEST(ModelTest, GradientMatchesFiniteDifferencesMlp) {
  CheckGradient(Mlp(5, 4, 7), 2);
}

TEST(ModelTest, ParameterCounts) {
  EXPECT_EQ(Model::NumParameters(Linear(5, 3)), 5u * 3 + 3);
  EXPECT_EQ(Model::NumParameters(Mlp(5, 3, 4)), 5u * 4 + 4 + 4 * 3 + 3);
  EXPECT_EQ(Model::Zeros(Mlp(5, 3, 4)).parameters().size(),
            Model::NumParameters(Mlp(5, 3, 4)));
}

TEST(ModelTest, LinearLogitsLayout) {
  // W = [[1, 2], [3, 4], [5, 6]], b = [0.5, -0.5, 0].
  const Model m = Model::FromParameters(
      Linear(2, 3), {1, 2, 3, 4, 5, 6, 0.5, -0.5, 0});
  const std::vector<double> x = {1.0, -1.0};
  EXPECT_EQ(m.Logits(x), (std::vector<double>{-0.5, -1.5, -1.0}));
  EXPECT_EQ(m.PredictLabel(x), 0);
  EXPECT_THROW(m.Predict(std::vector<double>{1.0}), InputError);
  EXPECT_THROW(Model::FromParameters(Linear(2, 3), {1.0}), InputError);
}

TEST(ModelTest, InitializationBounds) {
  RandomStream s(3);
  const Model m = Model::Initialize(Linear(16, 3), s);
  for (double w : m.parameters()) EXPECT_LE(std::abs(w), 0.25);
}

TEST(ModelTest, ZeroGradientWhenTargetIsPrediction) {
  RandomStream s(4);
  const Model m = Model::Initialize(Mlp(3, 3, 5), s);
  const std::vector<double> x = {0.3, -1.0, 2.0};
  std::vector<BatchItem> batch = {{x, m.Predict(x)}};
  std::vector<double> g;
  m.Loss(batch, &g);
  for (double v : g) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(SgdTest, MomentumUpdateByHand) {
  Model m = Model::FromParameters(Linear(1, 2), {0.0, 0.0, 0.0, 0.0});
  const std::vector<double> x = {1.0};
  std::vector<BatchItem> batch = {{x, LabelDistribution::PointMass(0, 2)}};
  TrainConfig config;
  config.learning_rate = 0.5;
  config.momentum = 0.9;
  config.weight_decay = 0.1;
  SgdState state;
  // At zero weights the softmax is uniform: dL/dlogit = (0.5 - 1, 0.5).
  const double loss = SgdStep(m, state, batch, config);
  EXPECT_NEAR(loss, std::log(2.0), 1e-15);
  const std::vector<double> expected = {0.25, -0.25, 0.25, -0.25};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.parameters()[i], expected[i], 1e-15);
  std::vector<double> g;
  m.Loss(batch, &g);
  const std::vector<double> before = m.parameters();
  SgdStep(m, state, batch, config);
  for (int i = 0; i < 4; ++i) {
    const double v = 0.9 * (-expected[i] / 0.5) + g[i] + 0.1 * before[i];
    EXPECT_NEAR(m.parameters()[i], before[i] - 0.5 * v, 1e-14);
  }
}

TEST(SgdTest, DivergenceIsTrainingError) {
  Model m = Model::FromParameters(Linear(1, 2), {0.0, 0.0, 0.0, 0.0});
  const std::vector<double> x = {1e300};
  std::vector<BatchItem> batch = {{x, LabelDistribution::PointMass(0, 2)}};
  TrainConfig config;
  config.learning_rate = 1e10;
  SgdState state;
  EXPECT_THROW(
      {
        for (int i = 0; i < 5; ++i) SgdStep(m, state, batch, config);
      },
      TrainingError);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(ValidateTrainConfig(c));
  c.momentum = 1.0;
  EXPECT_THROW(ValidateTrainConfig(c), InputError);
  c = TrainConfig();
  c.batch_size = 0;
  EXPECT_THROW(ValidateTrainConfig(c), InputError);
}

TEST(TrainTest, LearnsSeparableDataDeterministically) {
  RandomStream s(5);
  const Dataset data = GenerateMixture(4, 6, 400, 6.0, s);
  auto [train, test] = SplitHoldout(data, 100);
  TrainConfig config;
  config.epochs = 10;
  config.seed = 9;
  for (const ModelSpec& spec : {Linear(6, 4), Mlp(6, 4, 16)}) {
    const Model a = TrainSupervised(train, spec, config);
    const Model b = TrainSupervised(train, spec, config);
    EXPECT_EQ(a, b);
    EXPECT_GT(Evaluate(a, test), 0.9);
  }
}

TEST(TrainTest, EpochCallbackSeesDecreasingLoss) {
  RandomStream s(6);
  const Dataset data = GenerateMixture(3, 4, 300, 4.0, s);
  TrainConfig config;
  config.epochs = 8;
  config.learning_rate = 0.05;
  std::vector<double> losses;
  RandomStream init(1);
  const auto rows = data.Unlabeled().rows;
  Fit(Model::Initialize(Linear(4, 3), init), rows,
      [&](size_t i, const Model&) {
        return LabelDistribution::PointMass(data[i].label, 3);
      },
      config, [&](int epoch, const Model&, double loss) {
        EXPECT_EQ(epoch, static_cast<int>(losses.size()) + 1);
        losses.push_back(loss);
      });
  ASSERT_EQ(losses.size(), 8u);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(EvaluateTest, EmptyDatasetIsError) {
  const Model m = Model::Zeros(Linear(2, 2));
  EXPECT_THROW(Evaluate(m, Dataset({}, 2, 2)), InputError);
}

TEST(CheckpointTest, RoundTripIsBitwise) {
  RandomStream s(7);
  const Model m = Model::Initialize(Mlp(3, 4, 5), s);
  const auto dir = std::filesystem::temp_directory_path() / "labeldp_ckpt";
  const std::string header = (dir / "m.json").string();
  SaveCheckpoint(m, header, (dir / "m.bin").string());
  EXPECT_EQ(LoadCheckpoint(header), m);
  std::filesystem::resize_file(dir / "m.bin", 8);
  EXPECT_THROW(LoadCheckpoint(header), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(ArchitectureTest, Names) {
  EXPECT_EQ(ParseArchitecture(ArchitectureName(Architecture::kMlp)),
            Architecture::kMlp);
  EXPECT_EQ(ParseArchitecture("linear"), Architecture::kLinear);
  EXPECT_THROW(ParseArchitecture("cnn"), Error);
}

}  // namespace
}  // namespace labeldp
