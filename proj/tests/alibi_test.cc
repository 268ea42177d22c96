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
#include <vector>

#include "gtest/gtest.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

AlibiConfig SmallConfig(const Dataset& data, double lambda) {
  AlibiConfig c;
  c.noise = NoiseFamily::kLaplace;
  c.noise_param = lambda;
  c.posterior = PosteriorKind::kLaplaceBayes;
  c.model = {Architecture::kLinear, data.dim(), data.num_classes(), 0};
  c.train.epochs = 5;
  c.train.seed = 3;
  return c;
}

Dataset SmallData() {
  RandomStream s(1);
  return GenerateMixture(4, 6, 400, 6.0, s);
}

TEST(AlibiConfigTest, RejectsMismatches) {
  const Dataset data = SmallData();
  AlibiConfig c = SmallConfig(data, 1.0);
  EXPECT_NO_THROW(ValidateAlibiConfig(c));
  c.posterior = PosteriorKind::kGaussianBayes;
  EXPECT_THROW(ValidateAlibiConfig(c), ConfigError);
  c = SmallConfig(data, 1.0);
  c.posterior = PosteriorKind::kIdentity;
  EXPECT_THROW(ValidateAlibiConfig(c), ConfigError);
  c.noise_param = 0.0;
  EXPECT_NO_THROW(ValidateAlibiConfig(c));
  c = SmallConfig(data, -1.0);
  EXPECT_THROW(ValidateAlibiConfig(c), ConfigError);
  c = SmallConfig(data, 1.0);
  c.noise = NoiseFamily::kGaussian;
  c.posterior = PosteriorKind::kMinProjection;
  c.delta = 0.0;
  EXPECT_THROW(ValidateAlibiConfig(c), ConfigError);
}

TEST(AlibiBudgetTest, MatchesAccountant) {
  const Dataset data = SmallData();
  AlibiConfig c = SmallConfig(data, 2.0);
  EXPECT_DOUBLE_EQ(AlibiBudget(c).epsilon, 1.0);
  EXPECT_EQ(AlibiBudget(c).delta, 0.0);
  c.noise_param = 0.0;
  EXPECT_EQ(AlibiBudget(c).epsilon, std::numeric_limits<double>::infinity());
  c.noise = NoiseFamily::kGaussian;
  c.posterior = PosteriorKind::kGaussianBayes;
  c.noise_param = std::sqrt(2.0);
  c.delta = 0.05;
  EXPECT_NEAR(AlibiBudget(c).epsilon, 1.95996, 1e-4);
}

TEST(NoiseDatasetTest, DeterministicAndNoiseFree) {
  const Dataset data = SmallData();
  const AlibiConfig c = SmallConfig(data, 1.0);
  RandomStream a(5);
  RandomStream b(5);
  EXPECT_EQ(NoiseDataset(data, c, a), NoiseDataset(data, c, b));
  AlibiConfig zero = c;
  zero.noise_param = 0.0;
  RandomStream z(5);
  const NoisedDataset clean = NoiseDataset(data, zero, z);
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(clean.observations[i].values(),
              OneHot(data[i].label, data.num_classes()));
  }
}

TEST(TrainOnNoisedTest, TargetsAreValidDistributions) {
  const Dataset data = SmallData();
  const AlibiConfig c = SmallConfig(data, 1.0);
  RandomStream s(6);
  const NoisedDataset noised = NoiseDataset(data, c, s);
  int64_t calls = 0;
  TrainOnNoised(noised, c, nullptr, [&](const LabelDistribution& t) {
    ++calls;
    double total = 0.0;
    for (double p : t.probs()) {
      EXPECT_GE(p, 0.0);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  });
  EXPECT_EQ(calls, static_cast<int64_t>(data.size()) * c.train.epochs);
}

TEST(TrainOnNoisedTest, NoiselessModeUsesOneHotTargets) {
  const Dataset data = SmallData();
  AlibiConfig c = SmallConfig(data, 0.0);
  RandomStream s(7);
  const NoisedDataset noised = NoiseDataset(data, c, s);
  TrainOnNoised(noised, c, nullptr, [&](const LabelDistribution& t) {
    EXPECT_EQ(t.probs()[t.Argmax()], 1.0);
  });
}

TEST(AlibiTrainTest, AccuracyDropsWithNoise) {
  RandomStream gen(2);
  const Dataset data = GenerateMixture(5, 10, 1000, 8.0, gen);
  auto [train, test] = SplitHoldout(data, 250);
  std::vector<double> accuracy;
  for (double lambda : {0.01, 1.0, 5.0}) {
    AlibiConfig c = SmallConfig(train, lambda);
    c.train.epochs = 15;
    RandomStream s(8);
    const AlibiResult r = AlibiTrain(train, c, s, &test);
    ASSERT_EQ(r.history.size(), 15u);
    EXPECT_GE(r.history.back().test_accuracy, 0.0);
    accuracy.push_back(Evaluate(r.model, test));
  }
  EXPECT_GT(accuracy[0], 0.95);
  EXPECT_GT(accuracy[0], accuracy[1]);
  EXPECT_GT(accuracy[1], accuracy[2]);
}

TEST(AlibiTrainTest, Deterministic) {
  const Dataset data = SmallData();
  const AlibiConfig c = SmallConfig(data, 1.0);
  RandomStream a(9);
  RandomStream b(9);
  EXPECT_EQ(AlibiTrain(data, c, a).model, AlibiTrain(data, c, b).model);
}

TEST(AlibiTrainTest, MinProjectionAndGaussianVariants) {
  const Dataset data = SmallData();
  AlibiConfig c = SmallConfig(data, 0.5);
  c.posterior = PosteriorKind::kMinProjection;
  RandomStream s(10);
  EXPECT_GT(Evaluate(AlibiTrain(data, c, s).model, data), 0.8);
  c.noise = NoiseFamily::kGaussian;
  c.posterior = PosteriorKind::kGaussianBayes;
  RandomStream t(11);
  EXPECT_GT(Evaluate(AlibiTrain(data, c, t).model, data), 0.8);
}

TEST(AlibiTrainTest, ClassCountMismatchIsConfigError) {
  const Dataset data = SmallData();
  AlibiConfig c = SmallConfig(data, 1.0);
  c.model.num_classes = 3;
  RandomStream s(12);
  EXPECT_THROW(AlibiTrain(data, c, s), ConfigError);
}

}  // namespace
}  // namespace labeldp
