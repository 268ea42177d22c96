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

#include "labeldp/audit.h"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "labeldp/status.h"
#include "oracles.h"

namespace labeldp {
namespace {

Dataset Data(int classes = 5, int dim = 8, int n = 100, uint64_t seed = 1) {
  RandomStream s(seed);
  return GenerateMixture(classes, dim, n, 4.0, s);
}

// Linear model trained long enough to fit every label of a small,
// high-dimensional dataset.
MechanismTrainer Memorizer() {
  return [](const Dataset& d, RandomStream& stream) {
    TrainConfig config;
    config.epochs = 60;
    config.seed = stream.engine()();
    return TrainSupervised(
        d, {Architecture::kLinear, d.dim(), d.num_classes(), 0}, config);
  };
}

// Record with given secret bits and guesses.
CanaryRecord Record(std::vector<int> bits, std::vector<Guess> guesses) {
  CanaryRecord r;
  r.secret_bits = std::move(bits);
  r.guesses = std::move(guesses);
  r.alternatives.assign(r.guesses.size(), 0);
  r.alternative_confidences.assign(r.guesses.size(), 0.0);
  return r;
}

TEST(InjectCanariesTest, Structure) {
  const Dataset data = Data();
  RandomStream s(2);
  const CanaryInjection inj = InjectCanaries(data, 30, 3, s);
  ASSERT_EQ(inj.canaries.size(), 30u);
  std::set<size_t> indices;
  for (const CanaryRecord& r : inj.canaries) {
    indices.insert(r.index);
    EXPECT_EQ(r.original_label, data[r.index].label);
    EXPECT_NE(r.trained_label, r.original_label);
    EXPECT_EQ(inj.dataset[r.index].label, r.trained_label);
    ASSERT_EQ(r.alternatives.size(), 3u);
    ASSERT_EQ(r.secret_bits.size(), 3u);
    std::set<int> alts(r.alternatives.begin(), r.alternatives.end());
    EXPECT_EQ(alts.size(), 3u);
    EXPECT_FALSE(alts.contains(r.original_label));
    EXPECT_FALSE(alts.contains(r.trained_label));
    for (int b : r.secret_bits) EXPECT_TRUE(b == 0 || b == 1);
  }
  EXPECT_EQ(indices.size(), 30u);
  int changed = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(inj.dataset[i].features, data[i].features);
    changed += inj.dataset[i].label != data[i].label;
  }
  EXPECT_EQ(changed, 30);
}

TEST(InjectCanariesTest, SingleAlternativeMode) {
  const Dataset data = Data();
  RandomStream s(3);
  const CanaryInjection inj =
      InjectCanaries(data, 20, 1, s, CanaryMode::kSingleAlternative);
  for (const CanaryRecord& r : inj.canaries) {
    ASSERT_EQ(r.alternatives.size(), 1u);
    EXPECT_NE(r.alternatives[0], r.trained_label);
    EXPECT_NE(r.alternatives[0], r.original_label);
  }
}

TEST(InjectCanariesTest, Errors) {
  RandomStream s(4);
  EXPECT_THROW(InjectCanaries(Data(2, 4, 20), 5, 1, s), InputError);
  EXPECT_THROW(InjectCanaries(Data(), 101, 1, s), InputError);
  EXPECT_THROW(InjectCanaries(Data(), 5, 4, s), InputError);
  EXPECT_THROW(InjectCanaries(Data(), 5, 2, s, CanaryMode::kSingleAlternative),
               InputError);
}

TEST(AdversaryGuessTest, Rules) {
  const LabelDistribution p =
      LabelDistribution::FromProbabilities({0.6, 0.3, 0.1, 0.0});
  EXPECT_EQ(AdversaryGuess(p, 0, 1, 0.5), Guess::kZero);
  EXPECT_EQ(AdversaryGuess(p, 1, 0, 0.5), Guess::kOne);
  EXPECT_EQ(AdversaryGuess(p, 1, 2, 0.5), Guess::kAbstain);
  EXPECT_EQ(AdversaryGuess(p, 1, 2, 0.2), Guess::kZero);
  EXPECT_EQ(AdversaryGuess(p, 0, 1, 0.7), Guess::kAbstain);
  const LabelDistribution tie =
      LabelDistribution::FromProbabilities({0.5, 0.5, 0.0});
  EXPECT_EQ(AdversaryGuess(tie, 0, 1, 0.1), Guess::kAbstain);
  EXPECT_THROW(AdversaryGuess(p, 1, 1, 0.5), InputError);
}

TEST(ComputeAcgrTest, ReliabilityWeightedFormula) {
  // Per-canary rates 1, 1/2, 0 from 2, 4, 1 guesses; a fourth canary
  // abstains throughout.
  using G = Guess;
  std::vector<CanaryRecord> records = {
      Record({0, 1}, {G::kZero, G::kOne}),
      Record({0, 0, 1, 1}, {G::kZero, G::kOne, G::kOne, G::kZero}),
      Record({1, 0}, {G::kZero, G::kAbstain}),
      Record({0}, {G::kAbstain}),
  };
  const AcgrStats st = ComputeAcgr(records);
  EXPECT_EQ(st.per_canary, (std::vector<double>{1.0, 0.5, 0.0, 0.0}));
  EXPECT_EQ(st.weights, (std::vector<double>{2, 4, 1, 0}));
  EXPECT_EQ(st.total_guesses, 7);
  EXPECT_EQ(st.correct_guesses, 4);
  const double m = 4.0 / 7.0;
  const double v1 = 7.0;
  const double v2 = 4.0 + 16.0 + 1.0;
  const double ss = 2 * (1 - m) * (1 - m) + 4 * (0.5 - m) * (0.5 - m) +
                    1 * m * m;
  const double s = std::sqrt(ss / (v1 - v2 / v1));
  const double n_eff = v1 * v1 / v2;
  EXPECT_NEAR(st.mean, m, 1e-15);
  EXPECT_NEAR(st.stddev, s, 1e-14);
  EXPECT_NEAR(st.effective_n, n_eff, 1e-14);
  EXPECT_NEAR(st.ci_lo, std::max(0.0, m - 1.959964 * s / std::sqrt(n_eff)),
              1e-6);
  EXPECT_NEAR(st.ci_hi, std::min(1.0, m + 1.959964 * s / std::sqrt(n_eff)),
              1e-6);
  EXPECT_FALSE(st.degenerate);
}

TEST(ComputeAcgrTest, DegenerateCases) {
  using G = Guess;
  std::vector<CanaryRecord> abstained = {Record({0}, {G::kAbstain})};
  const AcgrStats a = ComputeAcgr(abstained);
  EXPECT_TRUE(a.degenerate);
  EXPECT_EQ(a.ci_lo, 0.0);
  EXPECT_EQ(a.ci_hi, 1.0);
  std::vector<CanaryRecord> single = {Record({0, 1}, {G::kZero, G::kZero}),
                                      Record({0}, {G::kAbstain})};
  EXPECT_TRUE(ComputeAcgr(single).degenerate);
  EXPECT_THROW(ComputeAcgr(std::vector<CanaryRecord>{}), InputError);
}

TEST(EpsilonFromCgrTest, Identities) {
  EXPECT_EQ(EpsilonFromCgr(0.5), 0.0);
  EXPECT_NEAR(EpsilonFromCgr(std::numbers::e / (1 + std::numbers::e)), 1.0,
              1e-12);
  EXPECT_EQ(EpsilonFromCgr(0.2), 0.0);
  EXPECT_NEAR(EpsilonFromCgr(0.95), std::log(19.0), 1e-12);
  EXPECT_NEAR(EpsilonFromCgr(0.95), 2.944, 1e-3);
  EXPECT_NEAR(EpsilonFromCgr(0.982), 3.999, 1e-3);
  EXPECT_THROW(EpsilonFromCgr(1.0), InputError);
  EXPECT_THROW(EpsilonFromCgr(0.0), InputError);
}

TEST(ClopperPearsonTest, MatchesBinomialOracle) {
  const auto [lo, hi] = ClopperPearson(8, 10);
  EXPECT_NEAR(lo, 0.4439, 1e-3);
  EXPECT_NEAR(hi, 0.9748, 1e-3);
  for (int n : {1, 7, 30}) {
    for (int k = 0; k <= n; ++k) {
      const auto [a, b] = ClopperPearson(k, n, 0.9);
      const auto [oa, ob] = testing::ClopperPearsonOracle(k, n, 0.9);
      EXPECT_NEAR(a, oa, 1e-9);
      EXPECT_NEAR(b, ob, 1e-9);
    }
  }
  EXPECT_EQ(ClopperPearson(0, 5).first, 0.0);
  EXPECT_EQ(ClopperPearson(5, 5).second, 1.0);
  EXPECT_THROW(ClopperPearson(3, 2), InputError);
  EXPECT_THROW(ClopperPearson(0, 0), InputError);
}

TEST(EstimateEpsilonTest, PerfectAttackIsClampedNotInfinite) {
  // Ten canaries, two alternatives each, all guessed correctly at any
  // threshold.
  std::vector<CanaryRecord> records;
  for (int i = 0; i < 10; ++i) {
    CanaryRecord r;
    r.trained_confidence = 0.999;
    r.alternatives = {1, 2};
    r.secret_bits = {i % 2, 1 - i % 2};
    r.alternative_confidences = {0.0005, 0.0005};
    r.guesses.assign(2, Guess::kAbstain);
    records.push_back(r);
  }
  const EpsilonEstimate e = EstimateEpsilon(records, DefaultThresholds());
  const double h = 1.0 / 40.0;
  EXPECT_NEAR(e.eps_lo, std::log((1 - h) / h), 1e-12);
  EXPECT_NEAR(e.eps_hi, std::log((1 - h) / h), 1e-12);
  EXPECT_FALSE(e.degenerate);
  EXPECT_EQ(e.per_threshold.size(), DefaultThresholds().size());
}

TEST(EstimateEpsilonTest, NoGuessesIsDegenerateZero) {
  std::vector<CanaryRecord> records(3);
  for (CanaryRecord& r : records) {
    r.alternatives = {1};
    r.secret_bits = {0};
    r.trained_confidence = 0.2;
    r.alternative_confidences = {0.1};
  }
  const EpsilonEstimate e = EstimateEpsilon(records, DefaultThresholds());
  EXPECT_TRUE(e.degenerate);
  EXPECT_EQ(e.eps_lo, 0.0);
  EXPECT_EQ(e.eps_hi, 0.0);
}

TEST(EstimateEpsilonTest, ClopperPearsonPoolsGuesses) {
  std::vector<CanaryRecord> records;
  for (int i = 0; i < 10; ++i) {
    CanaryRecord r;
    r.alternatives = {1};
    r.secret_bits = {0};
    // Eight of ten canaries favour the trained label.
    r.trained_confidence = i < 8 ? 0.9 : 0.05;
    r.alternative_confidences = {i < 8 ? 0.05 : 0.9};
    records.push_back(r);
  }
  const std::vector<double> thresholds = {0.5};
  const EpsilonEstimate e =
      EstimateEpsilon(records, thresholds, CiMethod::kClopperPearson);
  const auto [lo, hi] = ClopperPearson(8, 10);
  EXPECT_NEAR(e.per_threshold[0].acgr.ci_lo, lo, 1e-12);
  EXPECT_NEAR(e.eps_lo, 0.0, 1e-12);
  // The upper end is clamped to 1 - 1 / (2 * 10).
  const double a = std::min(hi, 0.95);
  EXPECT_NEAR(e.eps_hi, std::log(a / (1 - a)), 1e-9);
}

TEST(ApplyThresholdTest, MatchesAdversaryOnModel) {
  const Dataset data = Data();
  RandomStream s(5);
  AuditConfig config;
  config.num_canaries = 20;
  config.threshold = 0.3;
  const Game3Result run = RunGame3(Memorizer(), data, config, s);
  ASSERT_EQ(run.canaries.size(), 20u);
  for (double tau : {0.3, 0.6, 0.9}) {
    const auto rescored = ApplyThreshold(run.canaries, tau);
    for (const CanaryRecord& r : rescored) {
      const LabelDistribution p = run.model.Predict(data[r.index].features);
      for (size_t j = 0; j < r.alternatives.size(); ++j) {
        const int first = r.secret_bits[j] == 0 ? r.trained_label
                                                : r.alternatives[j];
        const int second = r.secret_bits[j] == 0 ? r.alternatives[j]
                                                 : r.trained_label;
        EXPECT_EQ(r.guesses[j], AdversaryGuess(p, first, second, tau));
      }
    }
  }
}

TEST(Game1Test, RejectsNonAdjacentDatasets) {
  const Dataset data = Data();
  RandomStream s(6);
  const Adversary adv = ConfidenceAdversary(0.5);
  EXPECT_THROW(RunGame1(Memorizer(), data, data, adv, s), InputError);
  const Dataset two = data.WithLabel(0, (data[0].label + 1) % 5)
                          .WithLabel(1, (data[1].label + 1) % 5);
  EXPECT_THROW(RunGame1(Memorizer(), data, two, adv, s), InputError);
}

TEST(Game1Test, MemorizerIsDistinguishable) {
  const Dataset data = Data(5, 40, 30, 7);
  const Dataset d1 = data.WithLabel(3, (data[3].label + 1) % 5);
  const Adversary adv = ConfidenceAdversary(0.0);
  int wins = 0;
  RandomStream s(8);
  for (int i = 0; i < 20; ++i) {
    RandomStream game = s.Fork(i);
    wins += RunGame1(Memorizer(), data, d1, adv, game).won;
  }
  EXPECT_GE(wins, 19);
}

TEST(Game3Test, DeterministicAndPowerful) {
  const Dataset data = Data(10, 100, 60, 9);
  AuditConfig config;
  config.num_canaries = 30;
  RandomStream a(10);
  RandomStream b(10);
  const Game3Result ra = RunGame3(Memorizer(), data, config, a);
  const Game3Result rb = RunGame3(Memorizer(), data, config, b);
  EXPECT_EQ(ra.model, rb.model);
  const EpsilonEstimate e = EstimateEpsilon(ra.canaries, DefaultThresholds());
  EXPECT_GE(e.eps_lo, 2.0);
}

TEST(ValidateHeuristicTest, SplitsMustDivide) {
  const Dataset data = Data();
  AuditConfig config;
  config.num_canaries = 10;
  RandomStream s(11);
  EXPECT_THROW(ValidateHeuristic(Memorizer(), data, config, 3,
                                 DefaultThresholds(), s),
               InputError);
  const HeuristicReport r = ValidateHeuristic(Memorizer(), data, config, 2,
                                              DefaultThresholds(), s);
  EXPECT_EQ(r.per_split.size(), 2u);
  EXPECT_EQ(r.overlap, r.single_run.eps_lo <= r.split_runs.eps_hi &&
                           r.split_runs.eps_lo <= r.single_run.eps_hi);
}

TEST(ReportTest, JsonLayoutAndCsv) {
  const Dataset data = Data();
  AuditConfig config;
  config.num_canaries = 10;
  RandomStream s(12);
  const Game3Result run = RunGame3(Memorizer(), data, config, s);
  const EpsilonEstimate e = EstimateEpsilon(run.canaries, DefaultThresholds());
  const nlohmann::json j = AuditReportJson(10, DefaultThresholds(), e);
  for (const char* key : {"N", "thresholds", "per_threshold", "best_threshold",
                          "eps_ci", "erratum_note"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["per_threshold"].size(), DefaultThresholds().size());
  EXPECT_TRUE(j["per_threshold"][0].contains("acgr_mean"));
  EXPECT_NE(j["erratum_note"].get<std::string>().find("log(a / (1 - a))"),
            std::string::npos);
  const std::string csv = FormatCanaryCsv(run.canaries, 0.5);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 10 * 3);
  EXPECT_EQ(CiMethodName(ParseCiMethod("clopper-pearson")), "clopper-pearson");
}

}  // namespace
}  // namespace labeldp
