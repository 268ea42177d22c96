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

// Label memorization auditing.
//
// A trained model is attacked by an adversary that must decide which of two
// candidate labels an example was trained with. The adversary compares the
// model's confidence in both labels and abstains when neither reaches a
// threshold. If an epsilon-label-DP mechanism is attacked, the adversary's
// correct guess rate a among non-abstained guesses satisfies
// epsilon >= log(a / (1 - a)), so a confidence interval on a turns into an
// empirical interval on epsilon.
//
// To avoid training one model per guess, many canaries (mislabeled examples)
// are injected into a single training run and each canary is scored against
// several alternative labels. Guesses for one canary are correlated, so they
// are first averaged per canary (ACGR_i over m_i non-abstained guesses) and
// the canary averages are combined with the m_i as reliability weights:
//
//   mean   = sum m_i x_i / sum m_i
//   s^2    = sum m_i (x_i - mean)^2 / (sum m_i - sum m_i^2 / sum m_i)
//   n_eff  = (sum m_i)^2 / sum m_i^2
//   CI     = mean +- 1.96 * s / sqrt(n_eff), clipped to [0, 1]

#ifndef LABELDP_AUDIT_H_
#define LABELDP_AUDIT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "labeldp/core.h"
#include "labeldp/model.h"
#include "labeldp/random.h"

namespace labeldp {

enum class Guess : int8_t { kZero = 0, kOne = 1, kAbstain = -1 };

enum class CanaryMode {
  // Train with y' and score against up to C - 2 alternatives y''_j, each
  // with its own iid bookkeeping bit.
  kAllAlternatives,
  // One alternative per canary; the secret bit picks which of (y', y'') is
  // trained.
  kSingleAlternative,
};

struct CanaryRecord {
  size_t index = 0;
  int original_label = 0;
  // Label the model was trained with; always differs from original_label.
  int trained_label = 0;
  // Labels the adversary must distinguish from trained_label. Distinct and
  // different from both original_label and trained_label.
  std::vector<int> alternatives;
  // b_{i,j}: 0 means the first dataset handed to the adversary is the one
  // with the trained label.
  std::vector<int> secret_bits;
  std::vector<Guess> guesses;
  // Model confidences, stored so thresholds can be re-applied without
  // retraining.
  double trained_confidence = 0.0;
  std::vector<double> alternative_confidences;
};

struct CanaryInjection {
  Dataset dataset;
  std::vector<CanaryRecord> canaries;
};

// Picks `num_canaries` distinct examples uniformly and relabels each with a
// wrong class. Throws InputError if C < 3, num_canaries > n, or
// num_alternatives is outside [1, C - 2] (exactly 1 in single mode).
CanaryInjection InjectCanaries(const Dataset& dataset, int num_canaries,
                               int num_alternatives, RandomStream& stream,
                               CanaryMode mode = CanaryMode::kAllAlternatives);

// kAbstain if max(p[first], p[second]) < threshold or the two confidences
// tie; otherwise kZero if p[first] > p[second], else kOne.
Guess AdversaryGuess(const LabelDistribution& prediction, int first,
                     int second, double threshold);
Guess AdversaryGuess(const Model& model, std::span<const double> x, int first,
                     int second, double threshold);

// Fills confidences from `model` and guesses at `threshold`.
void ScoreCanaries(const Model& model, const Dataset& dataset,
                   std::vector<CanaryRecord>& canaries, double threshold);
// Recomputes guesses from stored confidences.
std::vector<CanaryRecord> ApplyThreshold(std::span<const CanaryRecord> records,
                                         double threshold);

// Trains a model on a dataset; the mechanism under audit.
using MechanismTrainer =
    std::function<Model(const Dataset& dataset, RandomStream& stream)>;
// Decides which of two adjacent datasets `model` was trained on.
using Adversary = std::function<Guess(const Dataset& d0, const Dataset& d1,
                                      const Model& model)>;

// Confidence adversary on the single example where d0 and d1 differ.
Adversary ConfidenceAdversary(double threshold);

struct Game1Outcome {
  int secret = 0;
  Guess guess = Guess::kAbstain;
  bool won = false;
};

// Trains on d_b for a uniform secret b and scores the adversary. Throws
// InputError unless d0 and d1 have identical features and differ in exactly
// one label.
Game1Outcome RunGame1(const MechanismTrainer& trainer, const Dataset& d0,
                      const Dataset& d1, const Adversary& adversary,
                      RandomStream& stream);

struct AuditConfig {
  int num_canaries = 0;
  // Alternatives scored per canary; non-positive means C - 2.
  int num_alternatives = 0;
  CanaryMode mode = CanaryMode::kAllAlternatives;
  // Threshold used to fill CanaryRecord::guesses.
  double threshold = 0.5;
};

struct Game3Result {
  Model model;
  std::vector<CanaryRecord> canaries;
};

// One training run on the canary-injected dataset followed by scoring every
// (canary, alternative) pair.
Game3Result RunGame3(const MechanismTrainer& trainer, const Dataset& dataset,
                     const AuditConfig& config, RandomStream& stream);

struct AcgrStats {
  std::vector<double> per_canary;
  std::vector<double> weights;
  double mean = 0.0;
  double stddev = 0.0;
  double effective_n = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  int64_t total_guesses = 0;
  int64_t correct_guesses = 0;
  // No guesses at all, or too few weighted canaries to estimate a variance.
  // The CI is then [0, 1].
  bool degenerate = false;
};

// Throws InputError on an empty record list.
AcgrStats ComputeAcgr(std::span<const CanaryRecord> records);

// max(0, log(a / (1 - a))). Throws InputError unless 0 < a < 1.
double EpsilonFromCgr(double correct_guess_rate);

// Exact binomial interval from Beta quantiles. lo = 0 when k = 0 and hi = 1
// when k = n.
std::pair<double, double> ClopperPearson(int64_t successes, int64_t trials,
                                         double level = 0.95);

enum class CiMethod { kWeightedNormal, kClopperPearson };
std::string CiMethodName(CiMethod method);
CiMethod ParseCiMethod(const std::string& name);

struct ThresholdEstimate {
  double threshold = 0.0;
  AcgrStats acgr;
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  bool degenerate = false;
};

struct EpsilonEstimate {
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  double best_threshold = 0.0;
  CiMethod method = CiMethod::kWeightedNormal;
  std::vector<ThresholdEstimate> per_threshold;
  bool degenerate = false;
};

// Default sweep over [0.5, 0.99].
const std::vector<double>& DefaultThresholds();

// For each threshold: re-apply the adversary, build the CI on the correct
// guess rate, clamp its endpoints into [h, 1 - h] with h = 1 / (2 * guesses)
// and map them through EpsilonFromCgr. Reports the threshold whose CI lower
// bound is highest. No multiple-testing correction is applied. Degenerate
// thresholds report [0, 0] and are only chosen when every threshold is
// degenerate.
EpsilonEstimate EstimateEpsilon(std::span<const CanaryRecord> records,
                                std::span<const double> thresholds,
                                CiMethod method = CiMethod::kWeightedNormal);

struct HeuristicReport {
  int num_canaries = 0;
  int num_splits = 1;
  EpsilonEstimate single_run;
  // Records of all split runs pooled into one estimate.
  EpsilonEstimate split_runs;
  std::vector<EpsilonEstimate> per_split;
  bool overlap = false;
};

// One run with N canaries against `splits` independent runs with N / splits
// canaries each. Throws InputError unless splits divides N.
HeuristicReport ValidateHeuristic(const MechanismTrainer& trainer,
                                  const Dataset& dataset,
                                  const AuditConfig& config, int splits,
                                  std::span<const double> thresholds,
                                  RandomStream& stream,
                                  CiMethod method = CiMethod::kWeightedNormal);

// Explains which accuracy-to-epsilon formula is used.
extern const char kErratumNote[];

nlohmann::json ToJson(const EpsilonEstimate& estimate);
// {N, thresholds[], per_threshold[], best_threshold, eps_ci, erratum_note}.
nlohmann::json AuditReportJson(int num_canaries,
                               std::span<const double> thresholds,
                               const EpsilonEstimate& estimate);
nlohmann::json ToJson(const HeuristicReport& report);

// One row per (canary, alternative) with confidences and the guess at
// `threshold`.
std::string FormatCanaryCsv(std::span<const CanaryRecord> records,
                            double threshold);

}  // namespace labeldp

#endif  // LABELDP_AUDIT_H_
