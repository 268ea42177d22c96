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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boost/math/special_functions/beta.hpp"
#include "labeldp/io.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

constexpr double kNormalQuantile975 = 1.959963984540054;
constexpr uint64_t kSingleRunStream = 0;
constexpr uint64_t kSplitRunStream = 1000;
constexpr uint64_t kTrainStream = 1;
constexpr uint64_t kInjectStream = 2;

std::vector<int> OtherClasses(int num_classes, std::initializer_list<int> skip) {
  std::vector<int> classes;
  for (int c = 0; c < num_classes; ++c) {
    if (std::find(skip.begin(), skip.end(), c) == skip.end()) {
      classes.push_back(c);
    }
  }
  return classes;
}

bool IsCorrect(int secret_bit, Guess guess) {
  return guess != Guess::kAbstain && static_cast<int>(guess) == secret_bit;
}

void Recompute(CanaryRecord& record, double threshold) {
  record.guesses.assign(record.alternatives.size(), Guess::kAbstain);
  for (size_t j = 0; j < record.alternatives.size(); ++j) {
    const double trained = record.trained_confidence;
    const double alternative = record.alternative_confidences[j];
    const bool trained_first = record.secret_bits[j] == 0;
    const double first = trained_first ? trained : alternative;
    const double second = trained_first ? alternative : trained;
    if (std::max(first, second) < threshold || first == second) {
      record.guesses[j] = Guess::kAbstain;
    } else {
      record.guesses[j] = first > second ? Guess::kZero : Guess::kOne;
    }
  }
}

std::string GuessName(Guess g) {
  switch (g) {
    case Guess::kZero:
      return "0";
    case Guess::kOne:
      return "1";
    case Guess::kAbstain:
      return "abstain";
  }
  return "?";
}

}  // namespace

const char kErratumNote[] =
    "Empirical epsilon intervals use eps >= log(a / (1 - a)) for a correct "
    "guess rate a, which is the bound implied by pure label DP. The variant "
    "1 - log(a / (1 - a)) that circulates in prose descriptions of this "
    "attack is not a valid lower bound and is not used.";

CanaryInjection InjectCanaries(const Dataset& dataset, int num_canaries,
                               int num_alternatives, RandomStream& stream,
                               CanaryMode mode) {
  const int num_classes = dataset.num_classes();
  if (num_classes < 3) {
    throw InputError("canaries need at least 3 classes (got " +
                     std::to_string(num_classes) + ")");
  }
  if (num_canaries < 0 || static_cast<size_t>(num_canaries) > dataset.size()) {
    throw InputError("canary count must lie in [0, n]");
  }
  if (mode == CanaryMode::kSingleAlternative && num_alternatives != 1) {
    throw InputError("single-alternative mode uses exactly one alternative");
  }
  if (num_alternatives < 1 || num_alternatives > num_classes - 2) {
    throw InputError("alternatives per canary must lie in [1, C - 2]");
  }

  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  stream.Shuffle(std::span<size_t>(order));
  std::vector<size_t> chosen(order.begin(), order.begin() + num_canaries);
  std::sort(chosen.begin(), chosen.end());

  std::vector<Example> examples = dataset.examples();
  std::vector<CanaryRecord> canaries;
  canaries.reserve(chosen.size());
  for (size_t index : chosen) {
    CanaryRecord r;
    r.index = index;
    r.original_label = examples[index].label;
    std::vector<int> wrong = OtherClasses(num_classes, {r.original_label});
    stream.Shuffle(std::span<int>(wrong));
    if (mode == CanaryMode::kSingleAlternative) {
      const int bit = stream.Bernoulli(0.5) ? 1 : 0;
      r.trained_label = bit == 0 ? wrong[0] : wrong[1];
      r.alternatives = {bit == 0 ? wrong[1] : wrong[0]};
      r.secret_bits = {bit};
    } else {
      r.trained_label = wrong[0];
      r.alternatives.assign(wrong.begin() + 1,
                            wrong.begin() + 1 + num_alternatives);
      for (int j = 0; j < num_alternatives; ++j) {
        r.secret_bits.push_back(stream.Bernoulli(0.5) ? 1 : 0);
      }
    }
    r.guesses.assign(r.alternatives.size(), Guess::kAbstain);
    r.alternative_confidences.assign(r.alternatives.size(), 0.0);
    examples[index].label = r.trained_label;
    canaries.push_back(std::move(r));
  }
  return {Dataset(std::move(examples), num_classes, dataset.dim()),
          std::move(canaries)};
}

Guess AdversaryGuess(const LabelDistribution& prediction, int first,
                     int second, double threshold) {
  if (first == second) throw InputError("adversary: labels must differ");
  if (first < 0 || second < 0 || first >= prediction.num_classes() ||
      second >= prediction.num_classes()) {
    throw InputError("adversary: label out of range");
  }
  const double p_first = prediction[first];
  const double p_second = prediction[second];
  if (std::max(p_first, p_second) < threshold) return Guess::kAbstain;
  if (p_first == p_second) return Guess::kAbstain;
  return p_first > p_second ? Guess::kZero : Guess::kOne;
}

Guess AdversaryGuess(const Model& model, std::span<const double> x, int first,
                     int second, double threshold) {
  return AdversaryGuess(model.Predict(x), first, second, threshold);
}

void ScoreCanaries(const Model& model, const Dataset& dataset,
                   std::vector<CanaryRecord>& canaries, double threshold) {
  for (CanaryRecord& r : canaries) {
    if (r.index >= dataset.size()) throw InputError("canary index out of range");
    const LabelDistribution p = model.Predict(dataset[r.index].features);
    r.trained_confidence = p[r.trained_label];
    r.alternative_confidences.resize(r.alternatives.size());
    for (size_t j = 0; j < r.alternatives.size(); ++j) {
      r.alternative_confidences[j] = p[r.alternatives[j]];
    }
    Recompute(r, threshold);
  }
}

std::vector<CanaryRecord> ApplyThreshold(std::span<const CanaryRecord> records,
                                         double threshold) {
  std::vector<CanaryRecord> out(records.begin(), records.end());
  for (CanaryRecord& r : out) Recompute(r, threshold);
  return out;
}

Adversary ConfidenceAdversary(double threshold) {
  return [threshold](const Dataset& d0, const Dataset& d1, const Model& model) {
    for (size_t i = 0; i < d0.size(); ++i) {
      if (d0[i].label != d1[i].label) {
        return AdversaryGuess(model, d0[i].features, d0[i].label, d1[i].label,
                              threshold);
      }
    }
    throw InputError("adversary: datasets are identical");
  };
}

Game1Outcome RunGame1(const MechanismTrainer& trainer, const Dataset& d0,
                      const Dataset& d1, const Adversary& adversary,
                      RandomStream& stream) {
  if (d0.size() != d1.size() || d0.num_classes() != d1.num_classes() ||
      d0.dim() != d1.dim()) {
    throw InputError("game 1: datasets are not adjacent (shape differs)");
  }
  int differing = 0;
  for (size_t i = 0; i < d0.size(); ++i) {
    if (d0[i].features != d1[i].features) {
      throw InputError("game 1: datasets are not adjacent (features differ)");
    }
    if (d0[i].label != d1[i].label) ++differing;
  }
  if (differing != 1) {
    throw InputError("game 1: datasets must differ in exactly one label (" +
                     std::to_string(differing) + " differ)");
  }
  Game1Outcome outcome;
  outcome.secret = stream.Bernoulli(0.5) ? 1 : 0;
  RandomStream train_stream = stream.Fork(kTrainStream);
  const Model model = trainer(outcome.secret == 0 ? d0 : d1, train_stream);
  outcome.guess = adversary(d0, d1, model);
  outcome.won = IsCorrect(outcome.secret, outcome.guess);
  return outcome;
}

Game3Result RunGame3(const MechanismTrainer& trainer, const Dataset& dataset,
                     const AuditConfig& config, RandomStream& stream) {
  RandomStream train_stream = stream.Fork(kTrainStream);
  if (config.num_canaries == 0) {
    return {trainer(dataset, train_stream), {}};
  }
  const int alternatives =
      config.mode == CanaryMode::kSingleAlternative
          ? 1
          : (config.num_alternatives > 0 ? config.num_alternatives
                                         : dataset.num_classes() - 2);
  RandomStream inject_stream = stream.Fork(kInjectStream);
  CanaryInjection injected = InjectCanaries(
      dataset, config.num_canaries, alternatives, inject_stream, config.mode);
  Model model = trainer(injected.dataset, train_stream);
  ScoreCanaries(model, injected.dataset, injected.canaries, config.threshold);
  return {std::move(model), std::move(injected.canaries)};
}

AcgrStats ComputeAcgr(std::span<const CanaryRecord> records) {
  if (records.empty()) throw InputError("ACGR: no canary records");
  AcgrStats stats;
  double weight_sum = 0.0;
  double weight_sq_sum = 0.0;
  double weighted_sum = 0.0;
  for (const CanaryRecord& r : records) {
    int64_t guesses = 0;
    int64_t correct = 0;
    for (size_t j = 0; j < r.guesses.size(); ++j) {
      if (r.guesses[j] == Guess::kAbstain) continue;
      ++guesses;
      if (IsCorrect(r.secret_bits[j], r.guesses[j])) ++correct;
    }
    // 0 / 0 = 0 by convention; such canaries carry zero weight anyway.
    const double acgr =
        guesses == 0 ? 0.0
                     : static_cast<double>(correct) / static_cast<double>(guesses);
    const double w = static_cast<double>(guesses);
    stats.per_canary.push_back(acgr);
    stats.weights.push_back(w);
    stats.total_guesses += guesses;
    stats.correct_guesses += correct;
    weight_sum += w;
    weight_sq_sum += w * w;
    weighted_sum += w * acgr;
  }
  if (weight_sum == 0.0) {
    stats.degenerate = true;
    stats.ci_lo = 0.0;
    stats.ci_hi = 1.0;
    return stats;
  }
  stats.mean = weighted_sum / weight_sum;
  stats.effective_n = weight_sum * weight_sum / weight_sq_sum;
  const double denom = weight_sum - weight_sq_sum / weight_sum;
  if (denom <= 0.0) {
    // A single weighted canary: no spread to estimate.
    stats.degenerate = true;
    stats.ci_lo = 0.0;
    stats.ci_hi = 1.0;
    return stats;
  }
  double ss = 0.0;
  for (size_t i = 0; i < stats.per_canary.size(); ++i) {
    const double dev = stats.per_canary[i] - stats.mean;
    ss += stats.weights[i] * dev * dev;
  }
  stats.stddev = std::sqrt(ss / denom);
  const double half_width =
      kNormalQuantile975 * stats.stddev / std::sqrt(stats.effective_n);
  stats.ci_lo = std::clamp(stats.mean - half_width, 0.0, 1.0);
  stats.ci_hi = std::clamp(stats.mean + half_width, 0.0, 1.0);
  // Keep lo <= mean <= hi under rounding.
  stats.ci_lo = std::min(stats.ci_lo, stats.mean);
  stats.ci_hi = std::max(stats.ci_hi, stats.mean);
  return stats;
}

double EpsilonFromCgr(double correct_guess_rate) {
  if (!(correct_guess_rate > 0.0 && correct_guess_rate < 1.0)) {
    throw InputError("correct guess rate must lie strictly inside (0, 1)");
  }
  return std::max(0.0, std::log(correct_guess_rate / (1.0 - correct_guess_rate)));
}

std::pair<double, double> ClopperPearson(int64_t successes, int64_t trials,
                                         double level) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw InputError("Clopper-Pearson needs 0 <= k <= n and n >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw InputError("Clopper-Pearson level must lie in (0, 1)");
  }
  const double alpha = 1.0 - level;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  const double lo =
      successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2);
  const double hi = successes == trials
                        ? 1.0
                        : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2);
  return {lo, hi};
}

std::string CiMethodName(CiMethod method) {
  return method == CiMethod::kWeightedNormal ? "weighted-normal"
                                             : "clopper-pearson";
}

CiMethod ParseCiMethod(const std::string& name) {
  if (name == "weighted-normal") return CiMethod::kWeightedNormal;
  if (name == "clopper-pearson") return CiMethod::kClopperPearson;
  throw ConfigError("unknown CI method '" + name + "'");
}

const std::vector<double>& DefaultThresholds() {
  static const std::vector<double> kThresholds = {0.5, 0.6, 0.7, 0.8,
                                                  0.9, 0.95, 0.99};
  return kThresholds;
}

EpsilonEstimate EstimateEpsilon(std::span<const CanaryRecord> records,
                                std::span<const double> thresholds,
                                CiMethod method) {
  if (records.empty()) throw InputError("EstimateEpsilon: no records");
  if (thresholds.empty()) throw InputError("EstimateEpsilon: no thresholds");
  EpsilonEstimate estimate;
  estimate.method = method;
  int best = -1;
  for (double threshold : thresholds) {
    ThresholdEstimate t;
    t.threshold = threshold;
    t.acgr = ComputeAcgr(ApplyThreshold(records, threshold));
    if (method == CiMethod::kClopperPearson && t.acgr.total_guesses > 0) {
      auto [lo, hi] =
          ClopperPearson(t.acgr.correct_guesses, t.acgr.total_guesses);
      t.acgr.ci_lo = lo;
      t.acgr.ci_hi = hi;
      t.acgr.degenerate = false;
    }
    t.degenerate = t.acgr.degenerate;
    if (!t.degenerate) {
      const double h = 1.0 / (2.0 * static_cast<double>(t.acgr.total_guesses));
      t.eps_lo = EpsilonFromCgr(std::clamp(t.acgr.ci_lo, h, 1.0 - h));
      t.eps_hi = EpsilonFromCgr(std::clamp(t.acgr.ci_hi, h, 1.0 - h));
      if (best < 0 ||
          t.acgr.ci_lo > estimate.per_threshold[best].acgr.ci_lo) {
        best = static_cast<int>(estimate.per_threshold.size());
      }
    }
    estimate.per_threshold.push_back(std::move(t));
  }
  if (best < 0) {
    estimate.degenerate = true;
    estimate.best_threshold = thresholds.front();
    return estimate;
  }
  const ThresholdEstimate& chosen = estimate.per_threshold[best];
  estimate.eps_lo = chosen.eps_lo;
  estimate.eps_hi = chosen.eps_hi;
  estimate.best_threshold = chosen.threshold;
  return estimate;
}

HeuristicReport ValidateHeuristic(const MechanismTrainer& trainer,
                                  const Dataset& dataset,
                                  const AuditConfig& config, int splits,
                                  std::span<const double> thresholds,
                                  RandomStream& stream, CiMethod method) {
  if (splits < 1 || config.num_canaries < splits ||
      config.num_canaries % splits != 0) {
    throw InputError("heuristic validation: splits must divide the canary "
                     "count");
  }
  HeuristicReport report;
  report.num_canaries = config.num_canaries;
  report.num_splits = splits;

  RandomStream single_stream = stream.Fork(kSingleRunStream);
  const Game3Result single = RunGame3(trainer, dataset, config, single_stream);
  report.single_run = EstimateEpsilon(single.canaries, thresholds, method);

  if (splits == 1) {
    report.split_runs = report.single_run;
    report.per_split = {report.single_run};
  } else {
    AuditConfig part = config;
    part.num_canaries = config.num_canaries / splits;
    std::vector<CanaryRecord> pooled;
    for (int k = 0; k < splits; ++k) {
      RandomStream split_stream = stream.Fork(kSplitRunStream + k);
      Game3Result run = RunGame3(trainer, dataset, part, split_stream);
      report.per_split.push_back(
          EstimateEpsilon(run.canaries, thresholds, method));
      pooled.insert(pooled.end(), run.canaries.begin(), run.canaries.end());
    }
    report.split_runs = EstimateEpsilon(pooled, thresholds, method);
  }
  report.overlap = report.single_run.eps_lo <= report.split_runs.eps_hi &&
                   report.split_runs.eps_lo <= report.single_run.eps_hi;
  return report;
}

nlohmann::json ToJson(const EpsilonEstimate& estimate) {
  nlohmann::json per = nlohmann::json::array();
  for (const ThresholdEstimate& t : estimate.per_threshold) {
    per.push_back({{"threshold", t.threshold},
                   {"acgr_mean", t.acgr.mean},
                   {"ci", {t.acgr.ci_lo, t.acgr.ci_hi}},
                   {"eps_ci", {t.eps_lo, t.eps_hi}},
                   {"guesses", t.acgr.total_guesses},
                   {"correct", t.acgr.correct_guesses},
                   {"degenerate", t.degenerate}});
  }
  return {{"eps_ci", {estimate.eps_lo, estimate.eps_hi}},
          {"best_threshold", estimate.best_threshold},
          {"ci_method", CiMethodName(estimate.method)},
          {"degenerate", estimate.degenerate},
          {"per_threshold", per}};
}

nlohmann::json AuditReportJson(int num_canaries,
                               std::span<const double> thresholds,
                               const EpsilonEstimate& estimate) {
  nlohmann::json report = ToJson(estimate);
  report["N"] = num_canaries;
  report["thresholds"] = std::vector<double>(thresholds.begin(),
                                             thresholds.end());
  report["erratum_note"] = kErratumNote;
  return report;
}

nlohmann::json ToJson(const HeuristicReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const EpsilonEstimate& e : report.per_split) per.push_back(ToJson(e));
  return {{"N", report.num_canaries},
          {"splits", report.num_splits},
          {"single_run", ToJson(report.single_run)},
          {"split_runs", ToJson(report.split_runs)},
          {"per_split", per},
          {"overlap", report.overlap},
          {"erratum_note", kErratumNote}};
}

std::string FormatCanaryCsv(std::span<const CanaryRecord> records,
                            double threshold) {
  std::string out =
      "canary,index,original_label,trained_label,alternative,secret_bit,"
      "trained_confidence,alternative_confidence,max_confidence,guess,"
      "correct\n";
  const std::vector<CanaryRecord> scored = ApplyThreshold(records, threshold);
  for (size_t i = 0; i < scored.size(); ++i) {
    const CanaryRecord& r = scored[i];
    for (size_t j = 0; j < r.alternatives.size(); ++j) {
      const double alt = r.alternative_confidences[j];
      out += std::to_string(i) + "," + std::to_string(r.index) + "," +
             std::to_string(r.original_label) + "," +
             std::to_string(r.trained_label) + "," +
             std::to_string(r.alternatives[j]) + "," +
             std::to_string(r.secret_bits[j]) + "," +
             FormatDouble(r.trained_confidence) + "," + FormatDouble(alt) +
             "," + FormatDouble(std::max(alt, r.trained_confidence)) + "," +
             GuessName(r.guesses[j]) + "," +
             (IsCorrect(r.secret_bits[j], r.guesses[j]) ? "1" : "0") + "\n";
    }
  }
  return out;
}

}  // namespace labeldp
