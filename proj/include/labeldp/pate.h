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

// Private aggregation of teacher ensembles under label DP.
//
// Teachers are trained on disjoint label partitions, so changing one label
// affects exactly one teacher. The student draws features (with replacement)
// from the unlabeled view of the data and keeps a query only if the noisy
// maximum vote count clears a threshold, labeling it with a separately
// noised argmax.

#ifndef LABELDP_PATE_H_
#define LABELDP_PATE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "labeldp/accounting.h"
#include "labeldp/core.h"
#include "labeldp/model.h"
#include "labeldp/random.h"

namespace labeldp {

struct PateConfig {
  int num_teachers = 5;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double threshold = 3.0;
  int student_samples = 100;
  ModelSpec model;
  TrainConfig teacher_train;
  TrainConfig student_train;
  double delta = 1e-5;
};

void ValidatePateConfig(const PateConfig& config);
nlohmann::json ToJson(const PateConfig& config);

struct VoteRecord {
  int64_t query_index = 0;
  // Row of the unlabeled pool that was queried.
  int64_t example_index = 0;
  std::vector<int> votes;
  bool answered = false;
  std::optional<int> answer;

  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

nlohmann::json ToJson(const VoteRecord& record);
VoteRecord VoteRecordFromJson(const nlohmann::json& json);
// One JSON object per line.
std::string FormatVoteTranscript(std::span<const VoteRecord> records);
std::vector<VoteRecord> ParseVoteTranscript(const std::string& text);
// Ledger reconstructed from a transcript, for offline re-accounting.
PateLedger LedgerFromTranscript(std::span<const VoteRecord> records,
                                double sigma1, double sigma2);

// Random disjoint partition into `num_teachers` parts whose sizes differ by
// at most one. Depends only on the dataset size and the stream.
std::vector<Dataset> Partition(const Dataset& dataset, int num_teachers,
                               RandomStream& stream);

// Trains one teacher from its labeled partition. The full unlabeled pool is
// passed along for semi-supervised trainers; the default ignores it.
using TeacherTrainer = std::function<Model(
    const Dataset& labeled, const UnlabeledPool& unlabeled,
    const ModelSpec& spec, const TrainConfig& config)>;

// Plain supervised training on the labeled partition.
TeacherTrainer SupervisedTeacherTrainer();

// Teacher i sees only partition i and trains with seed teacher_train.seed + i.
std::vector<Model> TrainTeachers(const Dataset& dataset,
                                 const PateConfig& config,
                                 RandomStream& stream,
                                 const TeacherTrainer& trainer =
                                     SupervisedTeacherTrainer());

// Histogram of teacher argmax votes on `x`.
std::vector<int> TallyVotes(std::span<const Model> teachers,
                            std::span<const double> x);

// Answers argmax_i(votes_i + N(0, sigma2^2)) if
// max_i(votes_i + N(0, sigma1^2)) >= threshold, else nullopt. The two steps
// use independent noise draws. Noise ties break to the lowest class.
std::optional<int> NoisyAggregate(std::span<const int> votes, double sigma1,
                                  double sigma2, double threshold,
                                  RandomStream& stream);

VoteRecord NoisyVote(std::span<const Model> teachers,
                     std::span<const double> x, double sigma1, double sigma2,
                     double threshold, RandomStream& stream);

struct StudentResult {
  Model student;
  PateLedger ledger;
  std::vector<VoteRecord> votes;
};

// Queries the teachers on uniform samples of `pool` until
// config.student_samples answers are collected, then trains the student on
// the answered pairs. Never sees true labels. Throws TrainingError after
// 10^4 * student_samples consecutive abstentions.
StudentResult TrainStudent(const UnlabeledPool& pool, int num_classes,
                           std::span<const Model> teachers,
                           const PateConfig& config, RandomStream& stream);

struct PateResult {
  Model student;
  PrivacyBudget budget;
  PateLedger ledger;
  std::vector<VoteRecord> votes;
  std::vector<Model> teachers;
};

PateResult PateTrain(const Dataset& dataset, const PateConfig& config,
                     RandomStream& stream,
                     const TeacherTrainer& trainer = SupervisedTeacherTrainer());

}  // namespace labeldp

#endif  // LABELDP_PATE_H_
