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

#include "labeldp/pate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "labeldp/status.h"

namespace labeldp {
namespace {

constexpr uint64_t kPartitionStream = 1;
constexpr uint64_t kTeacherStream = 2;
constexpr uint64_t kQueryStream = 3;
constexpr int64_t kAbstentionsPerSample = 10000;

}  // namespace

void ValidatePateConfig(const PateConfig& config) {
  if (config.num_teachers < 1) throw InputError("PATE: need >= 1 teacher");
  if (config.student_samples < 1) {
    throw InputError("PATE: student_samples must be >= 1");
  }
  if (!(config.sigma1 >= 0.0) || !(config.sigma2 >= 0.0)) {
    throw InputError("PATE: sigmas must be >= 0");
  }
  if (!std::isfinite(config.threshold)) {
    throw InputError("PATE: threshold must be finite");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw InputError("PATE: delta must lie in (0, 1)");
  }
  ValidateTrainConfig(config.teacher_train);
  ValidateTrainConfig(config.student_train);
}

nlohmann::json ToJson(const PateConfig& config) {
  return {{"num_teachers", config.num_teachers},
          {"sigma1", config.sigma1},
          {"sigma2", config.sigma2},
          {"threshold", config.threshold},
          {"student_samples", config.student_samples},
          {"model", ToJson(config.model)},
          {"teacher_train", ToJson(config.teacher_train)},
          {"student_train", ToJson(config.student_train)},
          {"delta", config.delta}};
}

nlohmann::json ToJson(const VoteRecord& record) {
  nlohmann::json j = {{"query_index", record.query_index},
                      {"example_index", record.example_index},
                      {"votes", record.votes},
                      {"answered", record.answered}};
  j["answer"] = record.answer ? nlohmann::json(*record.answer) : nullptr;
  return j;
}

VoteRecord VoteRecordFromJson(const nlohmann::json& json) {
  VoteRecord r;
  r.query_index = json.at("query_index").get<int64_t>();
  r.example_index = json.at("example_index").get<int64_t>();
  r.votes = json.at("votes").get<std::vector<int>>();
  r.answered = json.at("answered").get<bool>();
  if (!json.at("answer").is_null()) r.answer = json.at("answer").get<int>();
  if (r.answered != r.answer.has_value()) {
    throw ParseError("vote record: answered flag disagrees with answer", 0);
  }
  return r;
}

std::string FormatVoteTranscript(std::span<const VoteRecord> records) {
  std::string out;
  for (const VoteRecord& r : records) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<VoteRecord> ParseVoteTranscript(const std::string& text) {
  std::vector<VoteRecord> records;
  size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(VoteRecordFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return records;
}

PateLedger LedgerFromTranscript(std::span<const VoteRecord> records,
                                double sigma1, double sigma2) {
  PateLedger ledger;
  ledger.sigma1 = sigma1;
  ledger.sigma2 = sigma2;
  ledger.queries_sampled = static_cast<int64_t>(records.size());
  for (const VoteRecord& r : records) {
    if (r.answered) ++ledger.queries_answered;
  }
  return ledger;
}

std::vector<Dataset> Partition(const Dataset& dataset, int num_teachers,
                               RandomStream& stream) {
  if (num_teachers < 1) throw InputError("Partition: need >= 1 part");
  if (static_cast<size_t>(num_teachers) > dataset.size()) {
    throw InputError("Partition: more teachers (" +
                     std::to_string(num_teachers) + ") than examples (" +
                     std::to_string(dataset.size()) + ")");
  }
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  stream.Shuffle(std::span<size_t>(order));
  std::vector<Dataset> parts;
  parts.reserve(num_teachers);
  const size_t n = dataset.size();
  for (int t = 0; t < num_teachers; ++t) {
    const size_t begin = n * t / num_teachers;
    const size_t end = n * (t + 1) / num_teachers;
    std::vector<size_t> indices(order.begin() + begin, order.begin() + end);
    std::sort(indices.begin(), indices.end());
    parts.push_back(dataset.Subset(indices));
  }
  return parts;
}

TeacherTrainer SupervisedTeacherTrainer() {
  return [](const Dataset& labeled, const UnlabeledPool&,
            const ModelSpec& spec, const TrainConfig& config) {
    return TrainSupervised(labeled, spec, config);
  };
}

std::vector<Model> TrainTeachers(const Dataset& dataset,
                                 const PateConfig& config,
                                 RandomStream& stream,
                                 const TeacherTrainer& trainer) {
  ValidatePateConfig(config);
  RandomStream partition_stream = stream.Fork(kPartitionStream);
  const std::vector<Dataset> parts =
      Partition(dataset, config.num_teachers, partition_stream);
  const UnlabeledPool pool = dataset.Unlabeled();
  std::vector<Model> teachers;
  teachers.reserve(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    TrainConfig train = config.teacher_train;
    train.seed = config.teacher_train.seed + i;
    teachers.push_back(trainer(parts[i], pool, config.model, train));
  }
  return teachers;
}

std::vector<int> TallyVotes(std::span<const Model> teachers,
                            std::span<const double> x) {
  if (teachers.empty()) throw InputError("TallyVotes: no teachers");
  std::vector<int> votes(teachers.front().spec().num_classes, 0);
  for (const Model& teacher : teachers) {
    const int label = teacher.PredictLabel(x);
    if (label >= static_cast<int>(votes.size())) {
      throw InputError("TallyVotes: teachers disagree on class count");
    }
    ++votes[label];
  }
  return votes;
}

std::optional<int> NoisyAggregate(std::span<const int> votes, double sigma1,
                                  double sigma2, double threshold,
                                  RandomStream& stream) {
  if (votes.empty()) throw InputError("NoisyAggregate: empty histogram");
  double noisy_max = -std::numeric_limits<double>::infinity();
  for (int v : votes) {
    noisy_max = std::max(noisy_max, v + stream.Gaussian(0.0, sigma1));
  }
  if (noisy_max < threshold) return std::nullopt;
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < votes.size(); ++i) {
    const double value = votes[i] + stream.Gaussian(0.0, sigma2);
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(i);
    }
  }
  return best;
}

VoteRecord NoisyVote(std::span<const Model> teachers,
                     std::span<const double> x, double sigma1, double sigma2,
                     double threshold, RandomStream& stream) {
  VoteRecord record;
  record.votes = TallyVotes(teachers, x);
  record.answer = NoisyAggregate(record.votes, sigma1, sigma2, threshold,
                                 stream);
  record.answered = record.answer.has_value();
  return record;
}

StudentResult TrainStudent(const UnlabeledPool& pool, int num_classes,
                           std::span<const Model> teachers,
                           const PateConfig& config, RandomStream& stream) {
  ValidatePateConfig(config);
  if (pool.size() == 0) throw InputError("TrainStudent: empty pool");
  StudentResult result{Model::Zeros(config.model), {}, {}};
  result.ledger.sigma1 = config.sigma1;
  result.ledger.sigma2 = config.sigma2;

  std::vector<std::vector<double>> features;
  std::vector<LabelDistribution> targets;
  const int64_t max_abstentions =
      kAbstentionsPerSample * static_cast<int64_t>(config.student_samples);
  int64_t consecutive_abstentions = 0;
  while (static_cast<int>(targets.size()) < config.student_samples) {
    const size_t row = stream.UniformIndex(pool.size());
    VoteRecord record = NoisyVote(teachers, pool.rows[row], config.sigma1,
                                  config.sigma2, config.threshold, stream);
    record.query_index = result.ledger.queries_sampled;
    record.example_index = static_cast<int64_t>(row);
    ++result.ledger.queries_sampled;
    if (record.answered) {
      ++result.ledger.queries_answered;
      consecutive_abstentions = 0;
      features.push_back(pool.rows[row]);
      targets.push_back(LabelDistribution::PointMass(*record.answer,
                                                     num_classes));
    } else if (++consecutive_abstentions >= max_abstentions) {
      throw TrainingError(
          "PATE student: " + std::to_string(consecutive_abstentions) +
          " consecutive abstentions; threshold " +
          std::to_string(config.threshold) + " is unreachable for " +
          std::to_string(teachers.size()) + " teachers at this noise level");
    }
    result.votes.push_back(std::move(record));
  }
  result.student =
      TrainSupervised(features, targets, config.model, config.student_train);
  return result;
}

PateResult PateTrain(const Dataset& dataset, const PateConfig& config,
                     RandomStream& stream, const TeacherTrainer& trainer) {
  ValidatePateConfig(config);
  if (config.model.num_classes != dataset.num_classes()) {
    throw ConfigError("model class count does not match the dataset");
  }
  RandomStream teacher_stream = stream.Fork(kTeacherStream);
  std::vector<Model> teachers =
      TrainTeachers(dataset, config, teacher_stream, trainer);
  RandomStream query_stream = stream.Fork(kQueryStream);
  StudentResult student =
      TrainStudent(dataset.Unlabeled(), dataset.num_classes(), teachers,
                   config, query_stream);
  PateResult result{std::move(student.student),
                    PateBudget(student.ledger, config.delta),
                    student.ledger, std::move(student.votes),
                    std::move(teachers)};
  return result;
}

}  // namespace labeldp
