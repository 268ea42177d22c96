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

// Command line front end.
//
//   labeldp gen-data --classes 10 --dim 20 --n 2000 --sep 8 --seed 1 -o d.csv
//   labeldp train --method alibi --lambda 2 --seed 1 --out runs/a
//   labeldp audit --method alibi --lambda 1 --canaries 200 --out runs/b
//   labeldp account --mechanism gaussian --sigma 1.4142 --delta 0.05
//
// Every subcommand accepts --config FILE.json whose keys are long flag names;
// flags given on the command line win over the file.

#ifndef LABELDP_TOOLS_CLI_H_
#define LABELDP_TOOLS_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cli_pool.h"
#include "json.hpp"
#include "labeldp/accounting.h"
#include "labeldp/alibi.h"
#include "labeldp/audit.h"
#include "labeldp/core.h"
#include "labeldp/model.h"
#include "labeldp/pate.h"
#include "labeldp/random.h"

namespace labeldp::cli {

inline constexpr char kOutputDirEnv[] = "LABELDP_OUTPUT_DIR";
inline constexpr char kDefaultOutputDir[] = "labeldp_out";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitRuntime = 3 };

enum class Method { kAlibi, kAgibi, kPate, kRandomizedResponse, kSupervised };
std::string MethodName(Method method);
Method ParseMethod(const std::string& name);

struct DataOptions {
  // Empty means a synthetic Gaussian mixture.
  std::string csv;
  bool header = false;
  // Declared class count for CSV data; inferred from labels when unset.
  std::optional<int> csv_classes;
  int classes = 10;
  int dim = 20;
  int n = 2000;
  double sep = 8.0;
  uint64_t data_seed = 0;
  // Examples held out for testing; negative means a quarter of the data.
  int holdout = -1;
};

struct MethodOptions {
  Method method = Method::kAlibi;
  double lambda = 1.0;
  double sigma = 1.0;
  double delta = 1e-5;
  double epsilon = 1.0;
  PosteriorKind posterior = PosteriorKind::kLaplaceBayes;
  int teachers = 5;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double tau = 3.0;
  int samples = 100;
  ModelSpec model;
  TrainConfig train;
};

void ValidateMethodOptions(const MethodOptions& options);
nlohmann::json ToJson(const MethodOptions& options);

struct MethodRun {
  Model model;
  PrivacyReport privacy;
  std::vector<EpochMetrics> history;
  std::vector<VoteRecord> votes;
};

// Trains `options.method` on `train`. Mechanism noise comes from `stream`;
// initialization and shuffling from options.train.seed.
MethodRun TrainMethod(const MethodOptions& options, const Dataset& train,
                      RandomStream& stream, const Dataset* test = nullptr);

// The method as a mechanism under audit. Each call draws its training seed
// from the stream it is given.
MechanismTrainer MakeMechanismTrainer(const MethodOptions& options);

PrivacyReport TheoreticalPrivacy(const MethodOptions& options);

// Loads the CSV or generates the mixture and splits off the holdout.
std::pair<Dataset, Dataset> LoadExperimentData(const DataOptions& options);

// Removes fields that legitimately vary between identical invocations.
nlohmann::json StripVolatile(nlohmann::json payload);

// Directory from --out, else $LABELDP_OUTPUT_DIR, else ./labeldp_out.
std::string ResolveOutputDir(const std::string& flag);

// Entry point. `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace labeldp::cli

#endif  // LABELDP_TOOLS_CLI_H_
