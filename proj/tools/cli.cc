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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "labeldp/io.h"
#include "labeldp/mechanisms.h"
#include "labeldp/postproc.h"
#include "labeldp/status.h"

namespace labeldp::cli {
namespace {

constexpr uint64_t kDataStream = 0x64617461;   // "data"
constexpr uint64_t kNoiseStream = 0x6e6f6973;  // "nois"
constexpr uint64_t kModelStream = 0x6d6f646c;  // "modl"
constexpr uint64_t kAuditStream = 0x61756469;  // "audi"

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace fs = std::filesystem;

// Reads --config files as flat JSON objects keyed by long flag names of the
// selected subcommand.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json json;
    try {
      input >> json;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") +
                        e.what());
    }
    if (!json.is_object()) throw ConfigError("config file must be an object");
    std::vector<std::string> parents;
    for (const CLI::App* sub : root_->get_subcommands()) {
      parents.push_back(sub->get_name());
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : json.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_object()) {
        throw ConfigError("config key '" + key + "' must not be an object");
      }
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(key, v));
      } else {
        item.inputs.push_back(Scalar(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string Scalar(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ConfigError("config key '" + key + "' has an unsupported value");
  }

  const CLI::App* root_;
};

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

void WriteJson(const fs::path& path, const nlohmann::json& json) {
  WriteFileAtomic(path.string(), json.dump(2) + "\n");
}

std::string Join(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

Model InitModel(const ModelSpec& spec, uint64_t seed) {
  RandomStream stream(seed, kModelStream);
  return Model::Initialize(spec, stream);
}

// Supervised fit on fixed targets, recording per-epoch accuracies.
Model FitRecorded(const Dataset& train, std::vector<LabelDistribution> targets,
                  const ModelSpec& spec, const TrainConfig& config,
                  const Dataset* test, std::vector<EpochMetrics>* history,
                  const Dataset* accuracy_reference) {
  std::vector<std::vector<double>> features;
  features.reserve(train.size());
  for (const Example& e : train.examples()) features.push_back(e.features);
  auto target = [&](size_t i, const Model&) { return targets[i]; };
  EpochFn record = nullptr;
  if (history != nullptr) {
    record = [&](int epoch, const Model& model, double loss) {
      EpochMetrics m;
      m.epoch = epoch;
      m.train_loss = loss;
      m.train_accuracy = Evaluate(model, *accuracy_reference);
      if (test != nullptr) m.test_accuracy = Evaluate(model, *test);
      history->push_back(m);
    };
  }
  return Fit(InitModel(spec, config.seed), features, target, config, record);
}

AlibiConfig ToAlibiConfig(const MethodOptions& o) {
  AlibiConfig c;
  c.noise = o.method == Method::kAlibi ? NoiseFamily::kLaplace
                                       : NoiseFamily::kGaussian;
  c.noise_param = o.method == Method::kAlibi ? o.lambda : o.sigma;
  c.posterior = o.posterior;
  c.model = o.model;
  c.train = o.train;
  c.delta = o.delta;
  return c;
}

PateConfig ToPateConfig(const MethodOptions& o) {
  PateConfig c;
  c.num_teachers = o.teachers;
  c.sigma1 = o.sigma1;
  c.sigma2 = o.sigma2;
  c.threshold = o.tau;
  c.student_samples = o.samples;
  c.model = o.model;
  c.teacher_train = o.train;
  c.student_train = o.train;
  c.delta = o.delta;
  return c;
}

PrivacyReport PatePrivacy(const PateLedger& ledger, double delta) {
  PrivacyReport report;
  report.method = "pate-data-independent-rdp";
  report.curve = PateRdpCurve(ledger);
  report.budget = PateBudget(ledger, delta);
  report.ledger = ToJson(ledger);
  if (std::isfinite(report.budget.epsilon)) {
    report.ledger["best_order"] =
        EpsilonFromRdp(report.curve, delta).best_order;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Option plumbing shared by train, audit and validate-heuristic.

struct ExperimentFlags {
  DataOptions data;
  MethodOptions method;
  std::string method_name = "alibi";
  std::string posterior_name = "auto";
  std::string arch_name = "linear";
  uint64_t seed = 0;
  std::optional<uint64_t> data_seed;
  std::string out;
  std::map<std::string, CLI::Option*> options;
};

const std::map<Method, std::set<std::string>>& MethodParams() {
  static const auto* kParams = new std::map<Method, std::set<std::string>>{
      {Method::kAlibi, {"lambda", "posterior"}},
      {Method::kAgibi, {"sigma", "delta", "posterior"}},
      {Method::kPate,
       {"teachers", "sigma1", "sigma2", "tau", "samples", "delta"}},
      {Method::kRandomizedResponse, {"epsilon"}},
      {Method::kSupervised, {}},
  };
  return *kParams;
}

const std::set<std::string>& AllMethodParams() {
  static const auto* kAll = new std::set<std::string>{
      "lambda", "sigma",  "delta", "epsilon", "posterior", "teachers",
      "sigma1", "sigma2", "tau",   "samples"};
  return *kAll;
}

void AddExperimentFlags(CLI::App* app, ExperimentFlags& f) {
  auto add = [&](const std::string& name, auto& target,
                 const std::string& help) {
    f.options[name] = app->add_option("--" + name, target, help);
    return f.options[name];
  };
  add("data", f.data.csv, "CSV dataset (default: synthetic mixture)");
  f.options["header"] =
      app->add_flag("--header", f.data.header, "CSV has a header row");
  add("classes", f.data.classes, "Number of classes")->capture_default_str();
  add("dim", f.data.dim, "Feature dimension (synthetic)")
      ->capture_default_str();
  add("n", f.data.n, "Number of examples (synthetic)")->capture_default_str();
  add("sep", f.data.sep, "Mixture separation (synthetic)")
      ->capture_default_str();
  add("data-seed", f.data_seed, "Seed for synthetic data (default: --seed)");
  add("holdout", f.data.holdout, "Held-out test examples (default: n / 4)");
  add("method", f.method_name, "alibi | agibi | pate | rr | supervised")
      ->capture_default_str();
  add("lambda", f.method.lambda, "Laplace scale")->capture_default_str();
  add("sigma", f.method.sigma, "Gaussian stddev")->capture_default_str();
  add("delta", f.method.delta, "Target delta")->capture_default_str();
  add("epsilon", f.method.epsilon, "Randomized response epsilon")
      ->capture_default_str();
  add("posterior", f.posterior_name,
      "auto | laplace | gaussian | min-projection | identity")
      ->capture_default_str();
  add("teachers", f.method.teachers, "PATE teachers")->capture_default_str();
  add("sigma1", f.method.sigma1, "PATE threshold noise")
      ->capture_default_str();
  add("sigma2", f.method.sigma2, "PATE argmax noise")->capture_default_str();
  add("tau", f.method.tau, "PATE vote threshold")->capture_default_str();
  add("samples", f.method.samples, "PATE answered student queries")
      ->capture_default_str();
  add("arch", f.arch_name, "linear | mlp")->capture_default_str();
  add("hidden", f.method.model.hidden, "MLP hidden width (default 64)");
  add("epochs", f.method.train.epochs, "Training epochs")
      ->capture_default_str();
  add("batch", f.method.train.batch_size, "Batch size")->capture_default_str();
  add("lr", f.method.train.learning_rate, "Learning rate")
      ->capture_default_str();
  add("momentum", f.method.train.momentum, "SGD momentum")
      ->capture_default_str();
  add("weight-decay", f.method.train.weight_decay, "L2 weight decay")
      ->capture_default_str();
  add("seed", f.seed, "Master seed")->capture_default_str();
  app->add_option("--out,-o", f.out, "Output directory");
}

// Fills derived fields and rejects flags that do not belong to the method.
void ResolveExperiment(ExperimentFlags& f) {
  f.method.method = ParseMethod(f.method_name);
  const std::set<std::string>& allowed = MethodParams().at(f.method.method);
  for (const std::string& name : AllMethodParams()) {
    if (f.options.at(name)->count() > 0 && !allowed.contains(name)) {
      throw ConfigError("--" + name + " does not apply to --method " +
                        f.method_name);
    }
  }
  if (f.posterior_name == "auto") {
    f.method.posterior = f.method.method == Method::kAgibi
                             ? PosteriorKind::kGaussianBayes
                             : PosteriorKind::kLaplaceBayes;
  } else {
    f.method.posterior = ParsePosteriorKind(f.posterior_name);
  }
  f.method.model.architecture = ParseArchitecture(f.arch_name);
  if (f.method.model.architecture == Architecture::kMlp) {
    if (f.options.at("hidden")->count() == 0) f.method.model.hidden = 64;
  } else if (f.options.at("hidden")->count() > 0) {
    throw ConfigError("--hidden applies to --arch mlp only");
  } else {
    f.method.model.hidden = 0;
  }
  f.data.data_seed = f.data_seed.value_or(f.seed);
  f.method.train.seed = f.seed;
  if (!f.data.csv.empty()) {
    if (f.options.at("classes")->count() > 0) {
      f.data.csv_classes = f.data.classes;
    }
    for (const char* name : {"dim", "n", "sep", "data-seed"}) {
      if (f.options.at(name)->count() > 0) {
        throw ConfigError(std::string("--") + name +
                          " applies to synthetic data only");
      }
    }
  } else if (f.options.at("header")->count() > 0) {
    throw ConfigError("--header applies to --data only");
  }
}

// Flat config object that reproduces the run when passed back via --config.
nlohmann::json ResolvedConfig(const ExperimentFlags& f, int holdout) {
  nlohmann::json c;
  if (!f.data.csv.empty()) {
    c["data"] = f.data.csv;
    c["header"] = f.data.header;
    if (f.options.at("classes")->count() > 0) c["classes"] = f.data.classes;
  } else {
    c["classes"] = f.data.classes;
    c["dim"] = f.data.dim;
    c["n"] = f.data.n;
    c["sep"] = f.data.sep;
    c["data-seed"] = f.data.data_seed;
  }
  c["holdout"] = holdout;
  c["method"] = MethodName(f.method.method);
  const MethodOptions& m = f.method;
  const std::set<std::string>& allowed = MethodParams().at(m.method);
  const nlohmann::json values = {
      {"lambda", m.lambda},     {"sigma", m.sigma},
      {"delta", m.delta},       {"epsilon", m.epsilon},
      {"posterior", PosteriorKindName(m.posterior)},
      {"teachers", m.teachers}, {"sigma1", m.sigma1},
      {"sigma2", m.sigma2},     {"tau", m.tau},
      {"samples", m.samples}};
  for (const std::string& name : allowed) c[name] = values.at(name);
  c["arch"] = ArchitectureName(m.model.architecture);
  if (m.model.architecture == Architecture::kMlp) c["hidden"] = m.model.hidden;
  c["epochs"] = m.train.epochs;
  c["batch"] = m.train.batch_size;
  c["lr"] = m.train.learning_rate;
  c["momentum"] = m.train.momentum;
  c["weight-decay"] = m.train.weight_decay;
  c["seed"] = f.seed;
  return c;
}

struct Experiment {
  Dataset train;
  Dataset test;
  nlohmann::json config;
};

Experiment PrepareExperiment(ExperimentFlags& f) {
  ResolveExperiment(f);
  auto [train, test] = LoadExperimentData(f.data);
  f.method.model.input_dim = train.dim();
  f.method.model.num_classes = train.num_classes();
  ValidateMethodOptions(f.method);
  nlohmann::json config = ResolvedConfig(f, static_cast<int>(test.size()));
  return {std::move(train), std::move(test), std::move(config)};
}

// ---------------------------------------------------------------------------
// Subcommands.

struct Context {
  std::ostream& out;
  std::ostream& err;
};

void SetupGenData(CLI::App& root, Context& ctx,
                  std::function<void()>& action) {
  CLI::App* sub =
      root.add_subcommand("gen-data", "Generate a Gaussian mixture dataset");
  struct Flags {
    int classes = 0;
    int dim = 0;
    int n = 0;
    double sep = 8.0;
    uint64_t seed = 0;
    bool header = false;
    std::string output;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--classes", f->classes, "Number of classes")->required();
  sub->add_option("--dim", f->dim, "Feature dimension")->required();
  sub->add_option("--n", f->n, "Number of examples")->required();
  sub->add_option("--sep", f->sep, "Separation of class means")
      ->capture_default_str();
  sub->add_option("--seed", f->seed, "Seed")->capture_default_str();
  sub->add_flag("--header", f->header, "Write a header row");
  sub->add_option("-o,--output", f->output, "Output CSV path")->required();
  sub->callback([f, &ctx, &action] {
    action = [f, &ctx] {
      RandomStream stream(f->seed, kDataStream);
      const Dataset data =
          GenerateMixture(f->classes, f->dim, f->n, f->sep, stream);
      WriteCsv(f->output, data, f->header);
      const nlohmann::json sidecar = {{"classes", f->classes},
                                      {"dim", f->dim},
                                      {"n", f->n},
                                      {"sep", f->sep},
                                      {"seed", f->seed},
                                      {"header", f->header}};
      WriteJson(f->output + ".json", sidecar);
      ctx.out << "wrote " << data.size() << " rows to " << f->output << "\n";
    };
  });
}

void SetupTrain(CLI::App& root, Context& ctx, std::function<void()>& action) {
  CLI::App* sub = root.add_subcommand("train", "Train with a label-DP method");
  auto f = std::make_shared<ExperimentFlags>();
  AddExperimentFlags(sub, *f);
  sub->callback([f, &ctx, &action] {
    action = [f, &ctx] {
      Experiment exp = PrepareExperiment(*f);
      const fs::path dir = ResolveOutputDir(f->out);
      RandomStream stream(f->seed, kNoiseStream);
      MethodRun run = TrainMethod(f->method, exp.train, stream, &exp.test);

      nlohmann::json loss = nlohmann::json::array();
      nlohmann::json train_acc = nlohmann::json::array();
      nlohmann::json test_acc = nlohmann::json::array();
      for (const EpochMetrics& m : run.history) {
        loss.push_back(m.train_loss);
        train_acc.push_back(m.train_accuracy);
        test_acc.push_back(m.test_accuracy);
      }
      nlohmann::json manifest;
      manifest["config"] = exp.config;
      manifest["seed"] = f->seed;
      manifest["accuracy"] = {{"epoch_train_loss", loss},
                              {"epoch_train_accuracy", train_acc},
                              {"epoch_test_accuracy", test_acc},
                              {"final_train", Evaluate(run.model, exp.train)},
                              {"final_test", exp.test.empty()
                                                 ? nlohmann::json(nullptr)
                                                 : nlohmann::json(Evaluate(
                                                       run.model, exp.test))}};
      manifest["privacy"] = ToJson(run.privacy);
      manifest["epsilon_is_infinite"] = std::isinf(run.privacy.budget.epsilon);
      manifest["checkpoint"] = "model.json";
      if (f->method.method == Method::kPate) {
        manifest["vote_transcript"] = "votes.jsonl";
        WriteFileAtomic(Join(dir, "votes.jsonl"),
                        FormatVoteTranscript(run.votes));
      }
      manifest["created_at"] = Timestamp();
      SaveCheckpoint(run.model, Join(dir, "model.json"),
                     Join(dir, "model.bin"));
      WriteJson(dir / "manifest.json", manifest);
      ctx.out << MethodName(f->method.method) << ": test accuracy "
              << manifest["accuracy"]["final_test"].dump() << ", epsilon "
              << EncodeReal(run.privacy.budget.epsilon).dump() << ", delta "
              << run.privacy.budget.delta << "\n"
              << "wrote " << (dir / "manifest.json").string() << "\n";
    };
  });
}

struct AuditFlags {
  ExperimentFlags exp;
  int canaries = 0;
  int alternatives = 0;
  std::string mode = "all";
  double threshold = 0.5;
  std::vector<double> thresholds = DefaultThresholds();
  std::string ci = "weighted-normal";
  int repetitions = 1;
  int jobs = 1;
  bool validate = false;
  int splits = 4;
};

void AddAuditFlags(CLI::App* sub, AuditFlags& f, bool validate_only) {
  AddExperimentFlags(sub, f.exp);
  sub->add_option("--canaries", f.canaries, "Canaries per training run")
      ->required();
  sub->add_option("--alternatives", f.alternatives,
                  "Alternatives per canary (default C - 2)");
  sub->add_option("--mode", f.mode, "all | single")->capture_default_str();
  sub->add_option("--threshold", f.threshold,
                  "Confidence threshold for the canary CSV")
      ->capture_default_str();
  sub->add_option("--thresholds", f.thresholds, "Threshold sweep")
      ->delimiter(',');
  sub->add_option("--ci", f.ci, "weighted-normal | clopper-pearson")
      ->capture_default_str();
  sub->add_option("--splits", f.splits, "Runs to split the canaries over")
      ->capture_default_str();
  if (!validate_only) {
    sub->add_option("--repetitions", f.repetitions,
                    "Independent audit repetitions")
        ->capture_default_str();
    sub->add_option("--jobs", f.jobs, "Worker threads for repetitions")
        ->capture_default_str();
    sub->add_flag("--validate-heuristic", f.validate,
                  "Compare one run against --splits smaller runs");
  } else {
    f.validate = true;
  }
}

AuditConfig ToAuditConfig(const AuditFlags& f) {
  AuditConfig c;
  c.num_canaries = f.canaries;
  c.num_alternatives = f.alternatives;
  if (f.mode == "all") {
    c.mode = CanaryMode::kAllAlternatives;
  } else if (f.mode == "single") {
    c.mode = CanaryMode::kSingleAlternative;
    c.num_alternatives = 1;
  } else {
    throw ConfigError("--mode must be 'all' or 'single'");
  }
  c.threshold = f.threshold;
  return c;
}

void RunAudit(AuditFlags& f, Context& ctx) {
  Experiment exp = PrepareExperiment(f.exp);
  if (exp.train.num_classes() < 3) {
    throw InputError("auditing needs at least 3 classes");
  }
  if (f.canaries < 1) throw InputError("--canaries must be >= 1");
  if (f.repetitions < 1) throw InputError("--repetitions must be >= 1");
  if (f.thresholds.empty()) throw InputError("--thresholds is empty");
  const CiMethod ci = ParseCiMethod(f.ci);
  const AuditConfig audit = ToAuditConfig(f);
  const MechanismTrainer trainer = MakeMechanismTrainer(f.exp.method);
  const fs::path dir = ResolveOutputDir(f.exp.out);

  nlohmann::json config = exp.config;
  config["canaries"] = f.canaries;
  config["alternatives"] = audit.num_alternatives > 0
                               ? audit.num_alternatives
                               : exp.train.num_classes() - 2;
  config["mode"] = f.mode;
  config["threshold"] = f.threshold;
  config["thresholds"] = f.thresholds;
  config["ci"] = f.ci;
  nlohmann::json theoretical = nullptr;
  if (f.exp.method.method != Method::kPate) {
    theoretical = ToJson(TheoreticalPrivacy(f.exp.method));
  }

  const RandomStream root(f.exp.seed, kAuditStream);
  if (f.validate) {
    config["splits"] = f.splits;
    RandomStream stream = root;
    const HeuristicReport report = ValidateHeuristic(
        trainer, exp.train, audit, f.splits, f.thresholds, stream, ci);
    nlohmann::json out = ToJson(report);
    out["config"] = config;
    out["theoretical"] = theoretical;
    out["created_at"] = Timestamp();
    WriteJson(dir / "heuristic_report.json", out);
    ctx.out << "single run eps_ci [" << report.single_run.eps_lo << ", "
            << report.single_run.eps_hi << "], " << f.splits
            << " runs eps_ci [" << report.split_runs.eps_lo << ", "
            << report.split_runs.eps_hi << "], overlap "
            << (report.overlap ? "yes" : "no") << "\n";
    return;
  }

  config["repetitions"] = f.repetitions;
  std::vector<Game3Result> runs = RunPool<Game3Result>(
      f.repetitions, f.jobs, [&](int r) {
        RandomStream stream = root.Fork(static_cast<uint64_t>(r));
        return RunGame3(trainer, exp.train, audit, stream);
      });
  std::vector<EpsilonEstimate> estimates;
  for (const Game3Result& run : runs) {
    estimates.push_back(EstimateEpsilon(run.canaries, f.thresholds, ci));
  }
  nlohmann::json report =
      AuditReportJson(f.canaries, f.thresholds, estimates.front());
  if (f.repetitions > 1) {
    nlohmann::json reps = nlohmann::json::array();
    for (const EpsilonEstimate& e : estimates) {
      reps.push_back({{"eps_ci", {e.eps_lo, e.eps_hi}},
                      {"best_threshold", e.best_threshold},
                      {"degenerate", e.degenerate}});
    }
    report["repetitions"] = reps;
  }
  report["config"] = config;
  report["theoretical"] = theoretical;
  report["created_at"] = Timestamp();
  WriteJson(dir / "audit_report.json", report);
  for (size_t r = 0; r < runs.size(); ++r) {
    const std::string name =
        runs.size() == 1 ? "canaries.csv"
                         : "canaries_" + std::to_string(r) + ".csv";
    WriteFileAtomic(Join(dir, name),
                    FormatCanaryCsv(runs[r].canaries, f.threshold));
  }
  for (size_t r = 0; r < estimates.size(); ++r) {
    ctx.out << "repetition " << r << ": eps_ci [" << estimates[r].eps_lo
            << ", " << estimates[r].eps_hi << "] at threshold "
            << estimates[r].best_threshold << "\n";
  }
  ctx.out << "wrote " << (dir / "audit_report.json").string() << "\n";
}

void SetupAudit(CLI::App& root, Context& ctx, std::function<void()>& action) {
  CLI::App* sub =
      root.add_subcommand("audit", "Estimate empirical epsilon with canaries");
  auto f = std::make_shared<AuditFlags>();
  AddAuditFlags(sub, *f, false);
  sub->callback([f, &ctx, &action] { action = [f, &ctx] { RunAudit(*f, ctx); }; });

  CLI::App* validate = root.add_subcommand(
      "validate-heuristic", "Compare one N-canary run with smaller runs");
  auto g = std::make_shared<AuditFlags>();
  AddAuditFlags(validate, *g, true);
  validate->callback(
      [g, &ctx, &action] { action = [g, &ctx] { RunAudit(*g, ctx); }; });
}

void SetupAccount(CLI::App& root, Context& ctx,
                  std::function<void()>& action) {
  CLI::App* sub = root.add_subcommand(
      "account", "Privacy accounting without training");
  struct Flags {
    std::string mechanism;
    std::optional<double> lambda;
    std::optional<double> sigma;
    std::optional<double> epsilon;
    double delta = 1e-5;
    std::optional<int64_t> sampled;
    std::optional<int64_t> answered;
    std::optional<double> sigma1;
    std::optional<double> sigma2;
    std::string votes;
    std::string out;
    CLI::Option* delta_opt = nullptr;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--mechanism", f->mechanism, "laplace | gaussian | pate | rr")
      ->required();
  sub->add_option("--lambda", f->lambda, "Laplace scale");
  sub->add_option("--sigma", f->sigma, "Gaussian stddev");
  sub->add_option("--epsilon", f->epsilon,
                  "Target epsilon (rr; gaussian: calibrate sigma)");
  f->delta_opt =
      sub->add_option("--delta", f->delta, "Delta")->capture_default_str();
  sub->add_option("--sampled", f->sampled, "PATE queries sampled");
  sub->add_option("--answered", f->answered, "PATE queries answered");
  sub->add_option("--sigma1", f->sigma1, "PATE threshold noise");
  sub->add_option("--sigma2", f->sigma2, "PATE argmax noise");
  sub->add_option("--votes", f->votes, "PATE vote transcript (JSONL)");
  sub->add_option("--out,-o", f->out, "Output directory");
  sub->callback([f, &ctx, &action] {
    action = [f, &ctx] {
      auto need = [](const auto& value, const char* flag,
                     const std::string& mechanism) {
        if (!value) {
          throw InputError(std::string("--") + flag + " is required for " +
                           mechanism);
        }
        return *value;
      };
      PrivacyReport report;
      if (f->mechanism == "laplace") {
        const double lambda = need(f->lambda, "lambda", f->mechanism);
        report.method = "laplace-soft-rr";
        report.budget = LaplaceLabelDpEpsilon(lambda);
        report.ledger = {{"lambda", lambda}};
      } else if (f->mechanism == "gaussian") {
        report.method = "gaussian-soft-rr";
        if (f->sigma.has_value() == f->epsilon.has_value()) {
          throw InputError("gaussian needs exactly one of --sigma, --epsilon");
        }
        double sigma = 0.0;
        if (f->sigma) {
          sigma = *f->sigma;
        } else {
          sigma = GaussianSigmaClassic(*f->epsilon, f->delta);
          report.ledger["calibrated_for_epsilon"] = *f->epsilon;
        }
        report.budget = GaussianLabelDpEpsilon(sigma, f->delta);
        report.ledger["sigma"] = sigma;
      } else if (f->mechanism == "pate") {
        PateLedger ledger;
        const double s1 = need(f->sigma1, "sigma1", f->mechanism);
        const double s2 = need(f->sigma2, "sigma2", f->mechanism);
        if (!f->votes.empty()) {
          if (f->sampled || f->answered) {
            throw InputError("--votes replaces --sampled/--answered");
          }
          const std::vector<VoteRecord> records =
              ParseVoteTranscript(ReadFile(f->votes));
          ledger = LedgerFromTranscript(records, s1, s2);
        } else {
          ledger.queries_sampled = need(f->sampled, "sampled", f->mechanism);
          ledger.queries_answered =
              need(f->answered, "answered", f->mechanism);
          ledger.sigma1 = s1;
          ledger.sigma2 = s2;
        }
        if (ledger.queries_sampled < 0 || ledger.queries_answered < 0 ||
            ledger.queries_answered > ledger.queries_sampled) {
          throw InputError("need 0 <= answered <= sampled");
        }
        report = PatePrivacy(ledger, f->delta);
      } else if (f->mechanism == "rr") {
        const double eps = need(f->epsilon, "epsilon", f->mechanism);
        if (!(eps > 0.0)) throw InputError("--epsilon must be positive");
        report.method = "randomized-response";
        report.budget = {eps, 0.0};
        report.ledger = {{"epsilon", eps}};
      } else {
        throw InputError("unknown mechanism '" + f->mechanism + "'");
      }
      const nlohmann::json json = ToJson(report);
      ctx.out << json.dump(2) << "\n";
      WriteJson(fs::path(ResolveOutputDir(f->out)) / "privacy_report.json",
                json);
    };
  });
}

// Per-alternative rows sorted by the model's larger confidence on the two
// candidate labels.
void SetupEmitFigureData(CLI::App& root, Context& ctx,
                         std::function<void()>& action) {
  CLI::App* sub = root.add_subcommand(
      "emit-figure-data", "Sorted per-canary confidence table for plotting");
  struct Flags {
    std::string canaries;
    double threshold = 0.99;
    std::string output;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--canaries", f->canaries, "canaries.csv from audit")
      ->required();
  sub->add_option("--threshold", f->threshold,
                  "Confidence needed for the adversary to guess")
      ->capture_default_str();
  sub->add_option("-o,--output", f->output,
                  "Output CSV (default: <out dir>/figure_data.csv)");
  sub->callback([f, &ctx, &action] {
    action = [f, &ctx] {
      struct Row {
        int canary;
        int alternative;
        double trained;
        double other;
      };
      std::istringstream in(ReadFile(f->canaries));
      std::string line;
      std::vector<Row> rows;
      int line_no = 0;
      std::map<std::string, size_t> columns;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line_no == 1) {
          for (size_t i = 0; i < cells.size(); ++i) columns[cells[i]] = i;
          for (const char* name : {"canary", "alternative",
                                   "trained_confidence",
                                   "alternative_confidence"}) {
            if (!columns.contains(name)) {
              throw ParseError(std::string("missing column ") + name, 1);
            }
          }
          continue;
        }
        try {
          rows.push_back({std::stoi(cells.at(columns["canary"])),
                          std::stoi(cells.at(columns["alternative"])),
                          std::stod(cells.at(columns["trained_confidence"])),
                          std::stod(cells.at(
                              columns["alternative_confidence"]))});
        } catch (const std::exception&) {
          throw ParseError("malformed canary row", line_no);
        }
      }
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Row& a, const Row& b) {
                         return std::max(a.trained, a.other) <
                                std::max(b.trained, b.other);
                       });
      std::string csv =
          "rank,canary,alternative,max_confidence,canary_label_preferred,"
          "guessed\n";
      for (size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const double max_conf = std::max(r.trained, r.other);
        csv += std::to_string(i) + "," + std::to_string(r.canary) + "," +
               std::to_string(r.alternative) + "," + FormatDouble(max_conf) +
               "," + (r.trained > r.other ? "1" : "0") + "," +
               (max_conf >= f->threshold && r.trained != r.other ? "1"
                                                                  : "0") +
               "\n";
      }
      const std::string output =
          f->output.empty() ? Join(ResolveOutputDir(""), "figure_data.csv")
                            : f->output;
      WriteFileAtomic(output, csv);
      ctx.out << "wrote " << rows.size() << " rows to " << output << "\n";
    };
  });
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kAlibi:
      return "alibi";
    case Method::kAgibi:
      return "agibi";
    case Method::kPate:
      return "pate";
    case Method::kRandomizedResponse:
      return "rr";
    case Method::kSupervised:
      return "supervised";
  }
  throw InternalError("unknown method");
}

Method ParseMethod(const std::string& name) {
  if (name == "alibi") return Method::kAlibi;
  if (name == "agibi") return Method::kAgibi;
  if (name == "pate") return Method::kPate;
  if (name == "rr") return Method::kRandomizedResponse;
  if (name == "supervised") return Method::kSupervised;
  throw ConfigError("unknown method '" + name + "'");
}

void ValidateMethodOptions(const MethodOptions& options) {
  ValidateTrainConfig(options.train);
  switch (options.method) {
    case Method::kAlibi:
    case Method::kAgibi:
      ValidateAlibiConfig(ToAlibiConfig(options));
      break;
    case Method::kPate:
      ValidatePateConfig(ToPateConfig(options));
      break;
    case Method::kRandomizedResponse:
      if (!(options.epsilon > 0.0)) {
        throw ConfigError("randomized response needs epsilon > 0");
      }
      break;
    case Method::kSupervised:
      break;
  }
}

nlohmann::json ToJson(const MethodOptions& options) {
  nlohmann::json j = {{"method", MethodName(options.method)},
                      {"model", ToJson(options.model)},
                      {"train", ToJson(options.train)}};
  switch (options.method) {
    case Method::kAlibi:
    case Method::kAgibi:
      j["alibi"] = ToJson(ToAlibiConfig(options));
      break;
    case Method::kPate:
      j["pate"] = ToJson(ToPateConfig(options));
      break;
    case Method::kRandomizedResponse:
      j["epsilon"] = options.epsilon;
      break;
    case Method::kSupervised:
      break;
  }
  return j;
}

PrivacyReport TheoreticalPrivacy(const MethodOptions& options) {
  PrivacyReport report;
  switch (options.method) {
    case Method::kAlibi:
    case Method::kAgibi: {
      const AlibiConfig config = ToAlibiConfig(options);
      report.method = options.method == Method::kAlibi ? "laplace-soft-rr"
                                                       : "gaussian-soft-rr";
      report.budget = AlibiBudget(config);
      report.ledger = {{"noise_param", config.noise_param}};
      break;
    }
    case Method::kPate:
      throw InputError("PATE privacy depends on the answered query count");
    case Method::kRandomizedResponse:
      report.method = "randomized-response";
      report.budget = {options.epsilon, 0.0};
      report.ledger = {{"epsilon", options.epsilon}};
      break;
    case Method::kSupervised:
      report.method = "none";
      report.budget = {kInf, 0.0};
      break;
  }
  return report;
}

MethodRun TrainMethod(const MethodOptions& options, const Dataset& train,
                      RandomStream& stream, const Dataset* test) {
  ValidateMethodOptions(options);
  if (options.model.num_classes != train.num_classes() ||
      options.model.input_dim != train.dim()) {
    throw ConfigError("model shape does not match the dataset");
  }
  MethodRun run{Model::Zeros(options.model), {}, {}, {}};
  switch (options.method) {
    case Method::kAlibi:
    case Method::kAgibi: {
      const AlibiConfig config = ToAlibiConfig(options);
      const NoisedDataset noised = NoiseDataset(train, config, stream);
      auto record = [&](int epoch, const Model& model, double loss) {
        EpochMetrics m;
        m.epoch = epoch;
        m.train_loss = loss;
        m.train_accuracy = Evaluate(model, train);
        if (test != nullptr && !test->empty()) {
          m.test_accuracy = Evaluate(model, *test);
        }
        run.history.push_back(m);
      };
      run.model = TrainOnNoised(noised, config, record);
      run.privacy = TheoreticalPrivacy(options);
      break;
    }
    case Method::kPate: {
      PateResult result = PateTrain(train, ToPateConfig(options), stream);
      EpochMetrics m;
      m.epoch = options.train.epochs;
      m.train_accuracy = Evaluate(result.student, train);
      if (test != nullptr && !test->empty()) {
        m.test_accuracy = Evaluate(result.student, *test);
      }
      run.history.push_back(m);
      run.model = std::move(result.student);
      run.privacy = PatePrivacy(result.ledger, options.delta);
      run.votes = std::move(result.votes);
      break;
    }
    case Method::kRandomizedResponse:
    case Method::kSupervised: {
      std::vector<LabelDistribution> targets;
      targets.reserve(train.size());
      for (const Example& e : train.examples()) {
        const int label =
            options.method == Method::kSupervised
                ? e.label
                : RandomizedResponse(e.label, train.num_classes(),
                                     options.epsilon, stream);
        targets.push_back(LabelDistribution::PointMass(label,
                                                       train.num_classes()));
      }
      const Dataset* eval_test =
          test != nullptr && !test->empty() ? test : nullptr;
      run.model = FitRecorded(train, std::move(targets), options.model,
                              options.train, eval_test, &run.history, &train);
      run.privacy = TheoreticalPrivacy(options);
      break;
    }
  }
  return run;
}

MechanismTrainer MakeMechanismTrainer(const MethodOptions& options) {
  ValidateMethodOptions(options);
  return [options](const Dataset& dataset, RandomStream& stream) {
    MethodOptions local = options;
    local.train.seed = stream.engine()();
    local.model.input_dim = dataset.dim();
    local.model.num_classes = dataset.num_classes();
    RandomStream noise = stream.Fork(kNoiseStream);
    if (local.method == Method::kAlibi || local.method == Method::kAgibi) {
      // Skip per-epoch evaluation; only the final model matters here.
      const AlibiConfig config = ToAlibiConfig(local);
      return TrainOnNoised(NoiseDataset(dataset, config, noise), config);
    }
    return TrainMethod(local, dataset, noise).model;
  };
}

std::pair<Dataset, Dataset> LoadExperimentData(const DataOptions& options) {
  Dataset full = [&] {
    if (!options.csv.empty()) {
      CsvSchema schema;
      schema.has_header = options.header;
      schema.num_classes = options.csv_classes;
      return LoadCsv(options.csv, schema);
    }
    RandomStream stream(options.data_seed, kDataStream);
    return GenerateMixture(options.classes, options.dim, options.n,
                           options.sep, stream);
  }();
  const int holdout = options.holdout >= 0
                          ? options.holdout
                          : static_cast<int>(full.size() / 4);
  if (static_cast<size_t>(holdout) >= full.size()) {
    throw InputError("--holdout leaves no training data");
  }
  return SplitHoldout(full, static_cast<size_t>(holdout));
}

nlohmann::json StripVolatile(nlohmann::json payload) {
  if (payload.is_object()) {
    payload.erase("created_at");
    for (auto& [key, value] : payload.items()) value = StripVolatile(value);
  } else if (payload.is_array()) {
    for (auto& value : payload) value = StripVolatile(value);
  }
  return payload;
}

std::string ResolveOutputDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env) {
    return env;
  }
  return kDefaultOutputDir;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Label differential privacy training, accounting and auditing",
               "labeldp"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file with flag defaults");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Context ctx{out, err};
  std::function<void()> action;
  SetupGenData(app, ctx, action);
  SetupTrain(app, ctx, action);
  SetupAudit(app, ctx, action);
  SetupAccount(app, ctx, action);
  SetupEmitFigureData(app, ctx, action);
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    if (action) action();
    return kExitOk;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace labeldp::cli
