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

#include "labeldp/core.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string_view>

#include "labeldp/io.h"
#include "labeldp/status.h"

namespace labeldp {

LabelDistribution LabelDistribution::FromProbabilities(
    std::vector<double> probs) {
  if (probs.empty()) throw InputError("LabelDistribution: empty vector");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("LabelDistribution: entry outside [0, 1]");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > kSimplexTolerance) {
    throw InputError("LabelDistribution: entries sum to " +
                     FormatDouble(total));
  }
  return LabelDistribution(std::move(probs));
}

LabelDistribution LabelDistribution::Uniform(int num_classes) {
  if (num_classes < 1) throw InputError("Uniform: num_classes must be >= 1");
  return LabelDistribution(
      std::vector<double>(num_classes, 1.0 / num_classes));
}

LabelDistribution LabelDistribution::PointMass(int label, int num_classes) {
  return LabelDistribution(OneHot(label, num_classes));
}

int LabelDistribution::Argmax() const {
  return static_cast<int>(std::max_element(probs_.begin(), probs_.end()) -
                          probs_.begin());
}

NoisyObservation::NoisyObservation(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("NoisyObservation: non-finite");
  }
}

Dataset::Dataset(std::vector<Example> examples, int num_classes,
                 std::optional<int> dim)
    : examples_(std::move(examples)), num_classes_(num_classes), dim_(0) {
  if (num_classes_ < 2) throw InputError("Dataset: need at least 2 classes");
  if (dim) {
    dim_ = *dim;
  } else if (!examples_.empty()) {
    dim_ = static_cast<int>(examples_.front().features.size());
  } else {
    throw InputError("Dataset: empty dataset needs an explicit dimension");
  }
  if (dim_ < 1) throw InputError("Dataset: dimension must be positive");
  for (size_t i = 0; i < examples_.size(); ++i) {
    const Example& e = examples_[i];
    if (static_cast<int>(e.features.size()) != dim_) {
      throw InputError("Dataset: example " + std::to_string(i) + " has " +
                       std::to_string(e.features.size()) +
                       " features, expected " + std::to_string(dim_));
    }
    if (e.label < 0 || e.label >= num_classes_) {
      throw InputError("Dataset: label " + std::to_string(e.label) +
                       " of example " + std::to_string(i) +
                       " outside [0, " + std::to_string(num_classes_) + ")");
    }
  }
}

std::vector<int> Dataset::Labels() const {
  std::vector<int> labels;
  labels.reserve(examples_.size());
  for (const Example& e : examples_) labels.push_back(e.label);
  return labels;
}

UnlabeledPool Dataset::Unlabeled() const {
  UnlabeledPool pool;
  pool.dim = dim_;
  pool.rows.reserve(examples_.size());
  for (const Example& e : examples_) pool.rows.push_back(e.features);
  return pool;
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  std::vector<Example> picked;
  picked.reserve(indices.size());
  for (size_t i : indices) {
    if (i >= examples_.size()) throw InputError("Subset: index out of range");
    picked.push_back(examples_[i]);
  }
  return Dataset(std::move(picked), num_classes_, dim_);
}

Dataset Dataset::WithLabel(size_t index, int label) const {
  if (index >= examples_.size()) throw InputError("WithLabel: bad index");
  std::vector<Example> copy = examples_;
  copy[index].label = label;
  return Dataset(std::move(copy), num_classes_, dim_);
}

std::vector<double> OneHot(int label, int num_classes) {
  if (num_classes < 2) throw InputError("OneHot: need at least 2 classes");
  if (label < 0 || label >= num_classes) {
    throw InputError("OneHot: label " + std::to_string(label) +
                     " outside [0, " + std::to_string(num_classes) + ")");
  }
  std::vector<double> v(num_classes, 0.0);
  v[label] = 1.0;
  return v;
}

LabelDistribution SoftMax(std::span<const double> logits) {
  if (logits.empty()) throw InputError("SoftMax: empty input");
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double z : logits) {
    if (!std::isfinite(z)) throw InputError("SoftMax: non-finite logit");
    max_logit = std::max(max_logit, z);
  }
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return LabelDistribution::FromProbabilities(std::move(probs));
}

Dataset GenerateMixture(int num_classes, int dim, int n, double separation,
                        RandomStream& stream) {
  if (num_classes < 2) throw InputError("GenerateMixture: need >= 2 classes");
  if (dim < 1) throw InputError("GenerateMixture: dim must be >= 1");
  if (n < num_classes) throw InputError("GenerateMixture: need n >= classes");
  if (!(separation >= 0.0)) {
    throw InputError("GenerateMixture: separation must be nonnegative");
  }
  const double radius = separation / std::sqrt(2.0);
  std::vector<std::vector<double>> means(num_classes,
                                         std::vector<double>(dim, 0.0));
  if (num_classes <= dim) {
    for (int c = 0; c < num_classes; ++c) means[c][c] = radius;
  } else {
    for (auto& mean : means) {
      double norm = 0.0;
      while (norm == 0.0) {
        for (double& m : mean) m = stream.Gaussian(0.0, 1.0);
        norm = std::sqrt(std::inner_product(mean.begin(), mean.end(),
                                            mean.begin(), 0.0));
      }
      for (double& m : mean) m *= radius / norm;
    }
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % num_classes;
  stream.Shuffle(std::span<int>(labels));

  std::vector<Example> examples;
  examples.reserve(n);
  for (int label : labels) {
    Example e;
    e.label = label;
    e.features.resize(dim);
    for (int j = 0; j < dim; ++j) {
      e.features[j] = means[label][j] + stream.Gaussian(0.0, 1.0);
    }
    examples.push_back(std::move(e));
  }
  return Dataset(std::move(examples), num_classes, dim);
}

std::pair<Dataset, Dataset> SplitHoldout(const Dataset& dataset,
                                         size_t holdout) {
  if (holdout >= dataset.size()) {
    throw InputError("SplitHoldout: holdout must leave training examples");
  }
  const size_t train = dataset.size() - holdout;
  std::vector<Example> head(dataset.examples().begin(),
                            dataset.examples().begin() + train);
  std::vector<Example> tail(dataset.examples().begin() + train,
                            dataset.examples().end());
  return {Dataset(std::move(head), dataset.num_classes(), dataset.dim()),
          Dataset(std::move(tail), dataset.num_classes(), dataset.dim())};
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Dataset ParseCsv(const std::string& text, const CsvSchema& schema) {
  std::vector<Example> examples;
  int max_label = -1;
  int expected_fields = -1;
  int line_no = 0;
  size_t pos = 0;
  bool header_pending = schema.has_header;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (Trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = SplitFields(line);
    if (fields.size() < 2) {
      throw ParseError("expected at least one feature and a label", line_no);
    }
    if (expected_fields < 0) {
      expected_fields = static_cast<int>(fields.size());
    } else if (static_cast<int>(fields.size()) != expected_fields) {
      throw ParseError("expected " + std::to_string(expected_fields) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    Example e;
    e.features.reserve(fields.size() - 1);
    for (size_t k = 0; k + 1 < fields.size(); ++k) {
      double value = 0.0;
      const auto f = fields[k];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() ||
          !std::isfinite(value)) {
        throw ParseError("column " + std::to_string(k + 1) +
                             ": not a number: '" + std::string(f) + "'",
                         line_no);
      }
      e.features.push_back(value);
    }
    const auto lf = fields.back();
    int label = 0;
    auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || lf.empty() ||
        label < 0) {
      throw ParseError("label is not a nonnegative integer: '" +
                           std::string(lf) + "'",
                       line_no);
    }
    if (schema.num_classes && label >= *schema.num_classes) {
      throw InputError("line " + std::to_string(line_no) + ": label " +
                       std::to_string(label) + " >= declared class count " +
                       std::to_string(*schema.num_classes));
    }
    max_label = std::max(max_label, label);
    e.label = label;
    examples.push_back(std::move(e));
  }
  if (examples.empty()) throw ParseError("no data rows", 0);
  const int num_classes =
      schema.num_classes ? *schema.num_classes : std::max(2, max_label + 1);
  return Dataset(std::move(examples), num_classes);
}

Dataset LoadCsv(const std::string& path, const CsvSchema& schema) {
  return ParseCsv(ReadFile(path), schema);
}

std::string FormatCsv(const Dataset& dataset, bool header) {
  std::string out;
  if (header) {
    for (int j = 0; j < dataset.dim(); ++j) {
      out += "x" + std::to_string(j) + ",";
    }
    out += "label\n";
  }
  for (const Example& e : dataset.examples()) {
    for (double v : e.features) {
      out += FormatDouble(v);
      out += ',';
    }
    out += std::to_string(e.label);
    out += '\n';
  }
  return out;
}

void WriteCsv(const std::string& path, const Dataset& dataset, bool header) {
  WriteFileAtomic(path, FormatCsv(dataset, header));
}

}  // namespace labeldp
