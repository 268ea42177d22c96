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

#ifndef LABELDP_CORE_H_
#define LABELDP_CORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labeldp/random.h"

namespace labeldp {

// Tolerance used when validating that a vector sums to one.
inline constexpr double kSimplexTolerance = 1e-9;

// Probability vector over C classes: a soft label, a prior, or a model
// prediction. Always valid once constructed.
class LabelDistribution {
 public:
  // Throws InputError unless every entry lies in [0, 1] and the entries sum
  // to one within kSimplexTolerance.
  static LabelDistribution FromProbabilities(std::vector<double> probs);
  static LabelDistribution Uniform(int num_classes);
  static LabelDistribution PointMass(int label, int num_classes);

  const std::vector<double>& probs() const { return probs_; }
  int num_classes() const { return static_cast<int>(probs_.size()); }
  double operator[](int c) const { return probs_[c]; }
  // Index of the largest entry; ties go to the lowest index.
  int Argmax() const;

  friend bool operator==(const LabelDistribution&,
                         const LabelDistribution&) = default;

 private:
  explicit LabelDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Unconstrained real vector released by an additive-noise mechanism.
class NoisyObservation {
 public:
  // Throws InputError on non-finite entries.
  explicit NoisyObservation(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  int num_classes() const { return static_cast<int>(values_.size()); }
  double operator[](int c) const { return values_[c]; }

  friend bool operator==(const NoisyObservation&,
                         const NoisyObservation&) = default;

 private:
  std::vector<double> values_;
};

struct Example {
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const Example&, const Example&) = default;
};

// Features with labels stripped. Label DP treats features as public, so this
// is what anything downstream of a private aggregation gets to see.
struct UnlabeledPool {
  std::vector<std::vector<double>> rows;
  int dim = 0;

  size_t size() const { return rows.size(); }
};

// Labeled examples sharing one feature dimension, labels in [0, C).
class Dataset {
 public:
  // Throws InputError if examples disagree on dimension, a label is outside
  // [0, num_classes), num_classes < 2, or the dimension is zero. An empty
  // example list is allowed only when `dim` is given.
  Dataset(std::vector<Example> examples, int num_classes,
          std::optional<int> dim = std::nullopt);

  const std::vector<Example>& examples() const { return examples_; }
  const Example& operator[](size_t i) const { return examples_[i]; }
  size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }

  std::vector<int> Labels() const;
  UnlabeledPool Unlabeled() const;
  Dataset Subset(std::span<const size_t> indices) const;
  // Copy with example `index` relabeled.
  Dataset WithLabel(size_t index, int label) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Example> examples_;
  int num_classes_;
  int dim_;
};

// Indicator vector with a one at `label`. Throws InputError unless
// 0 <= label < num_classes and num_classes >= 2.
std::vector<double> OneHot(int label, int num_classes);

// exp(logits - max) normalized. Throws InputError on empty or non-finite
// input.
LabelDistribution SoftMax(std::span<const double> logits);

// Balanced mixture of `num_classes` isotropic unit-variance Gaussians.
//
// When num_classes <= dim the class means are (separation / sqrt 2) * e_c,
// so every pair of means is exactly `separation` apart. With more classes
// than dimensions the means are random directions at the same radius and the
// pairwise distances are only approximately `separation`. Labels are balanced
// to within one and appear in random order.
Dataset GenerateMixture(int num_classes, int dim, int n, double separation,
                        RandomStream& stream);

// First `dataset.size() - holdout` examples and the remaining `holdout`.
std::pair<Dataset, Dataset> SplitHoldout(const Dataset& dataset,
                                         size_t holdout);

struct CsvSchema {
  bool has_header = false;
  // Overrides the inferred class count (max label + 1).
  std::optional<int> num_classes;
};

// Reads comma-separated rows whose final column is an integer label.
Dataset LoadCsv(const std::string& path, const CsvSchema& schema = {});
Dataset ParseCsv(const std::string& text, const CsvSchema& schema = {});
// Writes with round-trip precision. The header, when requested, names the
// columns x0..x{d-1},label.
void WriteCsv(const std::string& path, const Dataset& dataset,
              bool header = false);
std::string FormatCsv(const Dataset& dataset, bool header = false);

}  // namespace labeldp

#endif  // LABELDP_CORE_H_
