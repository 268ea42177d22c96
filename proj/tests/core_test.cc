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

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "labeldp/io.h"
#include "labeldp/status.h"

namespace labeldp {
namespace {

TEST(LabelDistributionTest, ValidatesSimplex) {
  EXPECT_NO_THROW(LabelDistribution::FromProbabilities({0.25, 0.75}));
  EXPECT_THROW(LabelDistribution::FromProbabilities({0.5, 0.6}), InputError);
  EXPECT_THROW(LabelDistribution::FromProbabilities({-0.1, 1.1}), InputError);
  EXPECT_THROW(LabelDistribution::FromProbabilities({}), InputError);
  EXPECT_NO_THROW(LabelDistribution::FromProbabilities({0.5, 0.5 + 1e-12}));
}

TEST(LabelDistributionTest, ArgmaxBreaksTiesLow) {
  EXPECT_EQ(LabelDistribution::FromProbabilities({0.4, 0.4, 0.2}).Argmax(), 0);
  EXPECT_EQ(LabelDistribution::FromProbabilities({0.2, 0.4, 0.4}).Argmax(), 1);
  EXPECT_EQ(LabelDistribution::PointMass(3, 5).Argmax(), 3);
  EXPECT_DOUBLE_EQ(LabelDistribution::Uniform(4)[2], 0.25);
}

TEST(NoisyObservationTest, RejectsNonFinite) {
  EXPECT_THROW(NoisyObservation({1.0, std::nan("")}), InputError);
  EXPECT_THROW(NoisyObservation({std::numeric_limits<double>::infinity()}),
               InputError);
}

TEST(OneHotTest, Basics) {
  EXPECT_EQ(OneHot(2, 4), (std::vector<double>{0, 0, 1, 0}));
  EXPECT_THROW(OneHot(4, 4), InputError);
  EXPECT_THROW(OneHot(-1, 4), InputError);
}

TEST(SoftMaxTest, MatchesDirectFormulaAndIsShiftInvariant) {
  const std::vector<double> logits = {1.0, -2.0, 0.5, 3.0};
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  const LabelDistribution p = SoftMax(logits);
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(p[c], std::exp(logits[c]) / z, 1e-15);
  }
  const LabelDistribution shifted = SoftMax(std::vector<double>{
      1001.0, 998.0, 1000.5, 1003.0});
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(shifted[c], p[c], 1e-12);
}

TEST(DatasetTest, RejectsInconsistentInput) {
  EXPECT_THROW(Dataset({{{1.0}, 0}, {{1.0, 2.0}, 1}}, 2), InputError);
  EXPECT_THROW(Dataset({{{1.0}, 2}}, 2), InputError);
  EXPECT_THROW(Dataset({{{1.0}, 0}}, 1), InputError);
  EXPECT_THROW(Dataset({}, 2), InputError);
  EXPECT_NO_THROW(Dataset({}, 2, 3));
}

TEST(DatasetTest, SubsetWithLabelAndUnlabeled) {
  Dataset d({{{1.0}, 0}, {{2.0}, 1}, {{3.0}, 2}}, 3);
  const std::vector<size_t> idx = {2, 0};
  const Dataset s = d.Subset(idx);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].label, 2);
  EXPECT_EQ(s[1].features[0], 1.0);
  const Dataset relabeled = d.WithLabel(1, 0);
  EXPECT_EQ(relabeled[1].label, 0);
  EXPECT_EQ(d[1].label, 1);
  const UnlabeledPool pool = d.Unlabeled();
  EXPECT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.dim, 1);
  EXPECT_EQ(d.Labels(), (std::vector<int>{0, 1, 2}));
}

TEST(GenerateMixtureTest, DeterministicBalancedAndSeparated) {
  RandomStream a(1);
  RandomStream b(1);
  const Dataset d1 = GenerateMixture(10, 20, 2000, 8.0, a);
  const Dataset d2 = GenerateMixture(10, 20, 2000, 8.0, b);
  EXPECT_EQ(d1, d2);
  EXPECT_EQ(d1.size(), 2000u);
  EXPECT_EQ(d1.dim(), 20);
  std::vector<int> counts(10, 0);
  // Class means sit at distance sep from each other; check empirically.
  std::vector<std::vector<double>> means(10, std::vector<double>(20, 0.0));
  for (const Example& e : d1.examples()) {
    ++counts[e.label];
    for (int j = 0; j < 20; ++j) means[e.label][j] += e.features[j];
  }
  for (int c = 0; c < 10; ++c) {
    EXPECT_EQ(counts[c], 200);
    for (double& m : means[c]) m /= counts[c];
  }
  double dist = 0.0;
  for (int j = 0; j < 20; ++j) {
    dist += (means[0][j] - means[1][j]) * (means[0][j] - means[1][j]);
  }
  EXPECT_NEAR(std::sqrt(dist), 8.0, 0.5);
}

TEST(GenerateMixtureTest, MoreClassesThanDimensions) {
  RandomStream s(2);
  const Dataset d = GenerateMixture(5, 2, 100, 4.0, s);
  EXPECT_EQ(d.num_classes(), 5);
  EXPECT_EQ(d.dim(), 2);
}

TEST(SplitHoldoutTest, KeepsOrder) {
  Dataset d({{{1.0}, 0}, {{2.0}, 1}, {{3.0}, 0}, {{4.0}, 1}}, 2);
  auto [train, test] = SplitHoldout(d, 1);
  EXPECT_EQ(train.size(), 3u);
  EXPECT_EQ(test.size(), 1u);
  EXPECT_EQ(test[0].features[0], 4.0);
  EXPECT_THROW(SplitHoldout(d, 4), InputError);
}

TEST(CsvTest, RoundTrip) {
  RandomStream s(3);
  const Dataset d = GenerateMixture(3, 4, 30, 2.0, s);
  for (bool header : {false, true}) {
    CsvSchema schema;
    schema.has_header = header;
    EXPECT_EQ(ParseCsv(FormatCsv(d, header), schema), d);
  }
  const auto dir = std::filesystem::temp_directory_path() / "labeldp_core";
  const std::string path = (dir / "nested" / "d.csv").string();
  WriteCsv(path, d, true);
  EXPECT_EQ(LoadCsv(path, {true, std::nullopt}), d);
  std::filesystem::remove_all(dir);
}

TEST(CsvTest, ReportsLineNumbers) {
  try {
    ParseCsv("1.0,2.0,0\n1.0,abc,1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  try {
    ParseCsv("x,label\n1.0,0\n\n1.0,2.0,1\n", {true, std::nullopt});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(ParseCsv("1.0,-1\n"), ParseError);
  EXPECT_THROW(ParseCsv("1.0,0.5\n"), ParseError);
  EXPECT_THROW(ParseCsv(""), ParseError);
  EXPECT_THROW(ParseCsv("1.0,3\n", {false, 3}), InputError);
}

TEST(CsvTest, ClassCountInference) {
  EXPECT_EQ(ParseCsv("1.0,0\n2.0,0\n").num_classes(), 2);
  EXPECT_EQ(ParseCsv("1.0,0\n2.0,4\n").num_classes(), 5);
  EXPECT_EQ(ParseCsv("1.0,0\n", {false, 7}).num_classes(), 7);
}

TEST(IoTest, MissingFileIsIoError) {
  EXPECT_THROW(ReadFile("/nonexistent/labeldp/file"), IoError);
  EXPECT_THROW(LoadCsv("/nonexistent/labeldp/file.csv"), IoError);
}

TEST(IoTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

}  // namespace
}  // namespace labeldp
