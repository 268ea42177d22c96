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

// Privacy accounting for label-DP mechanisms.
//
// Soft randomized response on a one-hot label has l2 sensitivity sqrt(2) and
// l1 sensitivity 2 regardless of the number of classes. The PATE accountant
// is a data-independent Renyi-DP bound: every sampled query pays for a
// Gaussian threshold check on the max vote count (sensitivity 1), every
// answered query additionally pays for a Gaussian argmax on the vote
// histogram (l2 sensitivity sqrt(2)). It is sound but much looser than a
// data-dependent analysis.

#ifndef LABELDP_ACCOUNTING_H_
#define LABELDP_ACCOUNTING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace labeldp {

// epsilon may be +infinity (noiseless mechanisms).
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Renyi-DP values on a grid of orders (all > 1).
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

struct RdpConversion {
  PrivacyBudget budget;
  double best_order = 0.0;
};

struct PateLedger {
  int64_t queries_sampled = 0;
  int64_t queries_answered = 0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

// Orders used for every RDP to (epsilon, delta) conversion in this library.
const std::vector<double>& DefaultRdpOrders();

// Laplace scale b on a one-hot label gives epsilon = 2 / b (equivalently
// 2 sqrt(2) / stddev). Scale 0 yields +infinity. Throws InputError on a
// negative scale.
PrivacyBudget LaplaceLabelDpEpsilon(double scale);

// Smallest epsilon with Pr[x >= stddev^2 * epsilon] <= delta / 2 for
// x ~ N(0, 2 stddev^2), i.e. epsilon = sqrt(2) * Q(delta / 2) / stddev where Q
// is the upper standard-normal quantile.
PrivacyBudget GaussianLabelDpEpsilon(double stddev, double delta);

// Classic Gaussian-mechanism calibration with l2 sensitivity sqrt(2):
// stddev = sqrt(2) * sqrt(2 ln(1.25 / delta)) / epsilon. Only valid for
// epsilon < 1; larger values throw InputError pointing at the exact method.
double GaussianSigmaClassic(double epsilon, double delta);

// alpha * sensitivity^2 / (2 stddev^2).
double RdpGaussian(double l2_sensitivity, double stddev, double order);

// min over orders of rdp(order) + ln(1 / delta) / (order - 1).
RdpConversion EpsilonFromRdp(const RdpCurve& curve, double delta);

// RDP curve of the PATE ledger on DefaultRdpOrders(). Entries are +infinity
// when a sigma is zero.
RdpCurve PateRdpCurve(const PateLedger& ledger);
// (+infinity, delta) when either sigma is zero.
PrivacyBudget PateBudget(const PateLedger& ledger, double delta);

// Accounting summary with a fixed JSON layout:
// {epsilon, delta, rdp_orders[], rdp_values[], method, ledger}.
struct PrivacyReport {
  PrivacyBudget budget;
  RdpCurve curve;
  std::string method;
  nlohmann::json ledger = nlohmann::json::object();
};

// JSON has no infinity; infinite values are written as the string "inf".
nlohmann::json EncodeReal(double value);
double DecodeReal(const nlohmann::json& value);

nlohmann::json ToJson(const PrivacyReport& report);
PrivacyReport PrivacyReportFromJson(const nlohmann::json& json);
nlohmann::json ToJson(const PateLedger& ledger);

}  // namespace labeldp

#endif  // LABELDP_ACCOUNTING_H_
