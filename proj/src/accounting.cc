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

#include "labeldp/accounting.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "boost/math/distributions/normal.hpp"
#include "labeldp/status.h"

namespace labeldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }
}

}  // namespace

const std::vector<double>& DefaultRdpOrders() {
  static const std::vector<double> kOrders = {
      1.25, 1.5, 1.75, 2, 2.5, 3, 4, 5, 6, 8, 16, 32, 64, 128, 256, 512};
  return kOrders;
}

PrivacyBudget LaplaceLabelDpEpsilon(double scale) {
  if (!(scale >= 0.0)) throw InputError("Laplace scale must be >= 0");
  if (scale == 0.0) return {kInf, 0.0};
  return {2.0 / scale, 0.0};
}

PrivacyBudget GaussianLabelDpEpsilon(double stddev, double delta) {
  CheckDelta(delta);
  if (!(stddev > 0.0)) throw InputError("Gaussian stddev must be positive");
  const boost::math::normal_distribution<double> standard;
  const double q = boost::math::quantile(boost::math::complement(standard,
                                                                 delta / 2));
  return {std::max(0.0, std::numbers::sqrt2 * q / stddev), delta};
}

double GaussianSigmaClassic(double epsilon, double delta) {
  CheckDelta(delta);
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (epsilon >= 1.0) {
    throw InputError(
        "the classic Gaussian calibration requires epsilon < 1; use "
        "GaussianLabelDpEpsilon for larger budgets");
  }
  return std::numbers::sqrt2 * std::sqrt(2.0 * std::log(1.25 / delta)) /
         epsilon;
}

double RdpGaussian(double l2_sensitivity, double stddev, double order) {
  if (!(order > 1.0)) throw InputError("RDP order must exceed 1");
  if (!(l2_sensitivity >= 0.0)) throw InputError("sensitivity must be >= 0");
  if (!(stddev > 0.0)) throw InputError("Gaussian stddev must be positive");
  return order * l2_sensitivity * l2_sensitivity / (2.0 * stddev * stddev);
}

RdpConversion EpsilonFromRdp(const RdpCurve& curve, double delta) {
  CheckDelta(delta);
  if (curve.orders.empty() || curve.orders.size() != curve.values.size()) {
    throw InputError("RDP curve must be nonempty with matching orders/values");
  }
  RdpConversion best{{kInf, delta}, curve.orders.front()};
  const double log_inv_delta = std::log(1.0 / delta);
  for (size_t i = 0; i < curve.orders.size(); ++i) {
    const double order = curve.orders[i];
    if (!(order > 1.0)) throw InputError("RDP order must exceed 1");
    const double eps = curve.values[i] + log_inv_delta / (order - 1.0);
    if (eps < best.budget.epsilon) {
      best.budget.epsilon = eps;
      best.best_order = order;
    }
  }
  return best;
}

RdpCurve PateRdpCurve(const PateLedger& ledger) {
  if (ledger.queries_answered > ledger.queries_sampled ||
      ledger.queries_answered < 0) {
    throw InputError("PATE ledger: answered queries exceed sampled queries");
  }
  if (ledger.sigma1 < 0.0 || ledger.sigma2 < 0.0) {
    throw InputError("PATE ledger: sigmas must be nonnegative");
  }
  RdpCurve curve;
  curve.orders = DefaultRdpOrders();
  for (double order : curve.orders) {
    if (ledger.sigma1 == 0.0 || ledger.sigma2 == 0.0) {
      curve.values.push_back(kInf);
      continue;
    }
    const double threshold_cost =
        static_cast<double>(ledger.queries_sampled) *
        RdpGaussian(1.0, ledger.sigma1, order);
    const double argmax_cost = static_cast<double>(ledger.queries_answered) *
                               RdpGaussian(std::numbers::sqrt2, ledger.sigma2,
                                           order);
    curve.values.push_back(threshold_cost + argmax_cost);
  }
  return curve;
}

PrivacyBudget PateBudget(const PateLedger& ledger, double delta) {
  CheckDelta(delta);
  if (ledger.sigma1 == 0.0 || ledger.sigma2 == 0.0) return {kInf, delta};
  return EpsilonFromRdp(PateRdpCurve(ledger), delta).budget;
}

nlohmann::json EncodeReal(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  return value;
}

double DecodeReal(const nlohmann::json& value) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("expected a number, found '" + s + "'", 0);
  }
  return value.get<double>();
}

nlohmann::json ToJson(const PrivacyReport& report) {
  nlohmann::json values = nlohmann::json::array();
  for (double v : report.curve.values) values.push_back(EncodeReal(v));
  return {{"epsilon", EncodeReal(report.budget.epsilon)},
          {"delta", report.budget.delta},
          {"rdp_orders", report.curve.orders},
          {"rdp_values", values},
          {"method", report.method},
          {"ledger", report.ledger}};
}

PrivacyReport PrivacyReportFromJson(const nlohmann::json& json) {
  try {
    PrivacyReport report;
    report.budget.epsilon = DecodeReal(json.at("epsilon"));
    report.budget.delta = json.at("delta").get<double>();
    report.curve.orders = json.at("rdp_orders").get<std::vector<double>>();
    for (const auto& v : json.at("rdp_values")) {
      report.curve.values.push_back(DecodeReal(v));
    }
    report.method = json.at("method").get<std::string>();
    report.ledger = json.at("ledger");
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("privacy report: ") + e.what(), 0);
  }
}

nlohmann::json ToJson(const PateLedger& ledger) {
  return {{"queries_sampled", ledger.queries_sampled},
          {"queries_answered", ledger.queries_answered},
          {"sigma1", ledger.sigma1},
          {"sigma2", ledger.sigma2}};
}

}  // namespace labeldp
