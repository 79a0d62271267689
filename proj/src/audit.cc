// Copyright 2026 The userdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "userdp/audit.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include "absl/strings/str_format.h"
#include "json.hpp"
#include "userdp/errors.h"
#include "userdp/mean.h"
#include "userdp/range.h"
#include "userdp/select.h"

namespace userdp {
namespace {

// Runs the mechanism for trials [0, trials) with per-trial streams derived
// from (seed, side, trial), splitting the range across jobs threads.
absl::StatusOr<Vector> Sample(const ScalarMechanism& mechanism,
                              const UserDataset& data, std::int64_t trials,
                              std::uint64_t seed, std::uint64_t side,
                              std::size_t jobs) {
  Vector out(static_cast<std::size_t>(trials));
  jobs = std::max<std::size_t>(1, std::min<std::size_t>(jobs, 64));
  std::vector<absl::Status> statuses(jobs);
  auto work = [&](std::size_t job) {
    for (std::int64_t t = static_cast<std::int64_t>(job); t < trials;
         t += static_cast<std::int64_t>(jobs)) {
      RandomSource rng(MixSeed(seed ^ (side << 62)),
                       static_cast<std::uint64_t>(t));
      absl::StatusOr<double> v = mechanism(data, rng);
      if (!v.ok()) {
        statuses[job] = v.status();
        return;
      }
      out[static_cast<std::size_t>(t)] = *v;
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(work, j);
    for (auto& th : threads) th.join();
  }
  for (const auto& s : statuses) USERDP_RETURN_IF_ERROR(s);
  return out;
}

std::vector<std::int64_t> Histogram(const Vector& xs, double lo, double hi,
                                    std::size_t bins) {
  // Index 0 and bins + 1 are the overflow bins.
  std::vector<std::int64_t> counts(bins + 2, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : xs) {
    std::size_t idx;
    if (x < lo) {
      idx = 0;
    } else if (x > hi) {
      idx = bins + 1;
    } else if (width <= 0) {
      idx = 1;
    } else {
      const auto k = static_cast<std::size_t>((x - lo) / width);
      idx = 1 + std::min(k, bins - 1);
    }
    ++counts[idx];
  }
  return counts;
}

Vector UserScalars(const UserDataset& data) {
  Vector xs;
  xs.reserve(data.num_users());
  for (const auto& user : data.users()) {
    double total = 0;
    for (const auto& item : user.items) total += item.front();
    xs.push_back(total / static_cast<double>(user.items.size()));
  }
  return xs;
}

class AbsoluteLoss final : public LossModel {
 public:
  std::string_view name() const override { return "absolute"; }
  std::size_t dim() const override { return 1; }
  std::size_t item_dim() const override { return 1; }
  double Evaluate(std::span<const double> theta,
                  std::span<const double> z) const override {
    return std::abs(theta[0] - z[0]);
  }
  void Gradient(std::span<const double> theta, std::span<const double> z,
                std::span<double> out) const override {
    out[0] = theta[0] >= z[0] ? 1.0 : -1.0;
  }
  double lipschitz() const override { return 1.0; }
  double smoothness() const override { return 0.0; }
  bool convex() const override { return true; }
};

}  // namespace

WilsonInterval Wilson(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1 + z2 / t;
  const double center = (p + z2 / (2 * t)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / t + z2 / (4 * t * t)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

absl::StatusOr<AuditReport> DpRatioAudit(const std::string& name,
                                         const ScalarMechanism& mechanism,
                                         const UserDataset& a,
                                         const UserDataset& b, double epsilon,
                                         double delta,
                                         const AuditOptions& options) {
  USERDP_ASSIGN_OR_RETURN(const bool neighbors, Neighboring(a, b));
  if (!neighbors) {
    return ArgumentError("audit datasets must differ in at most one user");
  }
  if (!std::isfinite(epsilon) || epsilon < 0) {
    return ArgumentError("epsilon must be finite and non-negative");
  }
  if (!(delta >= 0 && delta < 1))
    return ArgumentError("delta must be in [0,1)");
  if (options.trials < 1) return ArgumentError("trials must be positive");
  if (options.bins < 1) return ArgumentError("bins must be positive");
  if (!mechanism) return ArgumentError("mechanism is empty");
  USERDP_ASSIGN_OR_RETURN(
      const Vector xs,
      Sample(mechanism, a, options.trials, options.seed, 0, options.jobs));
  USERDP_ASSIGN_OR_RETURN(
      const Vector ys,
      Sample(mechanism, b, options.trials, options.seed, 1, options.jobs));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vector* v : {&xs, &ys}) {
    for (double x : *v) {
      if (!std::isfinite(x))
        return InternalError("mechanism output not finite");
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  const auto ha = Histogram(xs, lo, hi, options.bins);
  const auto hb = Histogram(ys, lo, hi, options.bins);
  AuditReport report;
  report.mechanism = name;
  report.epsilon = epsilon;
  report.delta = delta;
  report.trials = options.trials;
  report.threshold = options.slack * std::exp(epsilon);
  for (std::size_t k = 0; k < ha.size(); ++k) {
    for (const auto& [p, q] :
         {std::pair(ha[k], hb[k]), std::pair(hb[k], ha[k])}) {
      const double num = Wilson(p, options.trials, options.z).lo - delta;
      if (num <= 0) continue;
      const double den = Wilson(q, options.trials, options.z).hi;
      report.max_ratio = std::max(report.max_ratio, num / den);
    }
  }
  report.pass = report.max_ratio <= report.threshold;
  return report;
}

std::string AuditReportToJson(const AuditReport& report) {
  nlohmann::json j;
  j["mechanism"] = report.mechanism;
  j["eps"] = report.epsilon;
  j["delta"] = report.delta;
  j["trials"] = report.trials;
  j["max_ratio"] = report.max_ratio;
  j["pass"] = report.pass;
  return j.dump();
}

absl::StatusOr<std::vector<Vector>> HadamardOracle(std::size_t d) {
  if (d == 0 || (d & (d - 1)) != 0 || d > 16) {
    return ArgumentError(absl::StrFormat(
        "Hadamard oracle needs a power of two up to 16, got %d", d));
  }
  std::vector<Vector> h = {{1.0}};
  while (h.size() < d) {
    const std::size_t k = h.size();
    std::vector<Vector> next(2 * k, Vector(2 * k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        next[i][j] = h[i][j];
        next[i][j + k] = h[i][j];
        next[i + k][j] = h[i][j];
        next[i + k][j + k] = -h[i][j];
      }
    }
    h = std::move(next);
  }
  return h;
}

absl::StatusOr<Vector> ExpMechOracle(const Vector& costs, double epsilon) {
  if (costs.empty()) return ArgumentError("cost list is empty");
  if (!(epsilon > 0)) return ArgumentError("epsilon must be positive");
  Vector w(costs.size());
  double total = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    w[i] = std::exp(-epsilon * costs[i] / 2.0);
    total += w[i];
  }
  if (!(total > 0) || !std::isfinite(total)) {
    return ArgumentError("exponential weights under- or overflow");
  }
  for (double& v : w) v /= total;
  return w;
}

absl::StatusOr<ScalingFit> ScalingRegression(
    const std::vector<ScalingPoint>& points) {
  if (points.empty()) return ArgumentError("no scaling points");
  std::map<std::tuple<double, double, double>, std::pair<double, int>> cells;
  for (const auto& p : points) {
    for (double v : {p.n, p.m, p.epsilon, p.error}) {
      if (!(v > 0) || !std::isfinite(v)) {
        return ArgumentError("scaling points must be finite and positive");
      }
    }
    auto& cell = cells[{p.n, p.m, p.epsilon}];
    cell.first += p.error;
    cell.second += 1;
  }
  std::set<double> ns, ms, es;
  for (const auto& [key, value] : cells) {
    ns.insert(std::get<0>(key));
    ms.insert(std::get<1>(key));
    es.insert(std::get<2>(key));
  }
  std::vector<std::pair<std::string, int>> axes;
  const std::pair<std::string, const std::set<double>*> all[] = {
      {"n", &ns}, {"m", &ms}, {"eps", &es}};
  for (int a = 0; a < 3; ++a) {
    const auto& [axis, values] = all[a];
    if (values->size() == 1) continue;
    if (values->size() < 3) {
      return ArgumentError(absl::StrFormat(
          "axis %s has %d distinct values; at least 3 are needed", axis,
          values->size()));
    }
    axes.emplace_back(axis, a);
  }
  if (axes.empty()) return ArgumentError("no axis of the grid varies");
  const auto rows = static_cast<Eigen::Index>(cells.size());
  const auto cols = static_cast<Eigen::Index>(axes.size() + 1);
  if (rows <= cols - 1) return ArgumentError("too few grid cells to fit");
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  Eigen::Index r = 0;
  for (const auto& [key, value] : cells) {
    const double coords[] = {std::get<0>(key), std::get<1>(key),
                             std::get<2>(key)};
    x(r, 0) = 1.0;
    for (std::size_t c = 0; c < axes.size(); ++c) {
      x(r, static_cast<Eigen::Index>(c + 1)) = std::log(coords[axes[c].second]);
    }
    y(r) = std::log(value.first / value.second);
    ++r;
  }
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd beta = xtx.ldlt().solve(x.transpose() * y);
  const Eigen::VectorXd resid = y - x * beta;
  const double dof = static_cast<double>(rows - cols);
  const double s2 = dof > 0 ? resid.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov =
      s2 * xtx.ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
  ScalingFit fit;
  fit.intercept = beta(0);
  fit.cells = cells.size();
  for (std::size_t c = 0; c < axes.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c + 1);
    fit.slopes[axes[c].first] = {beta(i), std::sqrt(std::max(0.0, cov(i, i)))};
  }
  return fit;
}

absl::StatusOr<SlopeEstimate> FitLogLogSlope(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) return ShapeError("x and y differ in length");
  std::vector<ScalingPoint> points;
  for (std::size_t i = 0; i < x.size(); ++i) {
    points.push_back({x[i], 1.0, 1.0, y[i]});
  }
  USERDP_ASSIGN_OR_RETURN(const ScalingFit fit, ScalingRegression(points));
  return fit.slopes.at("n");
}

ScalarMechanism PrivateRangeMechanism(double epsilon, double tau,
                                      double bound) {
  return [=](const UserDataset& data,
             RandomSource& rng) -> absl::StatusOr<double> {
    USERDP_ASSIGN_OR_RETURN(
        const RangeInterval interval,
        PrivateRange(UserScalars(data), epsilon, tau, bound, rng));
    return 0.5 * (interval.lo + interval.hi);
  };
}

ScalarMechanism WinsorizedMean1DMechanism(double epsilon, double tau,
                                          double bound) {
  return [=](const UserDataset& data, RandomSource& rng) {
    return WinsorizedMean1D(UserScalars(data), epsilon, tau, bound, rng);
  };
}

ScalarMechanism PrivateSelectMechanism(double epsilon, std::size_t k,
                                       double gamma, double tau) {
  std::vector<Vector> params;
  for (std::size_t i = 0; i < k; ++i) {
    params.push_back({k == 1 ? 0.0
                             : -1.0 + 2.0 * static_cast<double>(i) /
                                          static_cast<double>(k - 1)});
  }
  auto hypotheses =
      std::make_shared<absl::StatusOr<HypothesisClass>>(HypothesisClass::Create(
          std::move(params), std::make_shared<const AbsoluteLoss>(), 2.0));
  return [=](const UserDataset& data,
             RandomSource& rng) -> absl::StatusOr<double> {
    if (!hypotheses->ok()) return hypotheses->status();
    USERDP_ASSIGN_OR_RETURN(
        const SelectionResult result,
        PrivateSelect(data, **hypotheses, epsilon, gamma, tau, 0, rng));
    return static_cast<double>(result.index);
  };
}

ScalarMechanism NoNoiseMeanMechanism() {
  return [](const UserDataset& data, RandomSource&) -> absl::StatusOr<double> {
    const Vector xs = UserScalars(data);
    double total = 0;
    for (double x : xs) total += x;
    return total / static_cast<double>(xs.size());
  };
}

}  // namespace userdp
