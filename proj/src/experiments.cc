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

#include "userdp/experiments.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "userdp/audit.h"
#include "userdp/core.h"
#include "userdp/errors.h"
#include "userdp/mean.h"
#include "userdp/optimize.h"
#include "userdp/sco.h"
#include "userdp/select.h"
#include "userdp/synth.h"

#ifndef USERDP_VERSION_STRING
#define USERDP_VERSION_STRING "unknown"
#endif

namespace userdp {
namespace {

using nlohmann::json;

constexpr char kCsvHeader[] =
    "experiment,n,m,eps,delta,d,trial,metric_name,metric_value";

struct Config {
  std::string experiment;
  std::uint64_t seed = 0;
  json params = json::object();
  std::string output_dir;
};

// Typed, tracked access to the params object. Every getter fails with a
// config error naming the key on a type or range problem.
class Params {
 public:
  explicit Params(const json& j) : j_(j) {}

  bool Has(const std::string& key) const { return j_.contains(key); }

  absl::StatusOr<double> Number(const std::string& key, double fallback) const {
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) return Bad(key, "a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) return Bad(key, "a finite number");
    return x;
  }

  absl::StatusOr<double> Positive(const std::string& key,
                                  double fallback) const {
    USERDP_ASSIGN_OR_RETURN(const double x, Number(key, fallback));
    if (!(x > 0)) return Bad(key, "positive");
    return x;
  }

  absl::StatusOr<std::size_t> Count(const std::string& key,
                                    std::size_t fallback) const {
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
      return Bad(key, "a positive integer");
    }
    return static_cast<std::size_t>(v.get<std::int64_t>());
  }

  absl::StatusOr<std::string> String(const std::string& key,
                                     const std::string& fallback) const {
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) return Bad(key, "a string");
    return v.get<std::string>();
  }

  // A positive number or a non-empty array of positive numbers.
  absl::StatusOr<std::vector<double>> Grid(const std::string& key,
                                           double fallback) const {
    if (!j_.contains(key)) return std::vector<double>{fallback};
    const json& v = j_.at(key);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const json& x : v) {
        if (!x.is_number()) return Bad(key, "a number or list of numbers");
        out.push_back(x.get<double>());
      }
    } else {
      return Bad(key, "a number or non-empty list of numbers");
    }
    for (double x : out) {
      if (!(x > 0) || !std::isfinite(x)) return Bad(key, "positive");
    }
    return out;
  }

  absl::StatusOr<std::vector<double>> IntegerGrid(const std::string& key,
                                                  double fallback) const {
    USERDP_ASSIGN_OR_RETURN(std::vector<double> out, Grid(key, fallback));
    for (double x : out) {
      if (x != std::floor(x)) return Bad(key, "integral");
    }
    return out;
  }

  absl::Status CheckKeys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) {
        return ConfigError(
            absl::StrFormat("unknown parameter '%s'; allowed: %s", key,
                            absl::StrJoin(allowed, ", ")));
      }
    }
    return absl::OkStatus();
  }

  const json& raw() const { return j_; }

 private:
  static absl::Status Bad(const std::string& key, const std::string& what) {
    return ConfigError(absl::StrFormat("parameter '%s' must be %s", key, what));
  }

  const json& j_;
};

struct Cell {
  double n = 0;
  double m = 0;
  double eps = 0;
};

struct Metric {
  std::string name;
  double value = 0.0;
};

using TrialFn = std::function<absl::StatusOr<std::vector<Metric>>(
    const Cell&, RandomSource&)>;

struct Plan {
  std::vector<Cell> cells;
  std::size_t trials = 1;
  double delta = 0.0;
  std::size_t d = 1;
  TrialFn trial;
  std::string default_metric;
};

struct Row {
  Cell cell;
  double delta = 0.0;
  std::size_t d = 0;
  std::size_t trial = 0;
  Metric metric;
};

const std::set<std::string> kGridKeys = {"n",     "m", "eps",
                                         "delta", "d", "trials"};

std::set<std::string> WithGrid(std::set<std::string> keys) {
  keys.insert(kGridKeys.begin(), kGridKeys.end());
  return keys;
}

const std::set<std::string> kMeanKeys =
    WithGrid({"estimator", "gamma", "family", "bound", "center", "sigma", "eta",
              "contaminant_center", "reference_samples"});
const std::set<std::string> kErmKeys =
    WithGrid({"loss", "mode", "variant", "steps", "tau", "gamma", "radius",
              "center", "data_sigma", "sigma", "bound"});
const std::set<std::string> kScoKeys =
    WithGrid({"center", "data_sigma", "sigma", "bound", "radius"});
const std::set<std::string> kSelectKeys =
    WithGrid({"k", "best_loss", "other_loss", "noise", "alpha", "tau", "gamma",
              "trial_cap"});
const std::set<std::string> kAuditKeys = {"trials", "eps", "mechanisms"};
const std::set<std::string> kScalingExtraKeys = {"base", "metric", "expect"};

absl::StatusOr<Config> ParseConfig(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return ConfigError("config is not valid JSON");
  if (!j.is_object()) return ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "experiment" && key != "seed" && key != "params" &&
        key != "output_dir") {
      return ConfigError(absl::StrFormat("unknown top-level key '%s'", key));
    }
  }
  Config config;
  if (!j.contains("experiment") || !j.at("experiment").is_string()) {
    return ConfigError("config needs a string 'experiment'");
  }
  config.experiment = j.at("experiment").get<std::string>();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      return ConfigError("'seed' must be a non-negative integer");
    }
    config.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) {
      return ConfigError("'params' must be an object");
    }
    config.params = j.at("params");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) {
      return ConfigError("'output_dir' must be a string");
    }
    config.output_dir = j.at("output_dir").get<std::string>();
  }
  return config;
}

absl::StatusOr<std::vector<Cell>> BuildGrid(const Params& p, double n0,
                                            double m0, double eps0) {
  USERDP_ASSIGN_OR_RETURN(const auto ns, p.IntegerGrid("n", n0));
  USERDP_ASSIGN_OR_RETURN(const auto ms, p.IntegerGrid("m", m0));
  USERDP_ASSIGN_OR_RETURN(const auto es, p.Grid("eps", eps0));
  std::vector<Cell> cells;
  for (double n : ns) {
    for (double m : ms) {
      for (double e : es) cells.push_back({n, m, e});
    }
  }
  return cells;
}

absl::Status CheckDelta(double delta) {
  if (!(delta > 0 && delta < 1)) {
    return ConfigError("parameter 'delta' must be in (0, 1)");
  }
  return absl::OkStatus();
}

Vector Filled(std::size_t d, double v) { return Vector(d, v); }

double SquaredDistance(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

absl::StatusOr<DistributionSpec> MakeSpec(const std::string& family,
                                          std::size_t d, double center,
                                          double sigma, double bound) {
  absl::StatusOr<Family> f = ParseFamily(family);
  if (!f.ok()) return ConfigError(std::string(f.status().message()));
  absl::StatusOr<DistributionSpec> spec;
  switch (*f) {
    case Family::kTruncatedGaussian:
      spec = DistributionSpec::TruncatedGaussian(Filled(d, center),
                                                 Filled(d, sigma), bound);
      break;
    case Family::kBoundedBall:
      spec = DistributionSpec::BoundedBall(Filled(d, center), Filled(d, sigma),
                                           bound);
      break;
    case Family::kFiniteSupport:
      spec = DistributionSpec::FiniteSupport(
          {Filled(d, std::clamp(center - sigma, -bound, bound)),
           Filled(d, std::clamp(center + sigma, -bound, bound))},
          {0.5, 0.5}, bound);
      break;
  }
  if (!spec.ok()) return ConfigError(std::string(spec.status().message()));
  return spec;
}

// Population mean, by Monte Carlo for families without a closed form.
Vector ReferenceMean(const DistributionSpec& spec, std::size_t samples,
                     std::uint64_t seed) {
  absl::StatusOr<Vector> exact = PopulationMean(spec);
  if (exact.ok()) return *exact;
  RandomSource rng(seed, 0x5eed);
  Vector total(spec.dim(), 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const Vector z = SampleItem(spec, rng);
    for (std::size_t j = 0; j < z.size(); ++j) total[j] += z[j];
  }
  for (double& v : total) v /= static_cast<double>(samples);
  return total;
}

absl::StatusOr<Plan> MeanPlan(const Params& p, std::uint64_t seed) {
  Plan plan;
  USERDP_ASSIGN_OR_RETURN(plan.cells, BuildGrid(p, 200, 16, 1.0));
  USERDP_ASSIGN_OR_RETURN(plan.trials, p.Count("trials", 20));
  USERDP_ASSIGN_OR_RETURN(plan.delta, p.Number("delta", 1e-5));
  USERDP_RETURN_IF_ERROR(CheckDelta(plan.delta));
  USERDP_ASSIGN_OR_RETURN(plan.d, p.Count("d", 8));
  USERDP_ASSIGN_OR_RETURN(const std::string estimator,
                          p.String("estimator", "user_level"));
  if (estimator != "user_level" && estimator != "1d") {
    return ConfigError("'estimator' must be user_level or 1d");
  }
  if (estimator == "1d" && plan.d != 1) {
    return ConfigError("the 1d estimator needs d = 1");
  }
  USERDP_ASSIGN_OR_RETURN(const double gamma, p.Number("gamma", 0.01));
  if (!(gamma > 0 && gamma < 1)) return ConfigError("'gamma' must be in (0,1)");
  USERDP_ASSIGN_OR_RETURN(const std::string family,
                          p.String("family", "bounded_ball"));
  USERDP_ASSIGN_OR_RETURN(const double bound, p.Positive("bound", 1.0));
  USERDP_ASSIGN_OR_RETURN(const double center, p.Number("center", 0.1));
  USERDP_ASSIGN_OR_RETURN(const double sigma, p.Number("sigma", 0.3));
  if (sigma < 0) return ConfigError("'sigma' must be non-negative");
  // eta is a contamination rate, or "tolerable" for 1 / (B (mn + 2)) per
  // cell, the level at which contamination costs at most one extra term.
  bool tolerable_eta = false;
  double eta_value = 0.0;
  if (p.Has("eta") && p.raw().at("eta").is_string()) {
    if (p.raw().at("eta").get<std::string>() != "tolerable") {
      return ConfigError("'eta' must be a number or \"tolerable\"");
    }
    tolerable_eta = true;
  } else {
    USERDP_ASSIGN_OR_RETURN(eta_value, p.Number("eta", 0.0));
    if (!(eta_value >= 0 && eta_value <= 1)) {
      return ConfigError("'eta' must be in [0, 1]");
    }
  }
  USERDP_ASSIGN_OR_RETURN(const double contaminant_center,
                          p.Number("contaminant_center", -0.5));
  USERDP_ASSIGN_OR_RETURN(const std::size_t reference_samples,
                          p.Count("reference_samples", 200000));
  USERDP_ASSIGN_OR_RETURN(const DistributionSpec base,
                          MakeSpec(family, plan.d, center, sigma, bound));
  USERDP_ASSIGN_OR_RETURN(
      const DistributionSpec contaminant,
      MakeSpec(family, plan.d, contaminant_center, sigma, bound));
  const Vector reference = ReferenceMean(base, reference_samples, seed);
  const double delta = plan.delta;
  plan.default_metric = "sq_error";
  plan.trial = [=](const Cell& cell,
                   RandomSource& rng) -> absl::StatusOr<std::vector<Metric>> {
    RandomSource data_rng = rng.Split();
    RandomSource est_rng = rng.Split();
    const auto n = static_cast<std::size_t>(cell.n);
    const auto m = static_cast<std::size_t>(cell.m);
    const double eta =
        tolerable_eta ? 1.0 / (bound * (cell.m * cell.n + 2.0)) : eta_value;
    absl::StatusOr<UserDataset> data =
        eta > 0 ? SampleUserDataset(HeterogeneitySpec{base, contaminant, eta},
                                    n, m, data_rng)
                : SampleUserDataset(base, n, m, data_rng);
    USERDP_RETURN_IF_ERROR(data.status());
    Vector estimate;
    if (estimator == "1d") {
      USERDP_ASSIGN_OR_RETURN(const double tau,
                              UserAverageRadius(*data, gamma));
      USERDP_ASSIGN_OR_RETURN(const std::vector<Vector> avgs,
                              UserAverages(*data));
      Vector xs;
      for (const auto& a : avgs) xs.push_back(a.front());
      USERDP_ASSIGN_OR_RETURN(
          const double v, WinsorizedMean1D(xs, cell.eps, tau, bound, est_rng));
      estimate = {v};
    } else {
      USERDP_ASSIGN_OR_RETURN(
          estimate,
          UserLevelBoundedMean(*data, {cell.eps, delta}, gamma, est_rng));
    }
    return std::vector<Metric>{
        {"sq_error", SquaredDistance(estimate, reference)}};
  };
  return plan;
}

// Minimizer of the empirical loss over the ball by exact projected gradient
// descent, or in closed form for the quadratic loss.
absl::StatusOr<Vector> EmpiricalMinimizer(const LossModel& model,
                                          const UserDataset& data,
                                          const FeasibleSet& set) {
  if (model.name() == "quadratic") {
    Vector mean(data.dim(), 0.0);
    std::size_t count = 0;
    for (const auto& user : data.users()) {
      for (const auto& item : user.items) {
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += item[j];
        ++count;
      }
    }
    for (double& v : mean) v /= static_cast<double>(count);
    return set.Project(mean);
  }
  const double h = model.smoothness() > 0 ? model.smoothness() : 1.0;
  Vector theta = set.center();
  for (int t = 0; t < 3000; ++t) {
    USERDP_ASSIGN_OR_RETURN(const Vector g,
                            EmpiricalGradient(model, data, theta));
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= g[j] / h;
    theta = set.Project(theta);
  }
  return theta;
}

absl::StatusOr<Plan> ErmPlan(const Params& p) {
  Plan plan;
  USERDP_ASSIGN_OR_RETURN(plan.cells, BuildGrid(p, 400, 16, 2.0));
  USERDP_ASSIGN_OR_RETURN(plan.trials, p.Count("trials", 20));
  USERDP_ASSIGN_OR_RETURN(plan.delta, p.Number("delta", 1e-5));
  USERDP_RETURN_IF_ERROR(CheckDelta(plan.delta));
  USERDP_ASSIGN_OR_RETURN(plan.d, p.Count("d", 4));
  USERDP_ASSIGN_OR_RETURN(const std::string loss,
                          p.String("loss", "quadratic"));
  if (loss != "quadratic" && loss != "logistic") {
    return ConfigError("'loss' must be quadratic or logistic");
  }
  USERDP_ASSIGN_OR_RETURN(const std::string mode, p.String("mode", "localize"));
  if (mode != "localize" && mode != "first_order") {
    return ConfigError("'mode' must be localize or first_order");
  }
  USERDP_ASSIGN_OR_RETURN(const std::string variant_name,
                          p.String("variant", "convex"));
  absl::StatusOr<Variant> variant = ParseVariant(variant_name);
  if (!variant.ok())
    return ConfigError(std::string(variant.status().message()));
  if (loss == "logistic" && *variant == Variant::kStronglyConvex) {
    return ConfigError("the logistic loss is not strongly convex");
  }
  if (loss == "logistic" && mode == "localize") {
    return ConfigError("localization needs a strongly convex loss");
  }
  USERDP_ASSIGN_OR_RETURN(const std::size_t steps, p.Count("steps", 50));
  USERDP_ASSIGN_OR_RETURN(const double radius, p.Positive("radius", 1.0));
  USERDP_ASSIGN_OR_RETURN(const double center, p.Number("center", 0.2));
  USERDP_ASSIGN_OR_RETURN(const double data_sigma,
                          p.Positive("data_sigma", 0.1));
  USERDP_ASSIGN_OR_RETURN(const double sigma, p.Positive("sigma", data_sigma));
  USERDP_ASSIGN_OR_RETURN(const double bound, p.Positive("bound", 1.0));
  USERDP_ASSIGN_OR_RETURN(const double gamma, p.Number("gamma", 0.01));
  if (!(gamma > 0 && gamma < 1)) return ConfigError("'gamma' must be in (0,1)");
  USERDP_ASSIGN_OR_RETURN(const double tau_param, p.Number("tau", 0.0));
  const std::size_t d = plan.d;
  const double delta = plan.delta;
  const std::string family =
      loss == "logistic" ? "bounded_ball" : "truncated_gaussian";
  USERDP_ASSIGN_OR_RETURN(const DistributionSpec spec,
                          MakeSpec(family, d, center, data_sigma, bound));
  const double item_norm =
      loss == "logistic" ? bound : bound * std::sqrt(static_cast<double>(d));
  const Variant v = *variant;
  plan.default_metric = "sq_dist";
  plan.trial = [=](const Cell& cell,
                   RandomSource& rng) -> absl::StatusOr<std::vector<Metric>> {
    RandomSource data_rng = rng.Split();
    RandomSource est_rng = rng.Split();
    const auto n = static_cast<std::size_t>(cell.n);
    const auto m = static_cast<std::size_t>(cell.m);
    USERDP_ASSIGN_OR_RETURN(const FeasibleSet set,
                            FeasibleSet::Ball(Filled(d, 0.0), radius));
    absl::StatusOr<UserDataset> data =
        loss == "logistic"
            ? SampleLogisticDataset(spec, Filled(d, 1.0), n, m, data_rng)
            : SampleUserDataset(spec, n, m, data_rng);
    USERDP_RETURN_IF_ERROR(data.status());
    USERDP_ASSIGN_OR_RETURN(const auto model,
                            MakeLoss(loss, d, item_norm, set));
    USERDP_ASSIGN_OR_RETURN(const Vector best,
                            EmpiricalMinimizer(*model, *data, set));
    const PrivacyBudget budget{cell.eps, delta};
    Vector theta;
    if (mode == "localize") {
      USERDP_ASSIGN_OR_RETURN(
          OptimizationResult r,
          LocalizeStronglyConvex(*data, *model, set, budget, sigma, est_rng));
      theta = std::move(r.theta);
    } else {
      double tau = tau_param;
      if (!(tau > 0)) {
        USERDP_ASSIGN_OR_RETURN(
            tau, GradientConcentrationRadius(sigma, d, m, radius,
                                             model->smoothness(), n, gamma));
      }
      USERDP_ASSIGN_OR_RETURN(
          OptimizationResult r,
          WinsorizedFirstOrder(*data, *model, set, steps, budget, tau, gamma, v,
                               est_rng));
      theta = std::move(r.theta);
    }
    USERDP_ASSIGN_OR_RETURN(const double l_theta,
                            EmpiricalLoss(*model, *data, theta));
    USERDP_ASSIGN_OR_RETURN(const double l_best,
                            EmpiricalLoss(*model, *data, best));
    return std::vector<Metric>{{"sq_dist", SquaredDistance(theta, best)},
                               {"excess_loss", l_theta - l_best}};
  };
  return plan;
}

absl::StatusOr<Plan> ScoPlan(const Params& p) {
  Plan plan;
  USERDP_ASSIGN_OR_RETURN(plan.cells, BuildGrid(p, 512, 16, 2.0));
  USERDP_ASSIGN_OR_RETURN(plan.trials, p.Count("trials", 20));
  USERDP_ASSIGN_OR_RETURN(plan.delta, p.Number("delta", 1e-6));
  USERDP_RETURN_IF_ERROR(CheckDelta(plan.delta));
  USERDP_ASSIGN_OR_RETURN(plan.d, p.Count("d", 4));
  USERDP_ASSIGN_OR_RETURN(const double center, p.Number("center", 0.3));
  USERDP_ASSIGN_OR_RETURN(const double data_sigma,
                          p.Positive("data_sigma", 1.0));
  USERDP_ASSIGN_OR_RETURN(const double sigma, p.Positive("sigma", data_sigma));
  USERDP_ASSIGN_OR_RETURN(const double bound, p.Positive("bound", 1.0));
  USERDP_ASSIGN_OR_RETURN(const double radius, p.Positive("radius", 1.0));
  for (const Cell& c : plan.cells) {
    if (plan.delta > 1.0 / (c.n * c.n)) {
      return ConfigError(absl::StrFormat(
          "phased ERM needs delta <= 1/n^2; n = %g allows at most %g", c.n,
          1.0 / (c.n * c.n)));
    }
  }
  const std::size_t d = plan.d;
  const double delta = plan.delta;
  USERDP_ASSIGN_OR_RETURN(
      const DistributionSpec spec,
      MakeSpec("truncated_gaussian", d, center, data_sigma, bound));
  USERDP_ASSIGN_OR_RETURN(const Vector ez, PopulationMean(spec));
  plan.default_metric = "excess_risk";
  plan.trial = [=](const Cell& cell,
                   RandomSource& rng) -> absl::StatusOr<std::vector<Metric>> {
    RandomSource data_rng = rng.Split();
    RandomSource est_rng = rng.Split();
    USERDP_ASSIGN_OR_RETURN(
        const UserDataset data,
        SampleUserDataset(spec, static_cast<std::size_t>(cell.n),
                          static_cast<std::size_t>(cell.m), data_rng));
    USERDP_ASSIGN_OR_RETURN(const FeasibleSet set,
                            FeasibleSet::Ball(Filled(d, 0.0), radius));
    USERDP_ASSIGN_OR_RETURN(
        const auto model,
        MakeLoss("linear", d, bound * std::sqrt(static_cast<double>(d)), set));
    USERDP_ASSIGN_OR_RETURN(
        const PhasedErmResult r,
        PhasedErm(data, model, set, {cell.eps, delta}, sigma, est_rng));
    // Population risk -<theta, EZ> is minimized at R EZ / ||EZ||.
    const double excess = radius * Norm2(ez) - Dot(r.theta, ez);
    return std::vector<Metric>{{"excess_risk", excess},
                               {"phases", static_cast<double>(r.plan.t_max)}};
  };
  return plan;
}

absl::StatusOr<Plan> SelectPlan(const Params& p) {
  Plan plan;
  USERDP_ASSIGN_OR_RETURN(plan.cells, BuildGrid(p, 400, 16, 1.0));
  USERDP_ASSIGN_OR_RETURN(plan.trials, p.Count("trials", 200));
  plan.delta = 0.0;
  if (p.Has("delta")) return ConfigError("select is pure DP; drop 'delta'");
  if (p.Has("d")) return ConfigError("select takes 'k', not 'd'");
  USERDP_ASSIGN_OR_RETURN(const std::size_t k, p.Count("k", 16));
  USERDP_ASSIGN_OR_RETURN(const double best_loss, p.Number("best_loss", -0.65));
  USERDP_ASSIGN_OR_RETURN(const double other_loss,
                          p.Number("other_loss", 0.62));
  USERDP_ASSIGN_OR_RETURN(const double noise, p.Number("noise", 0.05));
  if (noise < 0) return ConfigError("'noise' must be non-negative");
  if (std::max(std::abs(best_loss), std::abs(other_loss)) + noise > 1.0) {
    return ConfigError("losses plus noise must stay within [-1, 1]");
  }
  USERDP_ASSIGN_OR_RETURN(const double alpha, p.Number("alpha", 0.05));
  if (!(alpha > 0 && alpha <= 1))
    return ConfigError("'alpha' must be in (0,1]");
  USERDP_ASSIGN_OR_RETURN(const double tau_param, p.Number("tau", 0.0));
  USERDP_ASSIGN_OR_RETURN(const double gamma_param, p.Number("gamma", 0.0));
  if (gamma_param < 0 || gamma_param > 1) {
    return ConfigError("'gamma' must be in (0, 1]");
  }
  USERDP_ASSIGN_OR_RETURN(const std::size_t cap_param, p.Count("trial_cap", 1));
  const std::int64_t cap =
      p.Has("trial_cap") ? static_cast<std::int64_t>(cap_param) : 0;
  plan.d = k;
  std::vector<Vector> params;
  for (std::size_t i = 0; i < k; ++i) {
    Vector e(k, 0.0);
    e[i] = -1.0;
    params.push_back(std::move(e));
  }
  auto loss = std::make_shared<const LinearLoss>(k, std::sqrt(double(k)));
  USERDP_ASSIGN_OR_RETURN(const HypothesisClass hypotheses,
                          HypothesisClass::Create(params, loss, 1.0));
  plan.default_metric = "correct";
  plan.trial = [=](const Cell& cell,
                   RandomSource& rng) -> absl::StatusOr<std::vector<Metric>> {
    RandomSource data_rng = rng.Split();
    RandomSource est_rng = rng.Split();
    const auto n = static_cast<std::size_t>(cell.n);
    const auto m = static_cast<std::size_t>(cell.m);
    const std::size_t best = data_rng.UniformIndex(k);
    std::vector<UserRecord> users(n);
    for (auto& user : users) {
      for (std::size_t j = 0; j < m; ++j) {
        Vector z(k);
        for (std::size_t i = 0; i < k; ++i) {
          z[i] = (i == best ? best_loss : other_loss) +
                 noise * (2.0 * data_rng.Uniform() - 1.0);
        }
        user.items.push_back(std::move(z));
      }
    }
    USERDP_ASSIGN_OR_RETURN(
        const UserDataset data,
        UserDataset::Create(k, BoundKind::kLinf, 1.0, std::move(users)));
    double tau = tau_param;
    if (!(tau > 0)) {
      USERDP_ASSIGN_OR_RETURN(tau, DefaultTauForSelection(1.0, k, n, m, alpha));
    }
    double gamma = gamma_param;
    if (!(gamma > 0)) {
      USERDP_ASSIGN_OR_RETURN(gamma, DefaultStopProbability(k, alpha));
    }
    USERDP_ASSIGN_OR_RETURN(
        const SelectionResult r,
        PrivateSelect(data, hypotheses, cell.eps, gamma, tau, cap, est_rng));
    return std::vector<Metric>{{"correct", r.index == best ? 1.0 : 0.0},
                               {"value", r.value},
                               {"rounds", static_cast<double>(r.rounds)},
                               {"capped", r.capped ? 1.0 : 0.0}};
  };
  return plan;
}

absl::StatusOr<Plan> GridPlan(const std::string& experiment, const Params& p,
                              std::uint64_t seed) {
  if (experiment == "mean") return MeanPlan(p, seed);
  if (experiment == "erm") return ErmPlan(p);
  if (experiment == "sco") return ScoPlan(p);
  if (experiment == "select") return SelectPlan(p);
  return ConfigError(
      absl::StrFormat("'%s' is not a grid experiment", experiment));
}

const std::set<std::string>& GridKeys(const std::string& experiment) {
  static const std::set<std::string> kEmpty;
  if (experiment == "mean") return kMeanKeys;
  if (experiment == "erm") return kErmKeys;
  if (experiment == "sco") return kScoKeys;
  if (experiment == "select") return kSelectKeys;
  return kEmpty;
}

// Runs every (cell, trial) pair, spreading work over `jobs` threads, and
// returns rows in (cell, trial, metric) order.
absl::StatusOr<std::vector<Row>> RunPlan(const Plan& plan, std::uint64_t seed,
                                         std::size_t jobs) {
  const std::size_t total = plan.cells.size() * plan.trials;
  std::vector<absl::StatusOr<std::vector<Metric>>> results(
      total, absl::StatusOr<std::vector<Metric>>(std::vector<Metric>{}));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t c = i / plan.trials;
      const std::size_t t = i % plan.trials;
      RandomSource rng(seed ^ static_cast<std::uint64_t>(t),
                       static_cast<std::uint64_t>(c));
      results[i] = plan.trial(plan.cells[c], rng);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, 256);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }
  std::vector<Row> rows;
  for (std::size_t i = 0; i < total; ++i) {
    if (!results[i].ok()) return results[i].status();
    for (const Metric& metric : *results[i]) {
      rows.push_back({plan.cells[i / plan.trials], plan.delta, plan.d,
                      i % plan.trials, metric});
    }
  }
  return rows;
}

std::string RenderCsv(const std::string& experiment,
                      const std::vector<Row>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const Row& r : rows) {
    out += absl::StrFormat(
        "%s,%s,%s,%s,%s,%d,%d,%s,%s\n", experiment, FormatDouble(r.cell.n),
        FormatDouble(r.cell.m), FormatDouble(r.cell.eps), FormatDouble(r.delta),
        r.d, r.trial, r.metric.name, FormatDouble(r.metric.value));
  }
  return out;
}

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return IoError(absl::StrFormat("cannot write %s", path.string()));
  out << contents;
  out.close();
  if (!out) return IoError(absl::StrFormat("failed writing %s", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return IoError(absl::StrFormat("cannot read %s", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::StatusOr<ScalingFit> FitRows(const std::vector<Row>& rows,
                                   const std::string& metric) {
  std::vector<ScalingPoint> points;
  std::map<std::tuple<double, double, double>, std::pair<double, int>> cells;
  for (const Row& r : rows) {
    if (r.metric.name != metric) continue;
    auto& c = cells[{r.cell.n, r.cell.m, r.cell.eps}];
    c.first += r.metric.value;
    c.second += 1;
  }
  if (cells.empty()) {
    return ArgumentError(absl::StrFormat("no rows for metric '%s'", metric));
  }
  for (const auto& [key, value] : cells) {
    points.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                      value.first / value.second});
  }
  return ScalingRegression(points);
}

json FitToJson(const ScalingFit& fit, const std::string& metric) {
  json j;
  j["metric"] = metric;
  j["cells"] = fit.cells;
  j["intercept"] = fit.intercept;
  json slopes = json::object();
  for (const auto& [axis, s] : fit.slopes) {
    slopes[axis] = {{"slope", s.slope}, {"std_error", s.std_error}};
  }
  j["slopes"] = slopes;
  return j;
}

struct Outcome {
  std::vector<Row> rows;
  bool acceptance_ok = true;
  std::vector<std::string> messages;
  // Extra files to write, by name.
  std::vector<std::pair<std::string, std::string>> sidecars;
};

struct AuditCase {
  std::string name;
  ScalarMechanism mechanism;
  UserDataset a;
  UserDataset b;
  bool expect_pass;
};

absl::StatusOr<UserDataset> ScalarUsers(const Vector& xs) {
  std::vector<UserRecord> users;
  for (double x : xs) users.push_back(UserRecord{{{x}}});
  return UserDataset::Create(1, BoundKind::kLinf, 1.0, std::move(users));
}

absl::StatusOr<std::vector<AuditCase>> StandardAuditCases(double eps) {
  std::vector<AuditCase> cases;
  {
    USERDP_ASSIGN_OR_RETURN(UserDataset a,
                            ScalarUsers({0.10, 0.12, 0.15, 0.20, 0.22, 0.25}));
    USERDP_ASSIGN_OR_RETURN(UserDataset b, a.WithUser(5, UserRecord{{{0.9}}}));
    cases.push_back({"private_range", PrivateRangeMechanism(eps, 0.1, 1.0),
                     std::move(a), std::move(b), true});
  }
  USERDP_ASSIGN_OR_RETURN(
      UserDataset a8,
      ScalarUsers({0.05, 0.08, 0.10, 0.12, 0.15, 0.18, 0.20, 0.22}));
  USERDP_ASSIGN_OR_RETURN(UserDataset b8, a8.WithUser(7, UserRecord{{{0.9}}}));
  cases.push_back({"winsorized_mean_1d",
                   WinsorizedMean1DMechanism(eps, 0.1, 1.0), a8, b8, true});
  USERDP_ASSIGN_OR_RETURN(UserDataset bs, a8.WithUser(7, UserRecord{{{-0.9}}}));
  cases.push_back({"private_select", PrivateSelectMechanism(eps, 3, 0.1, 0.25),
                   a8, bs, true});
  cases.push_back({"no_noise_mean", NoNoiseMeanMechanism(), a8, b8, false});
  return cases;
}

absl::StatusOr<Outcome> RunAudit(const Params& p, std::uint64_t seed,
                                 std::size_t jobs) {
  USERDP_RETURN_IF_ERROR(p.CheckKeys(kAuditKeys));
  USERDP_ASSIGN_OR_RETURN(const std::size_t trials, p.Count("trials", 100000));
  USERDP_ASSIGN_OR_RETURN(const double eps, p.Positive("eps", 1.0));
  USERDP_ASSIGN_OR_RETURN(std::vector<AuditCase> cases,
                          StandardAuditCases(eps));
  std::set<std::string> wanted;
  if (p.Has("mechanisms")) {
    const json& list = p.raw().at("mechanisms");
    if (!list.is_array()) return ConfigError("'mechanisms' must be a list");
    for (const json& name : list) {
      if (!name.is_string()) return ConfigError("'mechanisms' holds strings");
      wanted.insert(name.get<std::string>());
    }
    for (const auto& name : wanted) {
      if (std::none_of(cases.begin(), cases.end(),
                       [&](const AuditCase& c) { return c.name == name; })) {
        return ConfigError(absl::StrFormat("unknown mechanism '%s'", name));
      }
    }
  }
  Outcome out;
  json reports = json::array();
  for (const AuditCase& c : cases) {
    if (!wanted.empty() && !wanted.contains(c.name)) continue;
    AuditOptions options;
    options.trials = static_cast<std::int64_t>(trials);
    options.seed = seed;
    options.jobs = jobs;
    USERDP_ASSIGN_OR_RETURN(
        const AuditReport report,
        DpRatioAudit(c.name, c.mechanism, c.a, c.b, eps, 0.0, options));
    reports.push_back(json::parse(AuditReportToJson(report)));
    const Cell cell{static_cast<double>(c.a.num_users()), 1.0, eps};
    out.rows.push_back(
        {cell, 0.0, 1, 0, {c.name + ".max_ratio", report.max_ratio}});
    out.rows.push_back(
        {cell, 0.0, 1, 0, {c.name + ".pass", report.pass ? 1.0 : 0.0}});
    const bool as_expected = report.pass == c.expect_pass;
    out.messages.push_back(absl::StrFormat(
        "%s: max ratio %.4f vs threshold %.4f -> %s (expected %s)", c.name,
        report.max_ratio, report.threshold, report.pass ? "PASS" : "FAIL",
        c.expect_pass ? "PASS" : "FAIL"));
    out.acceptance_ok = out.acceptance_ok && as_expected;
  }
  out.sidecars.emplace_back("audit.json", reports.dump(2) + "\n");
  return out;
}

absl::StatusOr<Outcome> RunScaling(const Params& p, std::uint64_t seed,
                                   std::size_t jobs) {
  USERDP_ASSIGN_OR_RETURN(const std::string base, p.String("base", "mean"));
  if (base != "mean" && base != "erm" && base != "sco") {
    return ConfigError("'base' must be mean, erm or sco");
  }
  std::set<std::string> allowed = GridKeys(base);
  allowed.insert(kScalingExtraKeys.begin(), kScalingExtraKeys.end());
  USERDP_RETURN_IF_ERROR(p.CheckKeys(allowed));
  json base_params = p.raw();
  for (const auto& key : kScalingExtraKeys) base_params.erase(key);
  const Params bp(base_params);
  USERDP_ASSIGN_OR_RETURN(const Plan plan, GridPlan(base, bp, seed));
  USERDP_ASSIGN_OR_RETURN(const std::string metric,
                          p.String("metric", plan.default_metric));
  std::map<std::string, std::pair<double, double>> expect;
  if (p.Has("expect")) {
    const json& e = p.raw().at("expect");
    if (!e.is_object()) return ConfigError("'expect' must be an object");
    for (const auto& [axis, band] : e.items()) {
      if (axis != "n" && axis != "m" && axis != "eps") {
        return ConfigError("'expect' keys must be n, m or eps");
      }
      if (!band.is_array() || band.size() != 2 || !band[0].is_number() ||
          !band[1].is_number()) {
        return ConfigError("'expect' bands must be [low, high]");
      }
      expect[axis] = {band[0].get<double>(), band[1].get<double>()};
    }
  }
  Outcome out;
  USERDP_ASSIGN_OR_RETURN(out.rows, RunPlan(plan, seed, jobs));
  absl::StatusOr<ScalingFit> fit = FitRows(out.rows, metric);
  if (!fit.ok()) return ConfigError(std::string(fit.status().message()));
  json j = FitToJson(*fit, metric);
  j["base"] = base;
  json checks = json::object();
  for (const auto& [axis, band] : expect) {
    const auto it = fit->slopes.find(axis);
    const bool ok = it != fit->slopes.end() && it->second.slope >= band.first &&
                    it->second.slope <= band.second;
    checks[axis] = {{"low", band.first}, {"high", band.second}, {"ok", ok}};
    out.acceptance_ok = out.acceptance_ok && ok;
    out.messages.push_back(absl::StrFormat(
        "%s-slope %s in [%g, %g]: %s", axis,
        it == fit->slopes.end() ? "missing" : FormatDouble(it->second.slope),
        band.first, band.second, ok ? "ok" : "OUT OF BAND"));
  }
  j["expect"] = checks;
  out.sidecars.emplace_back("slopes.json", j.dump(2) + "\n");
  return out;
}

absl::StatusOr<Outcome> Dispatch(const Config& config, std::size_t jobs,
                                 bool dry_run) {
  const Params p(config.params);
  if (config.experiment == "audit") {
    if (dry_run) {
      USERDP_RETURN_IF_ERROR(p.CheckKeys(kAuditKeys));
      USERDP_RETURN_IF_ERROR(p.Count("trials", 1).status());
      USERDP_RETURN_IF_ERROR(p.Positive("eps", 1.0).status());
      return Outcome{};
    }
    return RunAudit(p, config.seed, jobs);
  }
  if (config.experiment == "scaling") {
    if (dry_run) {
      USERDP_ASSIGN_OR_RETURN(const std::string base, p.String("base", "mean"));
      if (base != "mean" && base != "erm" && base != "sco") {
        return ConfigError("'base' must be mean, erm or sco");
      }
      std::set<std::string> allowed = GridKeys(base);
      allowed.insert(kScalingExtraKeys.begin(), kScalingExtraKeys.end());
      USERDP_RETURN_IF_ERROR(p.CheckKeys(allowed));
      return Outcome{};
    }
    return RunScaling(p, config.seed, jobs);
  }
  const auto& keys = GridKeys(config.experiment);
  if (keys.empty()) {
    return ConfigError(absl::StrFormat(
        "unknown experiment '%s'; expected mean, erm, sco, select, audit or "
        "scaling",
        config.experiment));
  }
  USERDP_RETURN_IF_ERROR(p.CheckKeys(keys));
  USERDP_ASSIGN_OR_RETURN(const Plan plan,
                          GridPlan(config.experiment, p, config.seed));
  Outcome out;
  if (dry_run) return out;
  USERDP_ASSIGN_OR_RETURN(out.rows, RunPlan(plan, config.seed, jobs));
  return out;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
             nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += absl::StrFormat("%02x", digest[i]);
  }
  return hex;
}

absl::Status ValidateConfig(std::string_view config_json) {
  USERDP_ASSIGN_OR_RETURN(const Config config, ParseConfig(config_json));
  return Dispatch(config, 1, /*dry_run=*/true).status();
}

absl::StatusOr<RunSummary> RunExperiment(std::string_view config_json,
                                         const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  USERDP_ASSIGN_OR_RETURN(Config config, ParseConfig(config_json));
  if (options.seed_override) config.seed = *options.seed_override;
  if (!options.output_dir.empty()) config.output_dir = options.output_dir;
  if (config.output_dir.empty()) {
    return ConfigError("no output directory: set 'output_dir' or --output");
  }
  USERDP_RETURN_IF_ERROR(Dispatch(config, 1, /*dry_run=*/true).status());
  USERDP_ASSIGN_OR_RETURN(Outcome outcome,
                          Dispatch(config, options.jobs, /*dry_run=*/false));
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return IoError(
        absl::StrFormat("cannot create %s: %s", dir.string(), ec.message()));
  }
  USERDP_RETURN_IF_ERROR(WriteFile(dir / "results.csv",
                                   RenderCsv(config.experiment, outcome.rows)));
  for (const auto& [name, contents] : outcome.sidecars) {
    USERDP_RETURN_IF_ERROR(WriteFile(dir / name, contents));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  json manifest;
  manifest["experiment"] = config.experiment;
  manifest["seed"] = config.seed;
  manifest["config_sha256"] = Sha256Hex(config_json);
  manifest["version"] = USERDP_VERSION_STRING;
  manifest["wall_time_seconds"] = wall;
  manifest["jobs"] = options.jobs;
  manifest["rows"] = outcome.rows.size();
  manifest["acceptance_ok"] = outcome.acceptance_ok;
  USERDP_RETURN_IF_ERROR(
      WriteFile(dir / "manifest.json", manifest.dump(2) + "\n"));
  RunSummary summary;
  summary.experiment = config.experiment;
  summary.output_dir = dir.string();
  summary.rows = outcome.rows.size();
  summary.acceptance_ok = outcome.acceptance_ok;
  summary.messages = std::move(outcome.messages);
  return summary;
}

absl::StatusOr<std::string> ReportScaling(const std::string& output_dir,
                                          const std::string& metric) {
  const std::filesystem::path dir(output_dir);
  USERDP_ASSIGN_OR_RETURN(const std::string csv, ReadFile(dir / "results.csv"));
  std::vector<std::string> lines = absl::StrSplit(csv, '\n', absl::SkipEmpty());
  if (lines.empty() || lines.front() != kCsvHeader) {
    return ArgumentError("results.csv has an unexpected header");
  }
  std::vector<Row> rows;
  std::string chosen = metric;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = absl::StrSplit(lines[i], ',');
    if (f.size() != 9) {
      return ArgumentError(
          absl::StrFormat("results.csv line %d is malformed", i + 1));
    }
    Row r;
    try {
      r.cell = {std::stod(f[1]), std::stod(f[2]), std::stod(f[3])};
      r.metric = {f[7], std::stod(f[8])};
    } catch (const std::exception&) {
      return ArgumentError(absl::StrFormat(
          "results.csv line %d has a non-numeric field", i + 1));
    }
    if (chosen.empty()) chosen = r.metric.name;
    rows.push_back(std::move(r));
  }
  USERDP_ASSIGN_OR_RETURN(const ScalingFit fit, FitRows(rows, chosen));
  const std::string text = FitToJson(fit, chosen).dump(2) + "\n";
  USERDP_RETURN_IF_ERROR(WriteFile(dir / "slopes.json", text));
  return text;
}

}  // namespace userdp
