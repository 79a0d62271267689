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

#include "userdp/optimize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"
#include "userdp/instrumentation.h"
#include "userdp/mean.h"

namespace userdp {
namespace {

absl::Status CheckModelShapes(const LossModel& model, const UserDataset& data,
                              std::size_t theta_dim) {
  if (model.item_dim() != data.dim()) {
    return ShapeError(
        absl::StrFormat("model expects items of length %d, data "
                        "has %d",
                        model.item_dim(), data.dim()));
  }
  if (model.dim() != theta_dim) {
    return ShapeError(absl::StrFormat("model parameter has length %d, got %d",
                                      model.dim(), theta_dim));
  }
  return absl::OkStatus();
}

void Axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

absl::Status CheckGradient(std::span<const double> g, std::size_t dim) {
  if (g.size() != dim) {
    return ShapeError(
        absl::StrFormat("gradient has length %d, expected %d", g.size(), dim));
  }
  for (double v : g) {
    if (!std::isfinite(v)) return ArgumentError("gradient is not finite");
  }
  return absl::OkStatus();
}

Vector ProjectedStep(const FeasibleSet& set, std::span<const double> theta,
                     std::span<const double> g, double step) {
  Vector next(theta.begin(), theta.end());
  Axpy(-step, g, next);
  return set.Project(next);
}

}  // namespace

Vector LossModel::GradientAt(std::span<const double> theta,
                             std::span<const double> z) const {
  Vector out(dim(), 0.0);
  Gradient(theta, z, out);
  return out;
}

absl::StatusOr<std::shared_ptr<const RegularizedLoss>> RegularizedLoss::Create(
    std::shared_ptr<const LossModel> base, double lambda, Vector anchor,
    double diameter) {
  if (base == nullptr) return ArgumentError("base loss is null");
  if (!std::isfinite(lambda) || lambda < 0) {
    return ArgumentError("lambda must be finite and non-negative");
  }
  if (anchor.size() != base->dim()) {
    return ShapeError("anchor length does not match the loss dimension");
  }
  if (!std::isfinite(diameter) || diameter < 0) {
    return ArgumentError("diameter must be finite and non-negative");
  }
  return std::shared_ptr<const RegularizedLoss>(new RegularizedLoss(
      std::move(base), lambda, std::move(anchor), diameter));
}

double RegularizedLoss::Evaluate(std::span<const double> theta,
                                 std::span<const double> z) const {
  double sq = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta[i] - anchor_[i];
    sq += diff * diff;
  }
  return base_->Evaluate(theta, z) + 0.5 * lambda_ * sq;
}

void RegularizedLoss::Gradient(std::span<const double> theta,
                               std::span<const double> z,
                               std::span<double> out) const {
  base_->Gradient(theta, z, out);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += lambda_ * (theta[i] - anchor_[i]);
  }
}

double RegularizedLoss::lipschitz() const {
  return base_->lipschitz() + lambda_ * diameter_;
}

absl::StatusOr<FeasibleSet> FeasibleSet::Ball(Vector center, double radius) {
  if (center.empty()) return ShapeError("ball center is empty");
  for (double v : center) {
    if (!std::isfinite(v)) return ArgumentError("ball center is not finite");
  }
  if (!std::isfinite(radius) || radius <= 0) {
    return ArgumentError("ball radius must be finite and positive");
  }
  return FeasibleSet(std::move(center), radius);
}

Vector FeasibleSet::Project(std::span<const double> y) const {
  Vector diff(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) diff[i] = y[i] - center_[i];
  const double norm = Norm2(diff);
  if (norm <= radius_) return Vector(y.begin(), y.end());
  const double scale = radius_ / norm;
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = center_[i] + scale * diff[i];
  }
  return out;
}

bool FeasibleSet::Contains(std::span<const double> theta, double slack) const {
  if (theta.size() != center_.size()) return false;
  double sq = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta[i] - center_[i];
    sq += diff * diff;
  }
  return std::sqrt(sq) <= radius_ * (1 + slack) + slack;
}

Vector GradientMapping(const FeasibleSet& set, std::span<const double> theta,
                       std::span<const double> gradient, double step) {
  const Vector projected = ProjectedStep(set, theta, gradient, step);
  Vector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = (theta[i] - projected[i]) / step;
  }
  return out;
}

absl::StatusOr<double> EmpiricalLoss(const LossModel& model,
                                     const UserDataset& data,
                                     std::span<const double> theta) {
  USERDP_RETURN_IF_ERROR(CheckModelShapes(model, data, theta.size()));
  double total = 0;
  std::size_t count = 0;
  for (const auto& user : data.users()) {
    for (const auto& item : user.items) {
      total += model.Evaluate(theta, item);
      ++count;
    }
  }
  if (count == 0) return ArgumentError("dataset has no items");
  return total / static_cast<double>(count);
}

absl::StatusOr<Vector> EmpiricalGradient(const LossModel& model,
                                         const UserDataset& data,
                                         std::span<const double> theta) {
  USERDP_RETURN_IF_ERROR(CheckModelShapes(model, data, theta.size()));
  Vector total(model.dim(), 0.0);
  Vector g(model.dim());
  std::size_t count = 0;
  for (const auto& user : data.users()) {
    for (const auto& item : user.items) {
      model.Gradient(theta, item, g);
      Axpy(1.0, g, total);
      ++count;
    }
  }
  if (count == 0) return ArgumentError("dataset has no items");
  for (double& v : total) v /= static_cast<double>(count);
  return total;
}

absl::StatusOr<std::vector<Vector>> PerUserGradients(
    const LossModel& model, const UserDataset& data,
    std::span<const double> theta) {
  USERDP_RETURN_IF_ERROR(CheckModelShapes(model, data, theta.size()));
  std::vector<Vector> out;
  out.reserve(data.num_users());
  Vector g(model.dim());
  for (const auto& user : data.users()) {
    Vector avg(model.dim(), 0.0);
    for (const auto& item : user.items) {
      model.Gradient(theta, item, g);
      Axpy(1.0, g, avg);
    }
    for (double& v : avg) v /= static_cast<double>(user.items.size());
    out.push_back(std::move(avg));
  }
  return out;
}

absl::StatusOr<Vector> ExactGradientOracle::Query(std::span<const double> theta,
                                                  RandomSource&) {
  if (!gradient_) return ArgumentError("gradient function is empty");
  return gradient_(theta);
}

absl::StatusOr<Vector> NoisyGradientOracle::Query(std::span<const double> theta,
                                                  RandomSource& rng) {
  if (!gradient_) return ArgumentError("gradient function is empty");
  if (!(nu_ >= 0)) return ArgumentError("oracle noise must be non-negative");
  Vector g = gradient_(theta);
  const double scale = nu_ / std::sqrt(static_cast<double>(g.size()));
  for (double& v : g) v += scale * rng.Gaussian();
  return g;
}

ProjectedSgdConvex::ProjectedSgdConvex(FeasibleSet set, Vector start,
                                       double step)
    : set_(std::move(set)), step_(step) {
  iterates_.push_back(set_.Project(start));
}

absl::Status ProjectedSgdConvex::Update(std::span<const double> gradient) {
  USERDP_RETURN_IF_ERROR(CheckGradient(gradient, set_.dim()));
  iterates_.push_back(ProjectedStep(set_, iterates_.back(), gradient, step_));
  return absl::OkStatus();
}

absl::StatusOr<Vector> ProjectedSgdConvex::Aggregate(RandomSource&) const {
  if (iterates_.size() == 1) return iterates_.front();
  Vector avg(set_.dim(), 0.0);
  for (std::size_t t = 1; t < iterates_.size(); ++t)
    Axpy(1.0, iterates_[t], avg);
  for (double& v : avg) v /= static_cast<double>(iterates_.size() - 1);
  return avg;
}

ProjectedSgdStronglyConvex::ProjectedSgdStronglyConvex(FeasibleSet set,
                                                       Vector start,
                                                       double smoothness,
                                                       double strong_convexity,
                                                       std::size_t total_steps)
    : set_(std::move(set)),
      smoothness_(std::max(smoothness, strong_convexity)),
      mu_(strong_convexity),
      total_steps_(total_steps),
      phase_one_steps_((total_steps + 1) / 2) {
  iterates_.push_back(set_.Project(start));
}

double ProjectedSgdStronglyConvex::NextStep() const {
  if (updates_ < phase_one_steps_) return 1.0 / smoothness_;
  const double t0 = 2.0 * smoothness_ / mu_;
  const double s = static_cast<double>(updates_ - phase_one_steps_);
  return 2.0 / (mu_ * (s + t0));
}

Vector ProjectedSgdStronglyConvex::PhaseOneAverage() const {
  // Weights (1 - mu eta / 2)^{-t} for theta_1..theta_T1, scaled by the
  // largest so that none overflows.
  const double log_ratio = std::log1p(-mu_ / (2.0 * smoothness_));
  Vector avg(set_.dim(), 0.0);
  double total = 0;
  for (std::size_t t = 1; t <= phase_one_steps_; ++t) {
    const double w =
        std::exp(static_cast<double>(phase_one_steps_ - t) * log_ratio);
    Axpy(w, iterates_[t], avg);
    total += w;
  }
  for (double& v : avg) v /= total;
  return set_.Project(avg);
}

absl::Status ProjectedSgdStronglyConvex::Update(
    std::span<const double> gradient) {
  USERDP_RETURN_IF_ERROR(CheckGradient(gradient, set_.dim()));
  if (updates_ >= total_steps_) {
    return PreconditionError("the method has already taken all its steps");
  }
  const double step = NextStep();
  Vector next = ProjectedStep(set_, iterates_.back(), gradient, step);
  const bool in_restart = updates_ >= phase_one_steps_;
  ++updates_;
  if (in_restart) restart_iterates_.push_back(next);
  iterates_.push_back(std::move(next));
  if (updates_ == phase_one_steps_) iterates_.push_back(PhaseOneAverage());
  return absl::OkStatus();
}

absl::StatusOr<Vector> ProjectedSgdStronglyConvex::Aggregate(
    RandomSource&) const {
  if (updates_ == 0) return iterates_.front();
  if (restart_iterates_.empty()) return iterates_.back();
  const double t0 = 2.0 * smoothness_ / mu_;
  Vector avg(set_.dim(), 0.0);
  double total = 0;
  for (std::size_t s = 0; s < restart_iterates_.size(); ++s) {
    const double w = static_cast<double>(s + 1) + t0;
    Axpy(w, restart_iterates_[s], avg);
    total += w;
  }
  for (double& v : avg) v /= total;
  return set_.Project(avg);
}

ProjectedSgdNonconvex::ProjectedSgdNonconvex(FeasibleSet set, Vector start,
                                             double step)
    : set_(std::move(set)), step_(step) {
  iterates_.push_back(set_.Project(start));
}

absl::Status ProjectedSgdNonconvex::Update(std::span<const double> gradient) {
  USERDP_RETURN_IF_ERROR(CheckGradient(gradient, set_.dim()));
  iterates_.push_back(ProjectedStep(set_, iterates_.back(), gradient, step_));
  return absl::OkStatus();
}

absl::StatusOr<Vector> ProjectedSgdNonconvex::Aggregate(
    RandomSource& rng) const {
  if (iterates_.size() == 1) return iterates_.front();
  return iterates_[rng.UniformIndex(iterates_.size() - 1)];
}

absl::StatusOr<Vector> RunFirstOrder(FirstOrderMethod& method,
                                     GradientOracle& oracle, std::size_t steps,
                                     RandomSource& rng) {
  for (std::size_t t = 0; t < steps; ++t) {
    const Vector theta = method.Query();
    USERDP_ASSIGN_OR_RETURN(const Vector g, oracle.Query(theta, rng));
    USERDP_RETURN_IF_ERROR(method.Update(g));
  }
  return method.Aggregate(rng);
}

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kConvex:
      return "convex";
    case Variant::kStronglyConvex:
      return "strongly_convex";
    case Variant::kNonconvex:
      return "nonconvex";
  }
  return "unknown";
}

absl::StatusOr<Variant> ParseVariant(std::string_view name) {
  if (name == "convex") return Variant::kConvex;
  if (name == "strongly_convex") return Variant::kStronglyConvex;
  if (name == "nonconvex") return Variant::kNonconvex;
  return ArgumentError(
      absl::StrFormat("unknown optimizer variant '%s'", std::string(name)));
}

absl::StatusOr<double> ConvexStepSize(const SgdParameters& params,
                                      double radius, std::size_t steps) {
  double step = std::numeric_limits<double>::infinity();
  if (params.smoothness > 0) step = 1.0 / params.smoothness;
  const double nu = params.noise_std > 0 ? params.noise_std : params.lipschitz;
  if (nu > 0) {
    const double t = static_cast<double>(std::max<std::size_t>(steps, 1));
    step = std::min(step, radius / (nu * std::sqrt(t)));
  }
  if (!std::isfinite(step)) {
    return ArgumentError(
        "convex step size needs a positive smoothness, noise or Lipschitz "
        "constant");
  }
  return step;
}

absl::StatusOr<std::unique_ptr<FirstOrderMethod>> MakeMethod(
    Variant variant, const FeasibleSet& set, Vector start,
    const SgdParameters& params, std::size_t steps) {
  if (start.size() != set.dim()) {
    return ShapeError(absl::StrFormat("start point has length %d, expected %d",
                                      start.size(), set.dim()));
  }
  switch (variant) {
    case Variant::kConvex: {
      USERDP_ASSIGN_OR_RETURN(const double step,
                              ConvexStepSize(params, set.radius(), steps));
      return std::make_unique<ProjectedSgdConvex>(set, std::move(start), step);
    }
    case Variant::kStronglyConvex: {
      if (!(params.strong_convexity > 0)) {
        return ArgumentError("the strongly convex method needs mu > 0");
      }
      return std::make_unique<ProjectedSgdStronglyConvex>(
          set, std::move(start), params.smoothness, params.strong_convexity,
          steps);
    }
    case Variant::kNonconvex: {
      // A loss with H = 0 is linear; fall back to the convex step rule.
      double step = 0;
      if (params.smoothness > 0) {
        step = 1.0 / params.smoothness;
      } else {
        USERDP_ASSIGN_OR_RETURN(step,
                                ConvexStepSize(params, set.radius(), steps));
      }
      return std::make_unique<ProjectedSgdNonconvex>(set, std::move(start),
                                                     step);
    }
  }
  return ArgumentError("unknown optimizer variant");
}

absl::StatusOr<Vector> SgdConvex(GradientOracle& oracle, const FeasibleSet& set,
                                 Vector start, const SgdParameters& params,
                                 std::size_t steps, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      auto method,
      MakeMethod(Variant::kConvex, set, std::move(start), params, steps));
  return RunFirstOrder(*method, oracle, steps, rng);
}

absl::StatusOr<Vector> SgdStronglyConvex(GradientOracle& oracle,
                                         const FeasibleSet& set, Vector start,
                                         const SgdParameters& params,
                                         std::size_t steps, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      auto method, MakeMethod(Variant::kStronglyConvex, set, std::move(start),
                              params, steps));
  return RunFirstOrder(*method, oracle, steps, rng);
}

absl::StatusOr<Vector> SgdNonconvex(GradientOracle& oracle,
                                    const FeasibleSet& set, Vector start,
                                    const SgdParameters& params,
                                    std::size_t steps, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      auto method,
      MakeMethod(Variant::kNonconvex, set, std::move(start), params, steps));
  return RunFirstOrder(*method, oracle, steps, rng);
}

absl::StatusOr<double> GradientConcentrationRadius(double sigma, std::size_t d,
                                                   std::size_t m, double radius,
                                                   double smoothness,
                                                   std::size_t n,
                                                   double alpha) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return ArgumentError("sigma must be finite and positive");
  }
  if (d == 0 || m == 0 || n == 0) {
    return ArgumentError("d, m and n must be positive");
  }
  if (!(radius > 0) || !(smoothness >= 0)) {
    return ArgumentError("radius must be positive and smoothness non-negative");
  }
  if (!(alpha > 0 && alpha < 1))
    return ArgumentError("alpha must be in (0, 1)");
  const double dd = static_cast<double>(d);
  const double mm = static_cast<double>(m);
  const double inner =
      std::max(std::numbers::e, radius * smoothness * mm / (dd * sigma));
  return sigma * std::sqrt(dd * std::log(inner) / mm +
                           std::log(static_cast<double>(n) / alpha) / mm);
}

absl::StatusOr<StepBudget> FirstOrderStepBudget(const PrivacyBudget& budget,
                                                std::size_t steps) {
  USERDP_RETURN_IF_ERROR(budget.Validate());
  if (budget.delta <= 0) {
    return ArgumentError("winsorized first-order methods need delta > 0");
  }
  if (steps == 0) return ArgumentError("step count must be positive");
  const double t = static_cast<double>(steps);
  return StepBudget{
      budget.epsilon /
          (2.0 * std::sqrt(2.0 * t * std::log(2.0 / budget.delta))),
      budget.delta / (2.0 * t)};
}

namespace instrumented {

absl::StatusOr<FirstOrderTrace> WinsorizedFirstOrder(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    std::size_t steps, const PrivacyBudget& budget, double tau, double gamma,
    Variant variant, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options) {
  USERDP_RETURN_IF_ERROR(budget.Validate());
  if (budget.delta <= 0) {
    return ArgumentError("winsorized first-order methods need delta > 0");
  }
  USERDP_RETURN_IF_ERROR(CheckModelShapes(model, data, set.dim()));
  USERDP_RETURN_IF_ERROR(data.ItemsPerUser().status());
  if (!std::isfinite(tau) || tau <= 0) {
    return ArgumentError("tau must be finite and positive");
  }
  if (!(gamma > 0 && gamma < 1))
    return ArgumentError("gamma must be in (0, 1)");
  Vector start = options.start.empty() ? set.center() : options.start;
  if (start.size() != set.dim()) {
    return ShapeError("start point length does not match the feasible set");
  }
  FirstOrderTrace trace;
  if (steps == 0) {
    trace.theta = set.Project(start);
    return trace;
  }
  const double g_bound = model.lipschitz();
  if (!std::isfinite(g_bound) || g_bound <= 0) {
    return ArgumentError("the loss needs a finite positive Lipschitz constant");
  }
  USERDP_ASSIGN_OR_RETURN(trace.step_budget,
                          FirstOrderStepBudget(budget, steps));
  const double n = static_cast<double>(data.num_users());
  const double threshold =
      std::sqrt(static_cast<double>(set.dim() * steps)) / budget.epsilon;
  if (n < threshold) {
    trace.warnings.push_back(absl::StrFormat(
        "n = %d users is below sqrt(d T) / eps = %.1f; accuracy guarantees "
        "may not hold",
        data.num_users(), threshold));
  }
  SgdParameters params{model.smoothness(), model.strong_convexity(),
                       options.noise_std, g_bound};
  USERDP_ASSIGN_OR_RETURN(
      auto method, MakeMethod(variant, set, std::move(start), params, steps));
  for (std::size_t t = 0; t < steps; ++t) {
    RandomSource step_rng = rng.Split();
    const Vector theta = method->Query();
    USERDP_ASSIGN_OR_RETURN(const std::vector<Vector> grads,
                            PerUserGradients(model, data, theta));
    USERDP_ASSIGN_OR_RETURN(
        const MeanEstimate est,
        instrumented::WinsorizedMeanHighD(grads, trace.step_budget.epsilon,
                                          trace.step_budget.delta, tau, g_bound,
                                          gamma, step_rng));
    trace.queried.push_back(theta);
    trace.clean_events.push_back(est.clean_event);
    USERDP_RETURN_IF_ERROR(method->Update(est.value));
  }
  USERDP_ASSIGN_OR_RETURN(trace.theta, method->Aggregate(rng));
  return trace;
}

absl::StatusOr<LocalizationTrace> LocalizeStronglyConvex(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    const PrivacyBudget& budget, double sigma, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options) {
  USERDP_ASSIGN_OR_RETURN(const std::size_t m, data.ItemsPerUser());
  LocalizationTrace out;
  USERDP_ASSIGN_OR_RETURN(
      out.plan,
      PlanLocalization(model, set, data.num_users(), m, budget, sigma));
  USERDP_ASSIGN_OR_RETURN(
      out.run, instrumented::WinsorizedFirstOrder(
                   data, model, set, out.plan.steps, budget, out.plan.tau,
                   out.plan.gamma, Variant::kStronglyConvex, rng, options));
  return out;
}

}  // namespace instrumented

absl::StatusOr<OptimizationResult> WinsorizedFirstOrder(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    std::size_t steps, const PrivacyBudget& budget, double tau, double gamma,
    Variant variant, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options) {
  USERDP_ASSIGN_OR_RETURN(
      instrumented::FirstOrderTrace trace,
      instrumented::WinsorizedFirstOrder(data, model, set, steps, budget, tau,
                                         gamma, variant, rng, options));
  return OptimizationResult{std::move(trace.theta), std::move(trace.warnings)};
}

absl::StatusOr<LocalizationPlan> PlanLocalization(const LossModel& model,
                                                  const FeasibleSet& set,
                                                  std::size_t n, std::size_t m,
                                                  const PrivacyBudget& budget,
                                                  double sigma) {
  USERDP_RETURN_IF_ERROR(budget.Validate());
  const double mu = model.strong_convexity();
  if (!(mu > 0)) return ArgumentError("localization needs mu > 0");
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return ArgumentError("sigma must be finite and positive");
  }
  if (n == 0 || m == 0) return ArgumentError("n and m must be positive");
  const double d = static_cast<double>(model.dim());
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double eps = budget.epsilon;
  const double r = set.radius();
  const double h = std::max(model.smoothness(), mu);
  const double g_tilde = sigma * std::sqrt(d);
  const double g_low = std::min(model.lipschitz(), g_tilde);
  const double arg =
      nn * nn * mm * (g_low / (g_tilde * g_tilde)) * mu * r * eps * eps / d;
  LocalizationPlan plan;
  const double steps =
      std::ceil((h / mu) * std::log(std::max(std::numbers::e, arg)));
  plan.steps = static_cast<std::size_t>(std::max(1.0, steps));
  plan.gamma = std::min(0.5, sigma * sigma * d * d /
                                 (mu * mu * nn * nn * mm * eps * eps * r * r));
  USERDP_ASSIGN_OR_RETURN(
      plan.tau, GradientConcentrationRadius(sigma, model.dim(), m, r,
                                            model.smoothness(), n, plan.gamma));
  return plan;
}

absl::StatusOr<OptimizationResult> LocalizeStronglyConvex(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    const PrivacyBudget& budget, double sigma, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options) {
  USERDP_ASSIGN_OR_RETURN(instrumented::LocalizationTrace trace,
                          instrumented::LocalizeStronglyConvex(
                              data, model, set, budget, sigma, rng, options));
  return OptimizationResult{std::move(trace.run.theta),
                            std::move(trace.run.warnings)};
}

}  // namespace userdp
