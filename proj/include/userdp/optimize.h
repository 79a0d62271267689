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

// First-order optimization under user-level privacy.
//
// A method is a Query/Update/Aggregate triple driven by RunFirstOrder against
// a gradient oracle. WinsorizedFirstOrder plugs in an oracle that privately
// averages per-user gradients; LocalizeStronglyConvex picks its schedule for
// strongly convex losses.

#ifndef USERDP_OPTIMIZE_H_
#define USERDP_OPTIMIZE_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "userdp/core.h"

namespace userdp {

// Per-item loss l(theta; z) with constants valid on the feasible set.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual std::string_view name() const = 0;
  // Length of theta.
  virtual std::size_t dim() const = 0;
  // Length of an item z.
  virtual std::size_t item_dim() const = 0;
  virtual double Evaluate(std::span<const double> theta,
                          std::span<const double> z) const = 0;
  // Writes grad_theta l(theta; z) into out (length dim()).
  virtual void Gradient(std::span<const double> theta,
                        std::span<const double> z,
                        std::span<double> out) const = 0;

  virtual double lipschitz() const = 0;
  virtual double smoothness() const = 0;
  virtual double strong_convexity() const { return 0.0; }
  virtual bool convex() const = 0;

  Vector GradientAt(std::span<const double> theta,
                    std::span<const double> z) const;
};

// l(theta; z) + (lambda / 2) ||theta - anchor||^2. The Lipschitz constant is
// G + lambda * diameter so that it holds on the whole feasible set.
class RegularizedLoss final : public LossModel {
 public:
  static absl::StatusOr<std::shared_ptr<const RegularizedLoss>> Create(
      std::shared_ptr<const LossModel> base, double lambda, Vector anchor,
      double diameter);

  std::string_view name() const override { return "regularized"; }
  std::size_t dim() const override { return base_->dim(); }
  std::size_t item_dim() const override { return base_->item_dim(); }
  double Evaluate(std::span<const double> theta,
                  std::span<const double> z) const override;
  void Gradient(std::span<const double> theta, std::span<const double> z,
                std::span<double> out) const override;
  double lipschitz() const override;
  double smoothness() const override { return base_->smoothness() + lambda_; }
  double strong_convexity() const override {
    return base_->strong_convexity() + lambda_;
  }
  bool convex() const override { return base_->convex(); }

  double lambda() const { return lambda_; }
  const Vector& anchor() const { return anchor_; }

 private:
  RegularizedLoss(std::shared_ptr<const LossModel> base, double lambda,
                  Vector anchor, double diameter)
      : base_(std::move(base)),
        lambda_(lambda),
        anchor_(std::move(anchor)),
        diameter_(diameter) {}

  std::shared_ptr<const LossModel> base_;
  double lambda_;
  Vector anchor_;
  double diameter_;
};

// Euclidean ball {theta : ||theta - center||_2 <= radius}.
class FeasibleSet {
 public:
  static absl::StatusOr<FeasibleSet> Ball(Vector center, double radius);

  std::size_t dim() const { return center_.size(); }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double diameter() const { return 2.0 * radius_; }

  Vector Project(std::span<const double> y) const;
  bool Contains(std::span<const double> theta, double slack = 1e-9) const;

 private:
  FeasibleSet(Vector center, double radius)
      : center_(std::move(center)), radius_(radius) {}

  Vector center_;
  double radius_;
};

// (1 / step) [theta - Proj(theta - step * gradient)].
Vector GradientMapping(const FeasibleSet& set, std::span<const double> theta,
                       std::span<const double> gradient, double step);

// Empirical objective (1 / (n m)) sum over all items and its gradient.
absl::StatusOr<double> EmpiricalLoss(const LossModel& model,
                                     const UserDataset& data,
                                     std::span<const double> theta);
absl::StatusOr<Vector> EmpiricalGradient(const LossModel& model,
                                         const UserDataset& data,
                                         std::span<const double> theta);

// Per-user gradients (1 / m) sum_j grad l(theta; z_j), one row per user.
absl::StatusOr<std::vector<Vector>> PerUserGradients(
    const LossModel& model, const UserDataset& data,
    std::span<const double> theta);

class GradientOracle {
 public:
  virtual ~GradientOracle() = default;
  virtual absl::StatusOr<Vector> Query(std::span<const double> theta,
                                       RandomSource& rng) = 0;
};

using GradientFunction = std::function<Vector(std::span<const double>)>;

// Returns the exact gradient and consumes no randomness.
class ExactGradientOracle final : public GradientOracle {
 public:
  explicit ExactGradientOracle(GradientFunction gradient)
      : gradient_(std::move(gradient)) {}
  absl::StatusOr<Vector> Query(std::span<const double> theta,
                               RandomSource& rng) override;

 private:
  GradientFunction gradient_;
};

// Exact gradient plus N(0, nu^2 / d I) noise, so the total variance is nu^2.
class NoisyGradientOracle final : public GradientOracle {
 public:
  NoisyGradientOracle(GradientFunction gradient, double nu)
      : gradient_(std::move(gradient)), nu_(nu) {}
  absl::StatusOr<Vector> Query(std::span<const double> theta,
                               RandomSource& rng) override;

 private:
  GradientFunction gradient_;
  double nu_;
};

// Query/Update/Aggregate. Every queried point lies in the feasible set.
class FirstOrderMethod {
 public:
  virtual ~FirstOrderMethod() = default;
  virtual const Vector& Query() const = 0;
  virtual absl::Status Update(std::span<const double> gradient) = 0;
  virtual absl::StatusOr<Vector> Aggregate(RandomSource& rng) const = 0;
  // theta_0, theta_1, ... in the order produced.
  virtual const std::vector<Vector>& iterates() const = 0;
};

// Fixed-step projected SGD with the uniform average of theta_1..theta_T.
class ProjectedSgdConvex final : public FirstOrderMethod {
 public:
  ProjectedSgdConvex(FeasibleSet set, Vector start, double step);

  const Vector& Query() const override { return iterates_.back(); }
  absl::Status Update(std::span<const double> gradient) override;
  absl::StatusOr<Vector> Aggregate(RandomSource& rng) const override;
  const std::vector<Vector>& iterates() const override { return iterates_; }
  double step() const { return step_; }

 private:
  FeasibleSet set_;
  double step_;
  std::vector<Vector> iterates_;
};

// Phase 1: ceil(T/2) steps at eta = 1/H averaged with weights
// proportional to (1 - mu eta / 2)^{-t}. Phase 2 restarts from that average
// with eta_s = 2 / (mu (s + t0)), t0 = 2H/mu, averaged with weights s + t0.
class ProjectedSgdStronglyConvex final : public FirstOrderMethod {
 public:
  ProjectedSgdStronglyConvex(FeasibleSet set, Vector start, double smoothness,
                             double strong_convexity, std::size_t total_steps);

  const Vector& Query() const override { return iterates_.back(); }
  absl::Status Update(std::span<const double> gradient) override;
  absl::StatusOr<Vector> Aggregate(RandomSource& rng) const override;
  const std::vector<Vector>& iterates() const override { return iterates_; }

  std::size_t phase_one_steps() const { return phase_one_steps_; }
  // Step size of the next update.
  double NextStep() const;

 private:
  Vector PhaseOneAverage() const;

  FeasibleSet set_;
  double smoothness_;
  double mu_;
  std::size_t total_steps_;
  std::size_t phase_one_steps_;
  std::size_t updates_ = 0;
  // All points, including the restart point appended after phase 1.
  std::vector<Vector> iterates_;
  // Phase-2 iterates theta_1..theta_s after the restart.
  std::vector<Vector> restart_iterates_;
};

// Fixed-step projected SGD returning a uniformly random theta_t, t < T.
class ProjectedSgdNonconvex final : public FirstOrderMethod {
 public:
  ProjectedSgdNonconvex(FeasibleSet set, Vector start, double step);

  const Vector& Query() const override { return iterates_.back(); }
  absl::Status Update(std::span<const double> gradient) override;
  absl::StatusOr<Vector> Aggregate(RandomSource& rng) const override;
  const std::vector<Vector>& iterates() const override { return iterates_; }

 private:
  FeasibleSet set_;
  double step_;
  std::vector<Vector> iterates_;
};

// T rounds of Query -> oracle -> Update, then Aggregate. T = 0 returns the
// current query point.
absl::StatusOr<Vector> RunFirstOrder(FirstOrderMethod& method,
                                     GradientOracle& oracle, std::size_t steps,
                                     RandomSource& rng);

enum class Variant { kConvex, kStronglyConvex, kNonconvex };

std::string_view VariantName(Variant variant);
absl::StatusOr<Variant> ParseVariant(std::string_view name);

struct SgdParameters {
  double smoothness = 0.0;        // H
  double strong_convexity = 0.0;  // mu
  // Oracle standard deviation nu; <= 0 means unknown, in which case the
  // convex step falls back to lipschitz.
  double noise_std = 0.0;
  double lipschitz = 0.0;  // G
};

// eta = min(1/H, R / (nu sqrt(T))) with R the ball radius.
absl::StatusOr<double> ConvexStepSize(const SgdParameters& params,
                                      double radius, std::size_t steps);

absl::StatusOr<std::unique_ptr<FirstOrderMethod>> MakeMethod(
    Variant variant, const FeasibleSet& set, Vector start,
    const SgdParameters& params, std::size_t steps);

absl::StatusOr<Vector> SgdConvex(GradientOracle& oracle, const FeasibleSet& set,
                                 Vector start, const SgdParameters& params,
                                 std::size_t steps, RandomSource& rng);
absl::StatusOr<Vector> SgdStronglyConvex(GradientOracle& oracle,
                                         const FeasibleSet& set, Vector start,
                                         const SgdParameters& params,
                                         std::size_t steps, RandomSource& rng);
absl::StatusOr<Vector> SgdNonconvex(GradientOracle& oracle,
                                    const FeasibleSet& set, Vector start,
                                    const SgdParameters& params,
                                    std::size_t steps, RandomSource& rng);

// sigma sqrt(d ln(max(e, R H m / (d sigma))) / m + ln(n / alpha) / m), with
// the leading constant fixed to 1.
absl::StatusOr<double> GradientConcentrationRadius(double sigma, std::size_t d,
                                                   std::size_t m, double radius,
                                                   double smoothness,
                                                   std::size_t n, double alpha);

struct OptimizationResult {
  Vector theta;
  std::vector<std::string> warnings;
};

struct WinsorizedFirstOrderOptions {
  // Defaults to the set's center when empty.
  Vector start;
  double noise_std = 0.0;
};

// eps' = eps / (2 sqrt(2 T ln(2/delta))), delta' = delta / (2T).
struct StepBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};
absl::StatusOr<StepBudget> FirstOrderStepBudget(const PrivacyBudget& budget,
                                                std::size_t steps);

absl::StatusOr<OptimizationResult> WinsorizedFirstOrder(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    std::size_t steps, const PrivacyBudget& budget, double tau, double gamma,
    Variant variant, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options = {});

// Schedule for a mu-strongly convex loss:
//   T     = ceil((H / mu) ln(max(e, n^2 m (G_low / G_tilde^2) mu R eps^2 /
//   d))), gamma = min(1/2, sigma^2 d^2 / (mu^2 n^2 m eps^2 R^2)), tau   =
//   GradientConcentrationRadius(sigma, d, m, R, H, n, gamma),
// with G_tilde = sigma sqrt(d), G_low = min(G, G_tilde), R the ball radius.
struct LocalizationPlan {
  std::size_t steps = 0;
  double gamma = 0.0;
  double tau = 0.0;
};

absl::StatusOr<LocalizationPlan> PlanLocalization(const LossModel& model,
                                                  const FeasibleSet& set,
                                                  std::size_t n, std::size_t m,
                                                  const PrivacyBudget& budget,
                                                  double sigma);

absl::StatusOr<OptimizationResult> LocalizeStronglyConvex(
    const UserDataset& data, const LossModel& model, const FeasibleSet& set,
    const PrivacyBudget& budget, double sigma, RandomSource& rng,
    const WinsorizedFirstOrderOptions& options = {});

}  // namespace userdp

#endif  // USERDP_OPTIMIZE_H_
