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

// Synthetic user data and benchmark losses.
//
// Families:
//   truncated_gaussian  N(mu, diag(sigma^2)) clipped coordinate-wise to
//                       [-B, B]; l-infinity bounded.
//   bounded_ball        N(mu, diag(sigma^2)) scaled radially into the l2 ball
//                       of radius B.
//   finite_support      weighted atoms, each with l-infinity norm <= B.

#ifndef USERDP_SYNTH_H_
#define USERDP_SYNTH_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "userdp/core.h"
#include "userdp/optimize.h"

namespace userdp {

enum class Family { kTruncatedGaussian, kBoundedBall, kFiniteSupport };

std::string_view FamilyName(Family family);
absl::StatusOr<Family> ParseFamily(std::string_view name);

struct DistributionSpec {
  Family family = Family::kTruncatedGaussian;
  Vector mean;
  // Per-coordinate standard deviations; same length as mean.
  Vector sigma;
  double bound = 1.0;
  std::vector<Vector> atoms;
  Vector weights;

  static absl::StatusOr<DistributionSpec> TruncatedGaussian(Vector mean,
                                                            Vector sigma,
                                                            double bound);
  static absl::StatusOr<DistributionSpec> BoundedBall(Vector mean, Vector sigma,
                                                      double bound);
  static absl::StatusOr<DistributionSpec> FiniteSupport(
      std::vector<Vector> atoms, Vector weights, double bound);

  absl::Status Validate() const;
  std::size_t dim() const;
  BoundKind bound_kind() const;
};

// Each item comes from the contaminant with probability eta and from the base
// otherwise, so every user's law is within eta of the base in total
// variation.
struct HeterogeneitySpec {
  DistributionSpec base;
  DistributionSpec contaminant;
  double eta = 0.0;

  absl::Status Validate() const;
};

// Z(j) = Z0(j) / max(1, |Z0(j)| / B) with Z0 ~ N(mu, diag(sigma^2)).
// sigma = 0 is allowed and yields clip(mu).
absl::StatusOr<std::vector<Vector>> SampleTruncatedGaussian(
    std::span<const double> mean, std::span<const double> sigma, double bound,
    std::size_t count, RandomSource& rng);

// E[clip(X, -B, B)] for X ~ N(mu, sigma^2):
//   mu [Phi(b) - Phi(a)] + sigma [phi(a) - phi(b)] + B (1 - Phi(b)) - B Phi(a)
// with a = (-B - mu) / sigma, b = (B - mu) / sigma.
double TruncatedGaussianMean(double mean, double sigma, double bound);

// Exact mean for truncated_gaussian and finite_support; bounded_ball has no
// closed form and yields an unsupported error.
absl::StatusOr<Vector> PopulationMean(const DistributionSpec& spec);

Vector SampleItem(const DistributionSpec& spec, RandomSource& rng);

absl::StatusOr<UserDataset> SampleUserDataset(const DistributionSpec& spec,
                                              std::size_t n, std::size_t m,
                                              RandomSource& rng);
absl::StatusOr<UserDataset> SampleUserDataset(const HeterogeneitySpec& spec,
                                              std::size_t n, std::size_t m,
                                              RandomSource& rng);

// Items [x, y] with x from the feature spec and y = +1 with probability
// 1 / (1 + exp(-<theta, x>)), else -1.
absl::StatusOr<UserDataset> SampleLogisticDataset(
    const DistributionSpec& features, std::span<const double> theta,
    std::size_t n, std::size_t m, RandomSource& rng);

// l(theta; z) = -<theta, z>. G = item_norm_bound, H = mu = 0.
class LinearLoss final : public LossModel {
 public:
  LinearLoss(std::size_t dim, double item_norm_bound)
      : dim_(dim), g_(item_norm_bound) {}
  std::string_view name() const override { return "linear"; }
  std::size_t dim() const override { return dim_; }
  std::size_t item_dim() const override { return dim_; }
  double Evaluate(std::span<const double> theta,
                  std::span<const double> z) const override;
  void Gradient(std::span<const double> theta, std::span<const double> z,
                std::span<double> out) const override;
  double lipschitz() const override { return g_; }
  double smoothness() const override { return 0.0; }
  bool convex() const override { return true; }

 private:
  std::size_t dim_;
  double g_;
};

// l(theta; z) = ||theta - z||^2 / 2. H = mu = 1; G = sup ||theta - z|| over
// the feasible set and the item support.
class QuadraticLoss final : public LossModel {
 public:
  QuadraticLoss(std::size_t dim, double lipschitz) : dim_(dim), g_(lipschitz) {}
  std::string_view name() const override { return "quadratic"; }
  std::size_t dim() const override { return dim_; }
  std::size_t item_dim() const override { return dim_; }
  double Evaluate(std::span<const double> theta,
                  std::span<const double> z) const override;
  void Gradient(std::span<const double> theta, std::span<const double> z,
                std::span<double> out) const override;
  double lipschitz() const override { return g_; }
  double smoothness() const override { return 1.0; }
  double strong_convexity() const override { return 1.0; }
  bool convex() const override { return true; }

 private:
  std::size_t dim_;
  double g_;
};

// Item z = [x, y] with y in {-1, +1} and ||x|| <= c:
// l = ln(1 + exp(-y <theta, x>)), G = c, H = c^2 / 4.
class LogisticLoss final : public LossModel {
 public:
  LogisticLoss(std::size_t dim, double feature_norm_bound)
      : dim_(dim), c_(feature_norm_bound) {}
  std::string_view name() const override { return "logistic"; }
  std::size_t dim() const override { return dim_; }
  std::size_t item_dim() const override { return dim_ + 1; }
  double Evaluate(std::span<const double> theta,
                  std::span<const double> z) const override;
  void Gradient(std::span<const double> theta, std::span<const double> z,
                std::span<double> out) const override;
  double lipschitz() const override { return c_; }
  double smoothness() const override { return c_ * c_ / 4.0; }
  bool convex() const override { return true; }

 private:
  std::size_t dim_;
  double c_;
};

// Builds a benchmark loss by name. item_norm_bound is an l2 bound on items
// (on the feature part for logistic). The quadratic loss's G is
// ||center|| + radius + item_norm_bound.
absl::StatusOr<std::shared_ptr<const LossModel>> MakeLoss(
    std::string_view kind, std::size_t dim, double item_norm_bound,
    const FeasibleSet& set);

}  // namespace userdp

#endif  // USERDP_SYNTH_H_
