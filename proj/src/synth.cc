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

#include "userdp/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"

namespace userdp {
namespace {

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

absl::Status ValidateGaussianParts(const Vector& mean, const Vector& sigma,
                                   double bound) {
  if (mean.empty()) return ShapeError("mean vector is empty");
  if (sigma.size() != mean.size()) {
    return ShapeError(absl::StrFormat("sigma has length %d, mean has %d",
                                      sigma.size(), mean.size()));
  }
  for (double v : mean) {
    if (!std::isfinite(v)) return ArgumentError("mean is not finite");
  }
  for (double s : sigma) {
    if (!std::isfinite(s) || s < 0) {
      return ArgumentError("sigma entries must be finite and non-negative");
    }
  }
  if (!std::isfinite(bound) || bound <= 0) {
    return ArgumentError("bound must be finite and positive");
  }
  return absl::OkStatus();
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kTruncatedGaussian:
      return "truncated_gaussian";
    case Family::kBoundedBall:
      return "bounded_ball";
    case Family::kFiniteSupport:
      return "finite_support";
  }
  return "unknown";
}

absl::StatusOr<Family> ParseFamily(std::string_view name) {
  if (name == "truncated_gaussian") return Family::kTruncatedGaussian;
  if (name == "bounded_ball") return Family::kBoundedBall;
  if (name == "finite_support") return Family::kFiniteSupport;
  return ArgumentError(
      absl::StrFormat("unknown distribution family '%s'", std::string(name)));
}

absl::StatusOr<DistributionSpec> DistributionSpec::TruncatedGaussian(
    Vector mean, Vector sigma, double bound) {
  DistributionSpec spec;
  spec.family = Family::kTruncatedGaussian;
  spec.mean = std::move(mean);
  spec.sigma = std::move(sigma);
  spec.bound = bound;
  USERDP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<DistributionSpec> DistributionSpec::BoundedBall(Vector mean,
                                                               Vector sigma,
                                                               double bound) {
  DistributionSpec spec;
  spec.family = Family::kBoundedBall;
  spec.mean = std::move(mean);
  spec.sigma = std::move(sigma);
  spec.bound = bound;
  USERDP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<DistributionSpec> DistributionSpec::FiniteSupport(
    std::vector<Vector> atoms, Vector weights, double bound) {
  DistributionSpec spec;
  spec.family = Family::kFiniteSupport;
  spec.atoms = std::move(atoms);
  spec.weights = std::move(weights);
  spec.bound = bound;
  USERDP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::Status DistributionSpec::Validate() const {
  if (family != Family::kFiniteSupport) {
    return ValidateGaussianParts(mean, sigma, bound);
  }
  if (atoms.empty()) return ArgumentError("finite support has no atoms");
  if (weights.size() != atoms.size()) {
    return ShapeError("finite support needs one weight per atom");
  }
  if (!std::isfinite(bound) || bound <= 0) {
    return ArgumentError("bound must be finite and positive");
  }
  const std::size_t d = atoms.front().size();
  if (d == 0) return ShapeError("atoms are empty");
  double total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != d) return ShapeError("atoms differ in length");
    if (NormInf(atoms[i]) > bound) {
      return ArgumentError(absl::StrFormat("atom %d exceeds the bound", i));
    }
    if (!std::isfinite(weights[i]) || weights[i] < 0) {
      return ArgumentError("weights must be non-negative");
    }
    total += weights[i];
  }
  if (!(total > 0)) return ArgumentError("weights sum to zero");
  return absl::OkStatus();
}

std::size_t DistributionSpec::dim() const {
  return family == Family::kFiniteSupport
             ? (atoms.empty() ? 0 : atoms.front().size())
             : mean.size();
}

BoundKind DistributionSpec::bound_kind() const {
  return family == Family::kBoundedBall ? BoundKind::kL2 : BoundKind::kLinf;
}

absl::Status HeterogeneitySpec::Validate() const {
  USERDP_RETURN_IF_ERROR(base.Validate());
  USERDP_RETURN_IF_ERROR(contaminant.Validate());
  if (base.dim() != contaminant.dim()) {
    return ShapeError("base and contaminant dimensions differ");
  }
  if (!(eta >= 0 && eta <= 1)) return ArgumentError("eta must be in [0, 1]");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Vector>> SampleTruncatedGaussian(
    std::span<const double> mean, std::span<const double> sigma, double bound,
    std::size_t count, RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(
      ValidateGaussianParts(Vector(mean.begin(), mean.end()),
                            Vector(sigma.begin(), sigma.end()), bound));
  std::vector<Vector> out(count, Vector(mean.size()));
  for (auto& z : out) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      z[j] = std::clamp(mean[j] + sigma[j] * rng.Gaussian(), -bound, bound);
    }
  }
  return out;
}

double TruncatedGaussianMean(double mean, double sigma, double bound) {
  if (sigma <= 0) return std::clamp(mean, -bound, bound);
  const double a = (-bound - mean) / sigma;
  const double b = (bound - mean) / sigma;
  return mean * (NormalCdf(b) - NormalCdf(a)) +
         sigma * (NormalPdf(a) - NormalPdf(b)) + bound * (1 - NormalCdf(b)) -
         bound * NormalCdf(a);
}

absl::StatusOr<Vector> PopulationMean(const DistributionSpec& spec) {
  USERDP_RETURN_IF_ERROR(spec.Validate());
  switch (spec.family) {
    case Family::kTruncatedGaussian: {
      Vector out(spec.dim());
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = TruncatedGaussianMean(spec.mean[j], spec.sigma[j], spec.bound);
      }
      return out;
    }
    case Family::kFiniteSupport: {
      const double total =
          std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
      Vector out(spec.dim(), 0.0);
      for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        for (std::size_t j = 0; j < out.size(); ++j) {
          out[j] += spec.weights[i] / total * spec.atoms[i][j];
        }
      }
      return out;
    }
    case Family::kBoundedBall:
      break;
  }
  return UnsupportedError("the bounded_ball family has no closed-form mean");
}

Vector SampleItem(const DistributionSpec& spec, RandomSource& rng) {
  switch (spec.family) {
    case Family::kTruncatedGaussian: {
      Vector z(spec.dim());
      for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] = std::clamp(spec.mean[j] + spec.sigma[j] * rng.Gaussian(),
                          -spec.bound, spec.bound);
      }
      return z;
    }
    case Family::kBoundedBall: {
      Vector z(spec.dim());
      for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] = spec.mean[j] + spec.sigma[j] * rng.Gaussian();
      }
      const double scale = std::max(1.0, Norm2(z) / spec.bound);
      for (double& v : z) v /= scale;
      return z;
    }
    case Family::kFiniteSupport: {
      const double total =
          std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
      const double u = rng.Uniform() * total;
      double cumulative = 0;
      for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
        cumulative += spec.weights[i];
        if (u < cumulative) return spec.atoms[i];
      }
      for (std::size_t i = spec.atoms.size(); i-- > 0;) {
        if (spec.weights[i] > 0) return spec.atoms[i];
      }
      return spec.atoms.back();
    }
  }
  return {};
}

absl::StatusOr<UserDataset> SampleUserDataset(const DistributionSpec& spec,
                                              std::size_t n, std::size_t m,
                                              RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(spec.Validate());
  if (n == 0 || m == 0) return ArgumentError("n and m must be at least 1");
  std::vector<UserRecord> users(n);
  for (auto& user : users) {
    user.items.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      user.items.push_back(SampleItem(spec, rng));
    }
  }
  return UserDataset::Create(spec.dim(), spec.bound_kind(), spec.bound,
                             std::move(users));
}

absl::StatusOr<UserDataset> SampleUserDataset(const HeterogeneitySpec& spec,
                                              std::size_t n, std::size_t m,
                                              RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(spec.Validate());
  if (n == 0 || m == 0) return ArgumentError("n and m must be at least 1");
  std::vector<UserRecord> users(n);
  for (auto& user : users) {
    user.items.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      const bool contaminated = rng.Bernoulli(spec.eta);
      user.items.push_back(
          SampleItem(contaminated ? spec.contaminant : spec.base, rng));
    }
  }
  BoundKind kind = spec.base.bound_kind();
  double bound = std::max(spec.base.bound, spec.contaminant.bound);
  if (spec.contaminant.bound_kind() != kind) kind = BoundKind::kLinf;
  return UserDataset::Create(spec.base.dim(), kind, bound, std::move(users));
}

absl::StatusOr<UserDataset> SampleLogisticDataset(
    const DistributionSpec& features, std::span<const double> theta,
    std::size_t n, std::size_t m, RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(features.Validate());
  if (theta.size() != features.dim()) {
    return ShapeError("theta length does not match the feature dimension");
  }
  if (n == 0 || m == 0) return ArgumentError("n and m must be at least 1");
  std::vector<UserRecord> users(n);
  for (auto& user : users) {
    for (std::size_t j = 0; j < m; ++j) {
      Vector z = SampleItem(features, rng);
      const double p = Sigmoid(Dot(theta, z));
      z.push_back(rng.Bernoulli(p) ? 1.0 : -1.0);
      user.items.push_back(std::move(z));
    }
  }
  return UserDataset::Create(features.dim() + 1, BoundKind::kLinf,
                             std::max(features.bound, 1.0), std::move(users));
}

double LinearLoss::Evaluate(std::span<const double> theta,
                            std::span<const double> z) const {
  return -Dot(theta, z);
}

void LinearLoss::Gradient(std::span<const double>, std::span<const double> z,
                          std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -z[i];
}

double QuadraticLoss::Evaluate(std::span<const double> theta,
                               std::span<const double> z) const {
  double sq = 0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta[i] - z[i];
    sq += diff * diff;
  }
  return 0.5 * sq;
}

void QuadraticLoss::Gradient(std::span<const double> theta,
                             std::span<const double> z,
                             std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = theta[i] - z[i];
}

double LogisticLoss::Evaluate(std::span<const double> theta,
                              std::span<const double> z) const {
  const double y = z[dim_];
  const double margin = y * Dot(theta, z.first(dim_));
  // ln(1 + exp(-margin)) without overflow.
  return margin > 0 ? std::log1p(std::exp(-margin))
                    : -margin + std::log1p(std::exp(margin));
}

void LogisticLoss::Gradient(std::span<const double> theta,
                            std::span<const double> z,
                            std::span<double> out) const {
  const double y = z[dim_];
  const double margin = y * Dot(theta, z.first(dim_));
  const double scale = -y * Sigmoid(-margin);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = scale * z[i];
}

absl::StatusOr<std::shared_ptr<const LossModel>> MakeLoss(
    std::string_view kind, std::size_t dim, double item_norm_bound,
    const FeasibleSet& set) {
  if (dim == 0) return ArgumentError("loss dimension must be positive");
  if (set.dim() != dim) {
    return ShapeError("feasible set dimension does not match the loss");
  }
  if (!std::isfinite(item_norm_bound) || item_norm_bound <= 0) {
    return ArgumentError("item norm bound must be finite and positive");
  }
  if (kind == "linear") {
    return std::make_shared<const LinearLoss>(dim, item_norm_bound);
  }
  if (kind == "quadratic") {
    const double g = Norm2(set.center()) + set.radius() + item_norm_bound;
    return std::make_shared<const QuadraticLoss>(dim, g);
  }
  if (kind == "logistic") {
    return std::make_shared<const LogisticLoss>(dim, item_norm_bound);
  }
  return ArgumentError(
      absl::StrFormat("unknown loss kind '%s'", std::string(kind)));
}

}  // namespace userdp
