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

#include "userdp/mean.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "userdp/errors.h"
#include "userdp/instrumentation.h"
#include "userdp/range.h"

namespace userdp {
namespace {

constexpr double kBoundSlack = 1e-9;

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

absl::Status ValidateGamma(double gamma) {
  if (!(gamma > 0 && gamma < 1))
    return ArgumentError("gamma must be in (0, 1)");
  return absl::OkStatus();
}

absl::Status ValidateVectors(std::span<const Vector> xs, double range_bound) {
  if (xs.empty()) return ArgumentError("input list is empty");
  const std::size_t dim = xs.front().size();
  if (dim == 0) return ShapeError("input vectors are empty");
  const double limit = range_bound * (1 + kBoundSlack) + kBoundSlack;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != dim) {
      return ShapeError(absl::StrFormat("vector %d has length %d, expected %d",
                                        i, xs[i].size(), dim));
    }
    for (double v : xs[i]) {
      if (!std::isfinite(v) || std::abs(v) > limit) {
        return ArgumentError(
            absl::StrFormat("vector %d has a coordinate outside [-%g, %g]", i,
                            range_bound, range_bound));
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

namespace instrumented {

absl::StatusOr<ScalarEstimate> WinsorizedMean1D(std::span<const double> xs,
                                                double epsilon, double tau,
                                                double range_bound,
                                                RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(ValidateScalarInputs(xs, epsilon, tau, range_bound));
  ScalarEstimate out;
  USERDP_ASSIGN_OR_RETURN(
      out.interval, PrivateRange(xs, epsilon / 2.0, tau, range_bound, rng));
  const double n = static_cast<double>(xs.size());
  double clipped_sum = 0;
  double raw_sum = 0;
  out.clean_event = true;
  for (double x : xs) {
    const double clipped = std::clamp(x, out.interval.lo, out.interval.hi);
    if (clipped != x) out.clean_event = false;
    clipped_sum += clipped;
    raw_sum += x;
  }
  out.clipped_mean = clipped_sum / n;
  out.raw_mean = raw_sum / n;
  USERDP_ASSIGN_OR_RETURN(const LaplaceScale scale,
                          LaplaceScale::Create(8.0 * tau / (n * epsilon)));
  out.noise = SampleLaplace(scale, rng);
  out.value = out.clipped_mean + out.noise;
  return out;
}

absl::StatusOr<MeanEstimate> WinsorizedMeanHighD(std::span<const Vector> xs,
                                                 double epsilon, double delta,
                                                 double tau, double range_bound,
                                                 double gamma,
                                                 RandomSource& rng) {
  if (xs.empty()) return ArgumentError("input list is empty");
  USERDP_ASSIGN_OR_RETURN(
      const HighDCoordinateParameters params,
      ComputeHighDParameters(xs.front().size(), xs.size(), epsilon, delta, tau,
                             range_bound, gamma));
  USERDP_RETURN_IF_ERROR(ValidateVectors(xs, range_bound));
  const std::size_t dim = xs.front().size();
  RandomSource rotation_rng = rng.Split();
  const RandomRotation rotation = RandomRotation::Sample(dim, rotation_rng);

  // Column-major copy of the rotated points: coords[j][i] = (U x_i)_j.
  std::vector<Vector> coords(params.padded_dim, Vector(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    USERDP_ASSIGN_OR_RETURN(const Vector y, rotation.Rotate(xs[i]));
    for (std::size_t j = 0; j < y.size(); ++j) coords[j][i] = y[j];
  }

  MeanEstimate out;
  out.clean_event = true;
  Vector rotated_mean(params.padded_dim);
  for (std::size_t j = 0; j < params.padded_dim; ++j) {
    RandomSource coord_rng = rng.Split();
    USERDP_ASSIGN_OR_RETURN(
        const ScalarEstimate est,
        instrumented::WinsorizedMean1D(coords[j], params.epsilon, params.tau,
                                       params.range_bound, coord_rng));
    rotated_mean[j] = est.value;
    out.clean_event = out.clean_event && est.clean_event;
  }
  USERDP_ASSIGN_OR_RETURN(out.value, rotation.RotateInverse(rotated_mean));
  return out;
}

absl::StatusOr<MeanEstimate> UserLevelBoundedMean(const UserDataset& data,
                                                  const PrivacyBudget& budget,
                                                  double gamma,
                                                  RandomSource& rng) {
  USERDP_RETURN_IF_ERROR(budget.Validate());
  if (budget.delta <= 0) {
    return ArgumentError("the high-dimensional estimator needs delta > 0");
  }
  USERDP_ASSIGN_OR_RETURN(const double tau, UserAverageRadius(data, gamma));
  USERDP_ASSIGN_OR_RETURN(const std::vector<Vector> averages,
                          UserAverages(data));
  return instrumented::WinsorizedMeanHighD(averages, budget.epsilon,
                                           budget.delta, tau, data.item_bound(),
                                           gamma, rng);
}

absl::StatusOr<MeanEstimate> SessionAccess::Answer(
    AdaptiveQuerySession& session, const VectorQuery& query, double tau) {
  USERDP_ASSIGN_OR_RETURN(AdaptiveQuerySession::RawAnswer raw,
                          session.AnswerWithDiagnostics(query, tau));
  return MeanEstimate{std::move(raw.value), raw.clean_event};
}

}  // namespace instrumented

absl::StatusOr<double> WinsorizedMean1D(std::span<const double> xs,
                                        double epsilon, double tau,
                                        double range_bound, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      const instrumented::ScalarEstimate est,
      instrumented::WinsorizedMean1D(xs, epsilon, tau, range_bound, rng));
  return est.value;
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

absl::Status FwhtInPlace(std::span<double> v) {
  if (!IsPowerOfTwo(v.size())) {
    return ShapeError(absl::StrFormat(
        "Hadamard transform needs a power-of-two length, got %d", v.size()));
  }
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Vector> Fwht(std::span<const double> v) {
  Vector out(v.begin(), v.end());
  USERDP_RETURN_IF_ERROR(FwhtInPlace(out));
  return out;
}

absl::StatusOr<RandomRotation> RandomRotation::Create(std::size_t dim,
                                                      std::vector<int> signs) {
  if (dim == 0) return ArgumentError("rotation dimension must be positive");
  if (signs.size() != NextPowerOfTwo(dim)) {
    return ShapeError(absl::StrFormat("expected %d signs, got %d",
                                      NextPowerOfTwo(dim), signs.size()));
  }
  for (int s : signs) {
    if (s != 1 && s != -1) return ArgumentError("signs must be +1 or -1");
  }
  return RandomRotation(dim, std::move(signs));
}

RandomRotation RandomRotation::Sample(std::size_t dim, RandomSource& rng) {
  std::vector<int> signs(NextPowerOfTwo(std::max<std::size_t>(dim, 1)));
  for (int& s : signs) s = rng.Sign();
  return RandomRotation(dim, std::move(signs));
}

absl::StatusOr<Vector> RandomRotation::Rotate(std::span<const double> x) const {
  if (x.size() != dim_) {
    return ShapeError(
        absl::StrFormat("rotate expects length %d, got %d", dim_, x.size()));
  }
  Vector padded(padded_dim(), 0.0);
  for (std::size_t i = 0; i < dim_; ++i) padded[i] = signs_[i] * x[i];
  USERDP_RETURN_IF_ERROR(FwhtInPlace(padded));
  const double scale = 1.0 / std::sqrt(static_cast<double>(padded_dim()));
  for (double& v : padded) v *= scale;
  return padded;
}

absl::StatusOr<Vector> RandomRotation::RotateInverse(
    std::span<const double> y) const {
  if (y.size() != padded_dim()) {
    return ShapeError(absl::StrFormat(
        "rotate_inverse expects length %d, got %d", padded_dim(), y.size()));
  }
  Vector full(y.begin(), y.end());
  USERDP_RETURN_IF_ERROR(FwhtInPlace(full));
  const double scale = 1.0 / std::sqrt(static_cast<double>(padded_dim()));
  Vector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = signs_[i] * scale * full[i];
  return out;
}

absl::StatusOr<HighDCoordinateParameters> ComputeHighDParameters(
    std::size_t dim, std::size_t n, double epsilon, double delta, double tau,
    double range_bound, double gamma) {
  if (dim == 0) return ShapeError("dimension must be positive");
  if (n == 0) return ArgumentError("input list is empty");
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return ArgumentError("epsilon must be finite and positive");
  }
  if (!(delta > 0 && delta < 1)) {
    return ArgumentError(
        "the high-dimensional estimator needs delta in (0, 1)");
  }
  if (!std::isfinite(tau) || tau <= 0) {
    return ArgumentError("tau must be finite and positive");
  }
  if (!std::isfinite(range_bound) || range_bound <= 0) {
    return ArgumentError("range bound must be finite and positive");
  }
  USERDP_RETURN_IF_ERROR(ValidateGamma(gamma));
  HighDCoordinateParameters p;
  p.padded_dim = NextPowerOfTwo(dim);
  const double dd = static_cast<double>(p.padded_dim);
  p.epsilon = epsilon / std::sqrt(8.0 * dd * std::log(1.0 / delta));
  p.tau = 10.0 * tau *
          std::sqrt(std::log(dd * static_cast<double>(n) / gamma) / dd);
  p.range_bound = std::sqrt(dd) * range_bound;
  return p;
}

absl::StatusOr<Vector> WinsorizedMeanHighD(std::span<const Vector> xs,
                                           double epsilon, double delta,
                                           double tau, double range_bound,
                                           double gamma, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      instrumented::MeanEstimate est,
      instrumented::WinsorizedMeanHighD(xs, epsilon, delta, tau, range_bound,
                                        gamma, rng));
  return std::move(est.value);
}

absl::StatusOr<double> UserAverageRadius(const UserDataset& data,
                                         double gamma) {
  USERDP_RETURN_IF_ERROR(ValidateGamma(gamma));
  USERDP_ASSIGN_OR_RETURN(const std::size_t m, data.ItemsPerUser());
  const double l2_bound =
      data.bound_kind() == BoundKind::kL2
          ? data.item_bound()
          : data.item_bound() * std::sqrt(static_cast<double>(data.dim()));
  const double n = static_cast<double>(data.num_users());
  return l2_bound *
         std::sqrt(std::log(2.0 * n / gamma) / (2.0 * static_cast<double>(m)));
}

absl::StatusOr<std::vector<Vector>> UserAverages(const UserDataset& data) {
  USERDP_ASSIGN_OR_RETURN(const std::size_t m, data.ItemsPerUser());
  std::vector<Vector> out;
  out.reserve(data.num_users());
  for (const auto& user : data.users()) {
    Vector avg(data.dim(), 0.0);
    for (const auto& item : user.items) {
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += item[j];
    }
    for (double& v : avg) v /= static_cast<double>(m);
    out.push_back(std::move(avg));
  }
  return out;
}

absl::StatusOr<Vector> UserLevelBoundedMean(const UserDataset& data,
                                            const PrivacyBudget& budget,
                                            double gamma, RandomSource& rng) {
  USERDP_ASSIGN_OR_RETURN(
      instrumented::MeanEstimate est,
      instrumented::UserLevelBoundedMean(data, budget, gamma, rng));
  return std::move(est.value);
}

absl::StatusOr<AdaptiveQuerySession> AdaptiveQuerySession::Create(
    const UserDataset& data, const PrivacyBudget& budget, std::int64_t k_max,
    double gamma, double range_bound, std::uint64_t seed) {
  USERDP_RETURN_IF_ERROR(budget.Validate());
  if (budget.delta <= 0) {
    return ArgumentError("an adaptive query session needs delta > 0");
  }
  USERDP_RETURN_IF_ERROR(ValidateGamma(gamma));
  if (!std::isfinite(range_bound) || range_bound <= 0) {
    return ArgumentError("range bound must be finite and positive");
  }
  if (data.num_users() == 0) return ArgumentError("dataset has no users");
  USERDP_ASSIGN_OR_RETURN(const CompositionPlan plan,
                          PerStepBudgetForQueries(budget, k_max));
  return AdaptiveQuerySession(data, plan, gamma, range_bound, seed);
}

absl::StatusOr<AdaptiveQuerySession::RawAnswer>
AdaptiveQuerySession::AnswerWithDiagnostics(const VectorQuery& query,
                                            double tau) {
  if (answered_ >= plan_.k) {
    return BudgetExhaustedError(absl::StrFormat(
        "all %d queries of this session have been answered", plan_.k));
  }
  if (!query) return ArgumentError("query is empty");
  std::vector<Vector> values;
  values.reserve(data_.num_users());
  for (const auto& user : data_.users()) {
    USERDP_ASSIGN_OR_RETURN(Vector v, query(user));
    values.push_back(std::move(v));
  }
  USERDP_ASSIGN_OR_RETURN(
      instrumented::MeanEstimate est,
      instrumented::WinsorizedMeanHighD(values, plan_.eps0, plan_.delta0, tau,
                                        range_bound_, per_query_gamma(), rng_));
  ++answered_;
  return RawAnswer{std::move(est.value), est.clean_event};
}

absl::StatusOr<Vector> AdaptiveQuerySession::Answer(const VectorQuery& query,
                                                    double tau) {
  USERDP_ASSIGN_OR_RETURN(RawAnswer raw, AnswerWithDiagnostics(query, tau));
  return std::move(raw.value);
}

}  // namespace userdp
