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

// Domain types shared by every estimator: user-partitioned datasets, privacy
// budgets, concentration parameters and the deterministic random source.

#ifndef USERDP_CORE_H_
#define USERDP_CORE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace userdp {

using Vector = std::vector<double>;

// Tag for how items of a dataset are bounded. Conversions between the two
// (an l2 bound B implies an l-infinity bound B) are left to callers.
enum class BoundKind { kLinf, kL2 };

std::string_view BoundKindName(BoundKind kind);
absl::StatusOr<BoundKind> ParseBoundKind(std::string_view name);

// One user's contribution: a non-empty list of items, each of length dim.
struct UserRecord {
  std::vector<Vector> items;

  bool operator==(const UserRecord&) const = default;
};

// n users, each holding a list of items in R^dim. Immutable once built; the
// factory rejects records that are empty, mis-shaped, or violate the bound.
class UserDataset {
 public:
  static absl::StatusOr<UserDataset> Create(std::size_t dim, BoundKind kind,
                                            double item_bound,
                                            std::vector<UserRecord> users);

  std::size_t dim() const { return dim_; }
  BoundKind bound_kind() const { return bound_kind_; }
  double item_bound() const { return item_bound_; }
  std::size_t num_users() const { return users_.size(); }
  const std::vector<UserRecord>& users() const { return users_; }
  const UserRecord& user(std::size_t i) const { return users_[i]; }

  // Common per-user item count. Every shipped estimator needs equal counts;
  // a dataset with unequal counts yields a precondition error here.
  absl::StatusOr<std::size_t> ItemsPerUser() const;

  // Users [begin, end) as a new dataset with the same bound metadata.
  absl::StatusOr<UserDataset> Slice(std::size_t begin, std::size_t end) const;

  // Copy of this dataset with user i's record replaced.
  absl::StatusOr<UserDataset> WithUser(std::size_t i, UserRecord record) const;

  bool operator==(const UserDataset&) const = default;

 private:
  UserDataset(std::size_t dim, BoundKind kind, double bound,
              std::vector<UserRecord> users)
      : dim_(dim),
        bound_kind_(kind),
        item_bound_(bound),
        users_(std::move(users)) {}

  std::size_t dim_ = 0;
  BoundKind bound_kind_ = BoundKind::kLinf;
  double item_bound_ = 0.0;
  std::vector<UserRecord> users_;
};

// True iff the datasets differ in at most one user's record. Requires equal
// dimension and user count (shape error otherwise).
absl::StatusOr<bool> Neighboring(const UserDataset& a, const UserDataset& b);

// Number of user slots whose records differ.
absl::StatusOr<std::size_t> UserDistance(const UserDataset& a,
                                         const UserDataset& b);

// JSON form: {"dim", "bound", "bound_kind", "users": [[[...], ...], ...]}.
std::string DatasetToJson(const UserDataset& dataset);
absl::StatusOr<UserDataset> DatasetFromJson(std::string_view json);

// (epsilon, delta) with epsilon finite and positive and delta in [0, 1).
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);
  absl::Status Validate() const;
};

// (tau, gamma, B): all points lie within tau of a common center with
// probability at least 1 - gamma; B bounds each coordinate.
struct ConcentrationSpec {
  double tau = 0.0;
  double gamma = 0.0;
  double range_bound = 0.0;

  static absl::StatusOr<ConcentrationSpec> Create(double tau, double gamma,
                                                  double range_bound,
                                                  std::size_t dim);
};

// Deterministic pseudo-random stream. The same seed and the same sequence of
// calls always produce the same values. Split() derives a child stream from
// (seed, stream id, split counter) so that parallel work stays reproducible.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  RandomSource Split();

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  double Gaussian();
  bool Bernoulli(double p);
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t UniformIndex(std::size_t n);
  // +1 or -1 with equal probability.
  int Sign();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t splits_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Finalizer of the SplitMix64 generator; used for seed derivation.
std::uint64_t MixSeed(std::uint64_t x);

// Small vector helpers used across modules.
double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> v);
double NormInf(std::span<const double> v);

}  // namespace userdp

#endif  // USERDP_CORE_H_
