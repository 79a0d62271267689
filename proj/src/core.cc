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

#include "userdp/core.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "json.hpp"
#include "userdp/errors.h"

namespace userdp {
namespace {

// Items may exceed the bound by this relative slack; this absorbs rounding in
// rotated or averaged inputs without admitting genuinely out-of-range data.
constexpr double kBoundSlack = 1e-9;

}  // namespace

std::string_view BoundKindName(BoundKind kind) {
  return kind == BoundKind::kL2 ? "l2" : "linf";
}

absl::StatusOr<BoundKind> ParseBoundKind(std::string_view name) {
  if (name == "l2") return BoundKind::kL2;
  if (name == "linf") return BoundKind::kLinf;
  return ArgumentError(
      absl::StrFormat("unknown bound kind '%s'", std::string(name)));
}

absl::StatusOr<UserDataset> UserDataset::Create(std::size_t dim, BoundKind kind,
                                                double item_bound,
                                                std::vector<UserRecord> users) {
  if (dim == 0) return ArgumentError("dataset dimension must be positive");
  if (!std::isfinite(item_bound) || item_bound < 0) {
    return ArgumentError("item bound must be finite and non-negative");
  }
  const double limit = item_bound * (1 + kBoundSlack) + kBoundSlack;
  for (std::size_t u = 0; u < users.size(); ++u) {
    const auto& items = users[u].items;
    if (items.empty()) {
      return ArgumentError(absl::StrFormat("user %d holds no items", u));
    }
    for (const Vector& item : items) {
      if (item.size() != dim) {
        return ShapeError(
            absl::StrFormat("user %d has an item of length %d, expected %d", u,
                            item.size(), dim));
      }
      for (double v : item) {
        if (!std::isfinite(v)) {
          return ArgumentError(
              absl::StrFormat("user %d has a non-finite coordinate", u));
        }
      }
      const double size = kind == BoundKind::kL2 ? Norm2(item) : NormInf(item);
      if (size > limit) {
        return ArgumentError(absl::StrFormat(
            "user %d has an item with %s norm %g exceeding bound %g", u,
            std::string(BoundKindName(kind)), size, item_bound));
      }
    }
  }
  return UserDataset(dim, kind, item_bound, std::move(users));
}

absl::StatusOr<std::size_t> UserDataset::ItemsPerUser() const {
  if (users_.empty()) return PreconditionError("dataset has no users");
  const std::size_t m = users_.front().items.size();
  for (const auto& user : users_) {
    if (user.items.size() != m) {
      return PreconditionError(
          "estimators require every user to hold the same number of items");
    }
  }
  return m;
}

absl::StatusOr<UserDataset> UserDataset::Slice(std::size_t begin,
                                               std::size_t end) const {
  if (begin > end || end > users_.size()) {
    return ArgumentError(absl::StrFormat("invalid user range [%d, %d) of %d",
                                         begin, end, users_.size()));
  }
  std::vector<UserRecord> part(users_.begin() + begin, users_.begin() + end);
  return UserDataset(dim_, bound_kind_, item_bound_, std::move(part));
}

absl::StatusOr<UserDataset> UserDataset::WithUser(std::size_t i,
                                                  UserRecord record) const {
  if (i >= users_.size()) return ArgumentError("user index out of range");
  std::vector<UserRecord> users = users_;
  users[i] = std::move(record);
  return Create(dim_, bound_kind_, item_bound_, std::move(users));
}

absl::StatusOr<std::size_t> UserDistance(const UserDataset& a,
                                         const UserDataset& b) {
  if (a.dim() != b.dim()) {
    return ShapeError(
        absl::StrFormat("dimension mismatch: %d vs %d", a.dim(), b.dim()));
  }
  if (a.num_users() != b.num_users()) {
    return ShapeError(absl::StrFormat("user count mismatch: %d vs %d",
                                      a.num_users(), b.num_users()));
  }
  std::size_t differing = 0;
  for (std::size_t u = 0; u < a.num_users(); ++u) {
    if (!(a.user(u) == b.user(u))) ++differing;
  }
  return differing;
}

absl::StatusOr<bool> Neighboring(const UserDataset& a, const UserDataset& b) {
  USERDP_ASSIGN_OR_RETURN(const std::size_t distance, UserDistance(a, b));
  return distance <= 1;
}

std::string DatasetToJson(const UserDataset& dataset) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& user : dataset.users()) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : user.items) items.push_back(item);
    users.push_back(std::move(items));
  }
  nlohmann::json out;
  out["dim"] = dataset.dim();
  out["bound"] = dataset.item_bound();
  out["bound_kind"] = std::string(BoundKindName(dataset.bound_kind()));
  out["users"] = std::move(users);
  return out.dump();
}

absl::StatusOr<UserDataset> DatasetFromJson(std::string_view json) {
  nlohmann::json parsed = nlohmann::json::parse(json, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    return ArgumentError("dataset JSON is malformed");
  }
  for (const char* key : {"dim", "bound", "bound_kind", "users"}) {
    if (!parsed.contains(key)) {
      return ArgumentError(absl::StrFormat("dataset JSON lacks '%s'", key));
    }
  }
  try {
    const auto dim = parsed.at("dim").get<std::size_t>();
    const auto bound = parsed.at("bound").get<double>();
    USERDP_ASSIGN_OR_RETURN(
        const BoundKind kind,
        ParseBoundKind(parsed.at("bound_kind").get<std::string>()));
    std::vector<UserRecord> users;
    for (const auto& user : parsed.at("users")) {
      UserRecord record;
      for (const auto& item : user) record.items.push_back(item.get<Vector>());
      users.push_back(std::move(record));
    }
    return UserDataset::Create(dim, kind, bound, std::move(users));
  } catch (const nlohmann::json::exception& e) {
    return ArgumentError(absl::StrFormat("dataset JSON: %s", e.what()));
  }
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  PrivacyBudget budget{epsilon, delta};
  USERDP_RETURN_IF_ERROR(budget.Validate());
  return budget;
}

absl::Status PrivacyBudget::Validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return ArgumentError("epsilon must be finite and positive");
  }
  if (!(delta >= 0 && delta < 1)) {
    return ArgumentError("delta must lie in [0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<ConcentrationSpec> ConcentrationSpec::Create(double tau,
                                                            double gamma,
                                                            double range_bound,
                                                            std::size_t dim) {
  if (!(tau > 0) || !std::isfinite(tau)) {
    return ArgumentError("tau must be finite and positive");
  }
  if (!(gamma > 0 && gamma < 1)) return ArgumentError("gamma must be in (0,1)");
  if (!(range_bound > 0) || !std::isfinite(range_bound)) {
    return ArgumentError("range bound must be finite and positive");
  }
  if (tau > range_bound * std::sqrt(static_cast<double>(dim))) {
    return ArgumentError(
        "tau exceeds B * sqrt(dim); clipping would be vacuous");
  }
  return ConcentrationSpec{tau, gamma, range_bound};
}

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      engine_(MixSeed(seed ^ MixSeed(stream + 0x632be59bd9b4e019ULL))) {}

RandomSource RandomSource::Split() {
  ++splits_;
  return RandomSource(seed_,
                      MixSeed(stream_ * 0x9e3779b97f4a7c15ULL + splits_));
}

double RandomSource::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::UniformOpen() {
  double u;
  do {
    u = Uniform();
  } while (u == 0.0);
  return u;
}

double RandomSource::Gaussian() { return normal_(engine_); }

bool RandomSource::Bernoulli(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return Uniform() < p;
}

std::size_t RandomSource::UniformIndex(std::size_t n) {
  return static_cast<std::size_t>(Uniform() * static_cast<double>(n)) % n;
}

int RandomSource::Sign() { return (engine_() >> 63) ? 1 : -1; }

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

double NormInf(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace userdp
