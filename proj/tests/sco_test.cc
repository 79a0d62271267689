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

#include "userdp/sco.h"

#include <cmath>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"
#include "userdp/synth.h"

namespace userdp {
namespace {

using testing::Unwrap;

TEST(PhasePlanTest, HalvesUsersAndQuadruplesLambda) {
  // arg = 1024 / (sigma d) = 6, so T = ceil(log2 6) = 3.
  const double sigma = 1024.0 / 6.0;
  const PhasePlan plan =
      Unwrap(BuildPhasePlan(1024, 1, 1, 1.0, 1.0, sigma, 2.0, 1.0));
  ASSERT_EQ(plan.t_max, 3u);
  ASSERT_EQ(plan.phases.size(), 3u);
  const std::size_t users[] = {512, 256, 128};
  std::size_t begin = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    const Phase& p = plan.phases[t];
    EXPECT_EQ(p.index, t + 1);
    EXPECT_EQ(p.users, users[t]);
    EXPECT_EQ(p.begin, begin);
    EXPECT_EQ(p.end, begin + users[t]);
    begin = p.end;
  }
  const double lambda0 =
      std::sqrt(1.0 / 1024 + sigma * sigma / (1024.0 * 1024.0)) / 2.0;
  EXPECT_NEAR(plan.lambda0, lambda0, 1e-15);
  EXPECT_NEAR(plan.phases[2].lambda, 64 * lambda0, 1e-13);
  EXPECT_TRUE(plan.warnings.empty());
}

TEST(PhasePlanTest, SinglePhaseWhenSignalIsWeak) {
  const PhasePlan plan =
      Unwrap(BuildPhasePlan(10, 1, 1, 1.0, 1.0, 20.0, 1.0, 1.0));
  EXPECT_EQ(plan.t_max, 1u);
  ASSERT_EQ(plan.phases.size(), 1u);
  EXPECT_EQ(plan.phases[0].users, 5u);
  EXPECT_EQ(plan.warnings.size(), 1u);
}

TEST(PhasePlanTest, InfeasibleWhenPhasesRunOutOfUsers) {
  // T = ceil(log2(512 * 4 * 2 / 0.01)) = 19 > log2(512).
  EXPECT_KIND(BuildPhasePlan(512, 16, 1, 2.0, 1.0, 0.01, 1.0, 0.01),
              ErrorKind::kPlanInfeasible);
  EXPECT_KIND(BuildPhasePlan(0, 1, 1, 1.0, 1.0, 1.0, 1.0, 1.0),
              ErrorKind::kArgument);
  EXPECT_KIND(BuildPhasePlan(8, 1, 1, 1.0, 1.0, -1.0, 1.0, 1.0),
              ErrorKind::kArgument);
}

TEST(PhasePlanTest, PhasesNeverOverlapOrOverrun) {
  RandomSource rng(21);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng.UniformIndex(5000);
    const double sigma = std::exp(8 * rng.Uniform() - 2);
    const auto plan =
        BuildPhasePlan(n, 1 + rng.UniformIndex(64), 1 + rng.UniformIndex(8),
                       1.0, 1.0, sigma, 1.0, 1.0);
    if (!plan.ok()) {
      EXPECT_EQ(KindOf(plan.status()), ErrorKind::kPlanInfeasible);
      continue;
    }
    std::size_t prev = 0, total = 0;
    for (const Phase& p : plan->phases) {
      EXPECT_EQ(p.begin, prev);
      EXPECT_GT(p.users, 0u);
      prev = p.end;
      total += p.users;
    }
    EXPECT_LE(total, n);
  }
}

class PhasedErmTest : public ::testing::Test {
 protected:
  static constexpr std::size_t kDim = 2;

  void SetUp() override {
    const DistributionSpec spec = Unwrap(DistributionSpec::TruncatedGaussian(
        Vector{0.3, 0.1}, Vector(kDim, 0.2), 1.0));
    RandomSource rng(31);
    data_ = Unwrap(SampleUserDataset(spec, 256, 4, rng));
    set_ = Unwrap(FeasibleSet::Ball(Vector(kDim, 0.0), 1.0));
    loss_ = std::make_shared<LinearLoss>(kDim, std::sqrt(2.0));
  }

  std::optional<UserDataset> data_;
  std::optional<FeasibleSet> set_;
  std::shared_ptr<const LossModel> loss_;
};

TEST_F(PhasedErmTest, PhasesReadDisjointFreshUsers) {
  const PrivacyBudget budget = Unwrap(PrivacyBudget::Create(1.0, 1e-5));
  RandomSource rng(1), twin(1);
  const auto trace =
      Unwrap(instrumented::PhasedErm(*data_, loss_, *set_, budget, 40.0, rng));
  const auto& plan = trace.result.plan;
  ASSERT_EQ(trace.access_log.size(), plan.phases.size());
  std::set<std::size_t> seen;
  for (std::size_t t = 0; t < plan.phases.size(); ++t) {
    EXPECT_EQ(trace.access_log[t].size(), plan.phases[t].users);
    for (std::size_t u : trace.access_log[t]) {
      EXPECT_TRUE(seen.insert(u).second) << "user " << u << " reused";
    }
  }
  EXPECT_LE(seen.size(), data_->num_users());

  // Phase 1 is anchored at the center; later phases at the previous output.
  ASSERT_EQ(trace.anchors.size(), plan.phases.size());
  EXPECT_EQ(trace.anchors[0], set_->center());
  for (std::size_t t = 1; t < trace.anchors.size(); ++t) {
    EXPECT_EQ(trace.anchors[t], trace.phase_outputs[t - 1]);
  }
  EXPECT_EQ(trace.result.theta, trace.phase_outputs.back());
  EXPECT_TRUE(set_->Contains(trace.result.theta));

  const auto plain =
      Unwrap(PhasedErm(*data_, loss_, *set_, budget, 40.0, twin));
  EXPECT_EQ(plain.theta, trace.result.theta);
}

TEST_F(PhasedErmTest, UnreadUsersDoNotMatter) {
  const PrivacyBudget budget = Unwrap(PrivacyBudget::Create(1.0, 1e-5));
  RandomSource rng(2), twin(2);
  const auto a =
      Unwrap(instrumented::PhasedErm(*data_, loss_, *set_, budget, 40.0, rng));
  const std::size_t last = a.result.plan.phases.back().end;
  ASSERT_LT(last, data_->num_users());
  const UserDataset changed = Unwrap(data_->WithUser(
      last, UserRecord{std::vector<Vector>(4, Vector{-1.0, -1.0})}));
  const auto b = Unwrap(PhasedErm(changed, loss_, *set_, budget, 40.0, twin));
  EXPECT_EQ(a.result.theta, b.theta);
}

TEST_F(PhasedErmTest, Validation) {
  RandomSource rng(3);
  // 1 / n^2 = 1.5e-5 for n = 256.
  EXPECT_KIND(PhasedErm(*data_, loss_, *set_,
                        Unwrap(PrivacyBudget::Create(1.0, 1e-4)), 40.0, rng),
              ErrorKind::kArgument);
  EXPECT_KIND(PhasedErm(*data_, loss_, *set_,
                        Unwrap(PrivacyBudget::Create(1.0, 0.0)), 40.0, rng),
              ErrorKind::kArgument);
  EXPECT_KIND(PhasedErm(*data_, nullptr, *set_,
                        Unwrap(PrivacyBudget::Create(1.0, 1e-5)), 40.0, rng),
              ErrorKind::kArgument);
  EXPECT_KIND(PhasedErm(*data_, loss_, *set_,
                        Unwrap(PrivacyBudget::Create(1.0, 1e-5)), 1e-4, rng),
              ErrorKind::kPlanInfeasible);
}

}  // namespace
}  // namespace userdp
