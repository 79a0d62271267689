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

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace userdp {
namespace {

using testing::Unwrap;

// E[clip(X, -B, B)] by adaptive quadrature against the normal density.
double QuadratureClippedMean(double mu, double sigma, double bound) {
  auto integrand = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::clamp(x, -bound, bound) * std::exp(-0.5 * z * z) /
           (sigma * std::sqrt(2 * std::numbers::pi));
  };
  const double lo = mu - 12 * sigma, hi = mu + 12 * sigma;
  double total = 0;
  // Split at the clipping kinks so the rule sees smooth pieces.
  std::vector<double> cuts = {lo};
  for (double c : {-bound, bound}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, cuts[i], cuts[i + 1], 15, 1e-13);
  }
  return total;
}

Vector NumericGradient(const LossModel& loss, const Vector& theta,
                       const Vector& z) {
  const double h = 1e-6;
  Vector g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    Vector up = theta, down = theta;
    up[i] += h;
    down[i] -= h;
    g[i] = (loss.Evaluate(up, z) - loss.Evaluate(down, z)) / (2 * h);
  }
  return g;
}

TEST(TruncatedGaussianTest, SamplesStayInsideBound) {
  RandomSource rng(1);
  const auto zs = Unwrap(SampleTruncatedGaussian(
      Vector{0.9, -0.5}, Vector{1.0, 2.0}, 1.0, 5000, rng));
  int clipped = 0;
  for (const Vector& z : zs) {
    EXPECT_LE(NormInf(z), 1.0);
    clipped += std::abs(z[0]) == 1.0;
  }
  EXPECT_GT(clipped, 0);
}

TEST(TruncatedGaussianTest, ZeroSigmaClipsTheMean) {
  RandomSource rng(2);
  const auto zs = Unwrap(
      SampleTruncatedGaussian(Vector{2.5, 0.3}, Vector{0.0, 0.0}, 1.0, 3, rng));
  for (const Vector& z : zs) EXPECT_EQ(z, (Vector{1.0, 0.3}));
  EXPECT_DOUBLE_EQ(TruncatedGaussianMean(-4.0, 0.0, 2.0), -2.0);
}

TEST(TruncatedGaussianTest, ClosedFormMatchesQuadrature) {
  for (double mu : {-1.5, -0.3, 0.0, 0.2, 0.9, 2.0}) {
    for (double sigma : {0.05, 0.5, 1.0, 3.0}) {
      for (double bound : {0.5, 1.0, 2.0}) {
        EXPECT_NEAR(TruncatedGaussianMean(mu, sigma, bound),
                    QuadratureClippedMean(mu, sigma, bound), 1e-10)
            << mu << " " << sigma << " " << bound;
      }
    }
  }
}

TEST(TruncatedGaussianTest, LargeBoundRecoversMean) {
  EXPECT_NEAR(TruncatedGaussianMean(0.3, 0.2, 100.0), 0.3, 1e-15);
}

TEST(TruncatedGaussianTest, MonteCarloAgreesWithPopulationMean) {
  const DistributionSpec spec = Unwrap(DistributionSpec::TruncatedGaussian(
      Vector{0.7, -0.2}, Vector{0.6, 0.3}, 1.0));
  const Vector mean = Unwrap(PopulationMean(spec));
  RandomSource rng(3);
  Vector acc(2, 0.0);
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) {
    const Vector z = SampleItem(spec, rng);
    for (int j = 0; j < 2; ++j) acc[j] += z[j];
  }
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(acc[j] / draws, mean[j], 3e-3);
}

TEST(DistributionSpecTest, Validation) {
  EXPECT_KIND(
      DistributionSpec::TruncatedGaussian(Vector{0.0}, Vector{-1.0}, 1.0),
      ErrorKind::kArgument);
  EXPECT_KIND(
      DistributionSpec::TruncatedGaussian(Vector{0.0}, Vector{1, 1}, 1.0),
      ErrorKind::kShape);
  EXPECT_KIND(DistributionSpec::BoundedBall(Vector{0.0}, Vector{1.0}, 0.0),
              ErrorKind::kArgument);
  EXPECT_KIND(DistributionSpec::FiniteSupport({Vector{2.0}}, Vector{1.0}, 1.0),
              ErrorKind::kArgument);
  EXPECT_KIND(DistributionSpec::FiniteSupport({Vector{0.5}}, Vector{0.0}, 1.0),
              ErrorKind::kArgument);
  EXPECT_KIND(DistributionSpec::FiniteSupport({Vector{0.5}, Vector{0.1, 0.2}},
                                              Vector{1.0, 1.0}, 1.0),
              ErrorKind::kShape);
  EXPECT_EQ(Unwrap(ParseFamily("bounded_ball")), Family::kBoundedBall);
  EXPECT_EQ(FamilyName(Family::kFiniteSupport), "finite_support");
  EXPECT_KIND(ParseFamily("cauchy"), ErrorKind::kArgument);
}

TEST(BoundedBallTest, ItemsLieInTheL2Ball) {
  const DistributionSpec spec = Unwrap(
      DistributionSpec::BoundedBall(Vector(5, 0.4), Vector(5, 1.0), 1.0));
  RandomSource rng(4);
  const UserDataset data = Unwrap(SampleUserDataset(spec, 100, 8, rng));
  EXPECT_EQ(data.bound_kind(), BoundKind::kL2);
  for (const auto& u : data.users()) {
    for (const auto& z : u.items) EXPECT_LE(Norm2(z), 1.0 + 1e-12);
  }
  EXPECT_KIND(PopulationMean(spec), ErrorKind::kUnsupported);
}

TEST(FiniteSupportTest, FrequenciesAndMean) {
  const DistributionSpec spec = Unwrap(DistributionSpec::FiniteSupport(
      {Vector{-1.0}, Vector{0.0}, Vector{0.5}}, Vector{1.0, 0.0, 3.0}, 1.0));
  EXPECT_NEAR(Unwrap(PopulationMean(spec))[0], (-1.0 + 1.5) / 4, 1e-15);
  RandomSource rng(5);
  int counts[3] = {0, 0, 0};
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const double z = SampleItem(spec, rng)[0];
    ++counts[z < -0.5 ? 0 : (z < 0.25 ? 1 : 2)];
  }
  EXPECT_EQ(counts[1], 0);
  const double se = std::sqrt(0.25 * 0.75 / draws);
  EXPECT_NEAR(counts[0] / static_cast<double>(draws), 0.25, 4 * se);
}

TEST(HeterogeneityTest, ZeroEtaMatchesHomogeneousSampling) {
  const DistributionSpec base = Unwrap(DistributionSpec::TruncatedGaussian(
      Vector{0.1, 0.2}, Vector{0.3, 0.3}, 1.0));
  const DistributionSpec other = Unwrap(DistributionSpec::TruncatedGaussian(
      Vector{-0.5, -0.5}, Vector{0.1, 0.1}, 1.0));
  const HeterogeneitySpec mixed{base, other, 0.0};
  // Bernoulli(0) never consumes randomness, so the two streams line up.
  RandomSource a(6), b(6);
  const UserDataset x = Unwrap(SampleUserDataset(mixed, 30, 4, a));
  const UserDataset y = Unwrap(SampleUserDataset(base, 30, 4, b));
  EXPECT_EQ(x, y);
}

TEST(HeterogeneityTest, ContaminationRateMatchesEta) {
  const DistributionSpec base =
      Unwrap(DistributionSpec::FiniteSupport({Vector{0.5}}, Vector{1.0}, 1.0));
  const DistributionSpec other =
      Unwrap(DistributionSpec::FiniteSupport({Vector{-0.5}}, Vector{1.0}, 1.0));
  RandomSource rng(7);
  const UserDataset data = Unwrap(
      SampleUserDataset(HeterogeneitySpec{base, other, 0.2}, 500, 40, rng));
  int bad = 0;
  for (const auto& u : data.users()) {
    for (const auto& z : u.items) bad += z[0] < 0;
  }
  const double n = 500.0 * 40;
  EXPECT_NEAR(bad / n, 0.2, 4 * std::sqrt(0.16 / n));
  EXPECT_STATUS_KIND((HeterogeneitySpec{base, other, 1.5}).Validate(),
                     ErrorKind::kArgument);
}

TEST(SamplingTest, DeterministicPerSeed) {
  const DistributionSpec spec = Unwrap(
      DistributionSpec::BoundedBall(Vector(3, 0.1), Vector(3, 0.3), 1.0));
  RandomSource a(8), b(8), c(9);
  const UserDataset x = Unwrap(SampleUserDataset(spec, 10, 3, a));
  EXPECT_EQ(x, Unwrap(SampleUserDataset(spec, 10, 3, b)));
  EXPECT_NE(x, Unwrap(SampleUserDataset(spec, 10, 3, c)));
  EXPECT_KIND(SampleUserDataset(spec, 0, 3, a), ErrorKind::kArgument);
}

TEST(LogisticDataTest, LabelsFollowTheSigmoid) {
  const DistributionSpec features = Unwrap(
      DistributionSpec::FiniteSupport({Vector{0.8, 0.0}}, Vector{1.0}, 1.0));
  RandomSource rng(10);
  const Vector theta = {2.0, 0.0};
  const UserDataset data =
      Unwrap(SampleLogisticDataset(features, theta, 200, 50, rng));
  EXPECT_EQ(data.dim(), 3u);
  int pos = 0;
  for (const auto& u : data.users()) {
    for (const auto& z : u.items) {
      ASSERT_TRUE(z[2] == 1.0 || z[2] == -1.0);
      pos += z[2] > 0;
    }
  }
  const double p = 1 / (1 + std::exp(-1.6));
  const double n = 200.0 * 50;
  EXPECT_NEAR(pos / n, p, 4 * std::sqrt(p * (1 - p) / n));
  EXPECT_KIND(SampleLogisticDataset(features, Vector{1.0}, 2, 2, rng),
              ErrorKind::kShape);
}

TEST(LossTest, LinearLoss) {
  const LinearLoss loss(2, 1.5);
  const Vector z = {0.3, -0.4};
  EXPECT_DOUBLE_EQ(loss.Evaluate(Vector{1.0, 1.0}, z), 0.1);
  EXPECT_EQ(loss.GradientAt(Vector{0.2, 0.9}, z), (Vector{-0.3, 0.4}));
  EXPECT_DOUBLE_EQ(loss.lipschitz(), 1.5);
  EXPECT_DOUBLE_EQ(loss.smoothness(), 0.0);
  // Over the unit ball, -<theta, z> is minimized at z / ||z||.
  const Vector best = {0.6, -0.8};
  RandomSource rng(11);
  for (int i = 0; i < 200; ++i) {
    Vector t = testing::RandomVector(2, rng);
    const double r = Norm2(t);
    if (r > 1)
      for (double& v : t) v /= r;
    EXPECT_GE(loss.Evaluate(t, z), loss.Evaluate(best, z) - 1e-15);
  }
}

TEST(LossTest, QuadraticGradientVanishesAtItem) {
  const QuadraticLoss loss(3, 2.0);
  const Vector z = {0.1, -0.2, 0.3};
  EXPECT_EQ(loss.GradientAt(z, z), (Vector{0.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(loss.Evaluate(Vector{1.1, -0.2, 0.3}, z), 0.5);
  const Vector theta = {0.5, 0.5, -0.5};
  const Vector g = loss.GradientAt(theta, z);
  const Vector num = NumericGradient(loss, theta, z);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g[i], num[i], 1e-8);
  EXPECT_DOUBLE_EQ(loss.strong_convexity(), 1.0);
}

TEST(LossTest, LogisticConstantsAndGradient) {
  const LogisticLoss loss(2, 0.8);
  EXPECT_EQ(loss.item_dim(), 3u);
  EXPECT_DOUBLE_EQ(loss.lipschitz(), 0.8);
  EXPECT_DOUBLE_EQ(loss.smoothness(), 0.16);
  EXPECT_NEAR(loss.Evaluate(Vector{0.0, 0.0}, Vector{0.5, 0.5, 1.0}),
              std::log(2.0), 1e-15);
  RandomSource rng(12);
  for (int i = 0; i < 100; ++i) {
    Vector theta = testing::RandomVector(2, rng);
    Vector z = {0.4 * (2 * rng.Uniform() - 1), 0.4 * (2 * rng.Uniform() - 1),
                rng.Sign() * 1.0};
    const Vector g = loss.GradientAt(theta, z);
    const Vector num = NumericGradient(loss, theta, z);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(g[k], num[k], 1e-7);
    EXPECT_LE(Norm2(g), 0.8);
  }
  // Large margins stay finite.
  EXPECT_TRUE(
      std::isfinite(loss.Evaluate(Vector{1e4, 0.0}, Vector{-1.0, 0.0, 1.0})));
  EXPECT_NEAR(loss.Evaluate(Vector{1e4, 0.0}, Vector{-1.0, 0.0, 1.0}), 1e4,
              1e-6);
}

Vector InBall(std::size_t d, double radius, RandomSource& rng) {
  Vector v = testing::RandomVector(d, rng);
  const double scale = radius * rng.Uniform() / Norm2(v);
  for (double& x : v) x *= scale;
  return v;
}

TEST(LossTest, DeclaredConstantsHoldOnRandomPairs) {
  const std::size_t d = 3;
  const FeasibleSet set = Unwrap(FeasibleSet::Ball(Vector(d, 0.0), 1.0));
  RandomSource rng(13);
  for (const char* kind : {"linear", "quadratic", "logistic"}) {
    const auto loss = Unwrap(MakeLoss(kind, d, 1.0, set));
    const bool logistic = loss->item_dim() == d + 1;
    for (int i = 0; i < 1000; ++i) {
      const Vector a = InBall(d, 1.0, rng), b = InBall(d, 1.0, rng);
      Vector z = InBall(d, 1.0, rng);
      if (logistic) z.push_back(rng.Sign() * 1.0);
      Vector diff(d), gdiff(d);
      const Vector ga = loss->GradientAt(a, z), gb = loss->GradientAt(b, z);
      for (std::size_t k = 0; k < d; ++k) {
        diff[k] = a[k] - b[k];
        gdiff[k] = ga[k] - gb[k];
      }
      const double dist = Norm2(diff);
      const double slack = 1e-12;
      EXPECT_LE(Norm2(ga), loss->lipschitz() + slack) << kind;
      EXPECT_LE(std::abs(loss->Evaluate(a, z) - loss->Evaluate(b, z)),
                loss->lipschitz() * dist + slack)
          << kind;
      EXPECT_LE(Norm2(gdiff), loss->smoothness() * dist + slack) << kind;
      EXPECT_GE(Dot(gdiff, diff),
                loss->strong_convexity() * dist * dist - slack)
          << kind;
    }
  }
}

TEST(MakeLossTest, BuildsKnownKinds) {
  const FeasibleSet set = Unwrap(FeasibleSet::Ball(Vector{0.3, 0.4}, 1.0));
  EXPECT_EQ(Unwrap(MakeLoss("linear", 2, 1.0, set))->name(), "linear");
  EXPECT_DOUBLE_EQ(Unwrap(MakeLoss("quadratic", 2, 1.0, set))->lipschitz(),
                   0.5 + 1.0 + 1.0);
  EXPECT_EQ(Unwrap(MakeLoss("logistic", 2, 1.0, set))->item_dim(), 3u);
  EXPECT_KIND(MakeLoss("hinge", 2, 1.0, set), ErrorKind::kArgument);
  EXPECT_KIND(MakeLoss("linear", 3, 1.0, set), ErrorKind::kShape);
}

}  // namespace
}  // namespace userdp
