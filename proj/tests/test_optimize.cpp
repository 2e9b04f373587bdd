#include <cmath>

#include <gtest/gtest.h>

#include "vceo/bound.hpp"
#include "vceo/optimize.hpp"

using namespace vceo;

namespace {

const SourceModel kUnit{1.0, 1.0, 1.0};

}  // namespace

TEST(Optimize, SlackTargetsNeedAlmostNoRate) {
  const OptimizeResult r = optimize_sum_rate(kUnit, {1.0, 1.0, 1.0});
  EXPECT_NEAR(r.rates.sum_rate, 0.0, 1e-6);
}

TEST(Optimize, MatchesLowerBoundOnUnitInstance) {
  const DistortionTriple tg{0.4, 0.4, 0.35};
  const OptimizeResult r = optimize_sum_rate(kUnit, tg);
  const LowerBoundResult lb = lower_bound(kUnit, tg);
  EXPECT_LE(std::abs(r.rates.sum_rate - lb.value) / lb.value, 1e-3);
  EXPECT_LE(r.distortions[0], tg.d1);
  EXPECT_LE(r.distortions[1], tg.d2);
  EXPECT_LE(r.distortions[2], tg.d0);
}

TEST(Optimize, DeterministicForFixedSeed) {
  const DistortionTriple tg{0.45, 0.5, 0.38};
  OptimizeOptions o;
  o.starts = 4;
  const OptimizeResult a = optimize_sum_rate(kUnit, tg, o);
  const OptimizeResult b = optimize_sum_rate(kUnit, tg, o);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.rates.sum_rate, b.rates.sum_rate);
}

TEST(Optimize, TighterCentralTargetNeverLowersTheOptimum) {
  double prev = 0.0;
  for (double d0 : {0.39, 0.37, 0.35, 0.34}) {
    const double v = optimize_sum_rate(kUnit, {0.4, 0.4, d0}).rates.sum_rate;
    EXPECT_GE(v, prev - 1e-6) << "D0 = " << d0;
    prev = v;
  }
}

TEST(Optimize, InfeasibleTargetsNameTheConstraint) {
  try {
    optimize_sum_rate(kUnit, {0.4, 0.4, 0.3});
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("D0"), std::string::npos);
  }
  EXPECT_THROW(optimize_sum_rate(kUnit, {0.2, 0.4, 0.35}), InfeasibleError);
  EXPECT_THROW(optimize_sum_rate(kUnit, {0.4, 0.4, -1.0}), DomainError);
}
