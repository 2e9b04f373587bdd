#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vceo/equivalence.hpp"
#include "vceo/scheme.hpp"

using namespace vceo;

namespace {

const SourceModel kUnit{1.0, 1.0, 1.0};
const SchemeParams kOnes{1, 1, 1, 1, 0, 0};

}  // namespace

TEST(Scheme, ReceiverDistortionOfUnitInstance) {
  EXPECT_NEAR(receiver_distortion(kUnit, kOnes, 1), 0.5, 1e-15);
  EXPECT_NEAR(receiver_distortion(kUnit, kOnes, 2), 0.5, 1e-15);
  const LabeledCov cov = build_joint_cov(kUnit, kOnes);
  EXPECT_NEAR(conditional_var(cov, Var::S, {Var::U11, Var::U21}), 0.5, 1e-14);
}

TEST(Scheme, ReceiverDistortionLimits) {
  const SchemeParams exact{0, 0, 0, 0, 0, 0};
  EXPECT_NEAR(receiver_distortion(kUnit, exact, 1), 1.0 / 3.0, 1e-15);
  const SchemeParams absent{kInf, kInf, kInf, kInf, 0, 0};
  EXPECT_DOUBLE_EQ(receiver_distortion(kUnit, absent, 2), 1.0);
  const SchemeParams huge{1e12, 1e12, 1e12, 1e12, 0, 0};
  EXPECT_NEAR(receiver_distortion(kUnit, huge, 1), 1.0, 1e-10);
}

TEST(Scheme, CentralDistortionOfUnitInstance) {
  const MarginalParams mp = marginal_params(kUnit, kOnes);
  EXPECT_NEAR(mp.tk(1).value(), 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(mp.ek(2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(mp.dk(1, 2), 0.5, 1e-15);
  EXPECT_NEAR(1.0 / central_distortion(kUnit, kOnes), 7.0 / 3.0, 1e-14);
  const LabeledCov cov = build_joint_cov(kUnit, kOnes);
  EXPECT_NEAR(conditional_var(cov, Var::S, {Var::U11, Var::U12, Var::U21, Var::U22}), 3.0 / 7.0,
              1e-14);
}

TEST(Scheme, CentralDistortionLimits) {
  const SchemeParams exact{0, 0, 0, 0, 0, 0};
  const MarginalParams mp = marginal_params(kUnit, exact);
  EXPECT_TRUE(mp.tk(1).infinite);
  EXPECT_NEAR(central_distortion(kUnit, exact), 1.0 / 3.0, 1e-15);
  // Encoder 2 silent: central receiver sees encoder 1 only.
  const SchemeParams one{0, 0, kInf, kInf, 0, 0};
  EXPECT_NEAR(central_distortion(kUnit, one), 0.5, 1e-15);
}

TEST(Scheme, PsdBoundaryGivesUnboundedT) {
  const SchemeParams edge{1.0, 4.0, 1.0, 1.0, 2.0, 0.0};
  const MarginalParams mp = marginal_params(kUnit, edge);
  EXPECT_TRUE(mp.tk(1).infinite);
  EXPECT_EQ(mp.ek(1), 0.0);
  EXPECT_FALSE(mp.tk(2).infinite);
  EXPECT_THROW(mp.to_bound_params(), DomainError);
}

TEST(Scheme, ClosedFormsAgreeWithDeterminantOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    using namespace oracle;
    EXPECT_NEAR(receiver_distortion(m, p, 1), cond_var(m, p, S, {U11, U21}),
                1e-10 * receiver_distortion(m, p, 1));
    EXPECT_NEAR(receiver_distortion(m, p, 2), cond_var(m, p, S, {U12, U22}),
                1e-10 * receiver_distortion(m, p, 2));
    const double d0 = central_distortion(m, p);
    EXPECT_NEAR(d0, cond_var(m, p, S, {U11, U12, U21, U22}), 1e-10 * d0);
    const MarginalParams mp = marginal_params(m, p);
    EXPECT_NEAR(mp.dk(1, 1), cond_var(m, p, X1, {U11, S}), 1e-10 * mp.dk(1, 1));
    EXPECT_NEAR(mp.dk(2, 2), cond_var(m, p, X2, {U22, S}), 1e-10 * mp.dk(2, 2));
    // t'_k = I(X_k; U_k1, U_k2 | S)
    const double t1 = 0.5 * std::log(cond_var(m, p, X1, {S}) / cond_var(m, p, X1, {S, U11, U12}));
    EXPECT_NEAR(mp.tk(1).value(), t1, 1e-10 * std::max(1.0, t1));
  }
}

TEST(Scheme, SumRateMatchesDeterminantOracle) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    const RateBreakdown r = sum_rate(m, p);
    EXPECT_NEAR(r.sum_rate, oracle::sum_rate(m, p), 1e-10 * std::max(1.0, r.sum_rate));
    EXPECT_NEAR(r.sum_rate, r.term_mi_joint + r.term_mi_cross, 1e-15);
  }
}

TEST(Scheme, SumRateOfUnitInstanceMatchesDecompositionAtZeroSideNoise) {
  const double direct = sum_rate(kUnit, kOnes).sum_rate;
  EXPECT_NEAR(direct, achievable_decomposition(kUnit, kOnes, {0.0, 0.0}), 1e-12);
}

TEST(Scheme, SumRateVanishesForUselessDescriptions) {
  const SchemeParams huge{1e12, 1e12, 1e12, 1e12, 0, 0};
  EXPECT_NEAR(sum_rate(kUnit, huge).sum_rate, 0.0, 1e-10);
}

TEST(Scheme, SingleEncoderReduction) {
  const SourceModel m{1.3, 0.7, 2.1};
  const SchemeParams p{0.5, 0.9, 1e15, 1e15, 0.3, 0.0};
  const SchemeParams solo{0.5, 0.9, 1.0, 1.0, 0.3, 0.0};
  const LabeledCov cov = build_joint_cov(m, solo);
  const double expected = gaussian_mi(cov, {Var::X1}, {Var::U11, Var::U12}) +
                          gaussian_mi(cov, {Var::U11}, {Var::U12});
  EXPECT_NEAR(sum_rate(m, p).sum_rate, expected, 1e-9);
}

TEST(Scheme, RateTupleMeetsConstraintsAndSums) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const SourceModel m = oracle::random_model(rng);
    const SchemeParams p = oracle::random_params(rng, m);
    for (double delta : {0.1, 0.01}) {
      const RateBreakdown t = rate_tuple(m, p, delta);
      double total = 0.0;
      for (double r : *t.rates) total += r;
      EXPECT_NEAR(total, t.sum_rate + delta, 1e-9);
      const auto cs = rate_constraints(m, p, t);
      EXPECT_EQ(cs.size(), 12u);
      for (const auto& c : cs) EXPECT_TRUE(c.strict()) << c.name << ": " << c.lhs << " vs " << c.rhs;
    }
  }
}

TEST(Scheme, RateTupleApproachesSumRate) {
  const SchemeParams p{0.4, 0.7, 0.5, 0.6, 0.1, 0.2};
  const RateBreakdown t = rate_tuple(kUnit, p, 1e-9);
  double total = 0.0;
  for (double r : *t.rates) total += r;
  EXPECT_NEAR(total, sum_rate(kUnit, p).sum_rate, 1e-8);
}

TEST(Scheme, RateTupleSymmetricUnderLabelSwap) {
  const SchemeParams p{0.4, 0.7, 0.4, 0.7, 0.2, 0.2};
  const RateBreakdown t = rate_tuple(kUnit, p, 0.1);
  const auto& pre = *t.pre_rates;
  EXPECT_NEAR(pre[RateBreakdown::link(1, 1)], pre[RateBreakdown::link(2, 1)], 1e-14);
  EXPECT_NEAR(pre[RateBreakdown::link(1, 2)], pre[RateBreakdown::link(2, 2)], 1e-14);
}

TEST(Scheme, RejectsBadArguments) {
  EXPECT_THROW(receiver_distortion(kUnit, kOnes, 3), DomainError);
  EXPECT_THROW(receiver_distortion(kUnit, SchemeParams{1, 1, 1, 1, -0.1, 0}, 1), DomainError);
  EXPECT_THROW(rate_tuple(kUnit, kOnes, 0.0), DomainError);
  EXPECT_THROW(rate_constraints(kUnit, kOnes, sum_rate(kUnit, kOnes)), DomainError);
  EXPECT_THROW(sum_rate(kUnit, SchemeParams{0, 1, 1, 1, 0, 0}), InfiniteInformation);
}
