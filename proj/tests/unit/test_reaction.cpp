#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rds/reaction.hpp"

using namespace rds;

namespace {

// Composite Simpson on a fine uniform grid; independent of the adaptive
// Gauss-Kronrod path used by tail_integral.
double simpson_oracle(const ReactionTerm& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

std::vector<ReactionTerm> builtin_catalog() {
  return {ReactionTerm::kpp_logistic(),      ReactionTerm::kpp_logistic(4.0),
          ReactionTerm::monostable_power(2), ReactionTerm::ignition(0.3),
          ReactionTerm::bistable(0.25),      ReactionTerm::bistable(0.5),
          ReactionTerm::tristable(0.1, 0.4, 0.7, 10.0)};
}

}  // namespace

TEST(Reaction, EvalExamples) {
  EXPECT_DOUBLE_EQ(ReactionTerm::kpp_logistic().eval(0.5), 0.25);
  EXPECT_DOUBLE_EQ(ReactionTerm::kpp_logistic().eval(0.0), 0.0);
  EXPECT_DOUBLE_EQ(ReactionTerm::bistable(0.25).eval(0.25), 0.0);
}

TEST(Reaction, EvalRejectsOutOfRange) {
  const auto f = ReactionTerm::kpp_logistic();
  EXPECT_THROW(f.eval(1.1), DomainError);
  EXPECT_THROW(f.eval(-1e-6), DomainError);
  EXPECT_NO_THROW(f.eval(1.0 + 1e-13));
}

TEST(Reaction, EndpointsAreExactZeros) {
  for (const auto& f : builtin_catalog()) {
    EXPECT_EQ(f.eval(0.0), 0.0) << f.describe();
    EXPECT_EQ(f.eval(1.0), 0.0) << f.describe();
  }
}

TEST(Reaction, DerivativeMatchesFiniteDifferences) {
  for (const auto& f : builtin_catalog()) {
    for (double s : {0.05, 0.2, 0.45, 0.61, 0.9}) {
      if (f.kind() == ReactionKind::ignition && std::abs(s - 0.3) < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (f(s + h) - f(s - h)) / (2 * h);
      EXPECT_NEAR(f.derivative(s), fd, 1e-6) << f.describe() << " s=" << s;
    }
  }
  EXPECT_DOUBLE_EQ(ReactionTerm::kpp_logistic().f_prime_at_zero(), 1.0);
}

TEST(Reaction, BistableSignPattern) {
  const auto f = ReactionTerm::bistable(0.25);
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    if (s < 0.25) EXPECT_LT(f(s), 0.0);
    if (s > 0.25) EXPECT_GT(f(s), 0.0);
  }
}

TEST(Reaction, TailIntegralExamples) {
  EXPECT_NEAR(tail_integral(ReactionTerm::kpp_logistic(), 0.0), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(tail_integral(ReactionTerm::bistable(0.5), 0.0), 0.0, 1e-12);
  // ∫₀¹ s(1-s)(s-α) ds = (1-2α)/12, i.e. 1/24 at α = 1/4.
  const auto b = ReactionTerm::bistable(0.25);
  EXPECT_NEAR(tail_integral(b, 0.0), 1.0 / 24.0, 1e-10);
  EXPECT_NEAR(tail_integral(b, 0.0), simpson_oracle(b, 0.0, 1.0), 1e-10);
}

TEST(Reaction, TailIntegralAgreesWithSimpsonOracle) {
  for (const auto& f : builtin_catalog()) {
    for (double t : {0.0, 0.13, 0.5, 0.87}) {
      double oracle = 0.0;
      if (f.kind() == ReactionKind::ignition && t < 0.3) {
        oracle = simpson_oracle(f, 0.3, 1.0);
      } else {
        oracle = simpson_oracle(f, t, 1.0);
      }
      EXPECT_NEAR(tail_integral(f, t), oracle, 1e-10) << f.describe() << " t=" << t;
    }
  }
}

TEST(Reaction, TailIntegralIsLipschitzInT) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (const auto& f : builtin_catalog()) {
    double fmax = 0.0;
    for (int i = 0; i <= 1000; ++i) fmax = std::max(fmax, std::abs(f(i / 1000.0)));
    for (int k = 0; k < 50; ++k) {
      const double t = u(rng);
      const double h = 1e-3 * (1 + k % 7);
      if (t + h >= 1.0) continue;
      EXPECT_LE(std::abs(tail_integral(f, t) - tail_integral(f, t + h)), 1.001 * fmax * h + 1e-12);
    }
  }
}

TEST(Reaction, KppRatioIsNonincreasing) {
  EXPECT_TRUE(ReactionTerm::kpp_logistic().is_kpp());
  EXPECT_TRUE(ReactionTerm::kpp_logistic(4.0).is_kpp());
  EXPECT_FALSE(ReactionTerm::monostable_power(2).is_kpp());
  EXPECT_FALSE(ReactionTerm::bistable(0.25).is_kpp());
  EXPECT_FALSE(ReactionTerm::ignition(0.3).is_kpp());
}

TEST(Reaction, InvasionExamples) {
  const auto kpp = check_invasion(ReactionTerm::kpp_logistic());
  EXPECT_TRUE(kpp.holds);
  EXPECT_TRUE(kpp.hair_trigger);
  ASSERT_TRUE(kpp.theta.has_value());
  EXPECT_LE(*kpp.theta, 1e-3 + 1e-12);

  const auto bi = check_invasion(ReactionTerm::bistable(0.25));
  EXPECT_TRUE(bi.holds);
  EXPECT_FALSE(bi.hair_trigger);
  ASSERT_TRUE(bi.theta.has_value());
  EXPECT_NEAR(*bi.theta, 0.251, 1e-9);

  EXPECT_FALSE(check_invasion(ReactionTerm::bistable(0.5)).holds);
  EXPECT_FALSE(check_invasion(ReactionTerm::bistable(0.6)).holds);
  EXPECT_TRUE(check_invasion(ReactionTerm::ignition(0.3)).holds);
}

TEST(Reaction, HairTriggerDependsOnDimension) {
  // s^p(1-s): hair trigger iff p <= 1 + 2/N.
  EXPECT_TRUE(check_invasion(ReactionTerm::monostable_power(2.0), 2).hair_trigger);
  EXPECT_FALSE(check_invasion(ReactionTerm::monostable_power(3.0), 2).hair_trigger);
  EXPECT_TRUE(check_invasion(ReactionTerm::monostable_power(3.0), 1).hair_trigger);
  EXPECT_TRUE(check_invasion(ReactionTerm::monostable_power(3.0), 2).holds);
}

TEST(Reaction, TristableInvasionNeedsBothIntegrals) {
  // Hypothesis 1 for tristable f iff ∫_β^1 f > 0 and ∫_0^1 f > 0.
  const auto good = ReactionTerm::tristable(0.1, 0.4, 0.6, 20.0);
  EXPECT_GT(tail_integral(good, 0.4), 0.0);
  EXPECT_TRUE(check_invasion(good).holds);
  const auto bad = ReactionTerm::tristable(0.1, 0.4, 0.9, 20.0);
  EXPECT_LT(tail_integral(bad, 0.4), 0.0);
  EXPECT_FALSE(check_invasion(bad).holds);
}

TEST(Reaction, IndeterminateWhenSignFlipsInsideAStep) {
  // Tabulated curve with a negative dip narrower than the sampling step.
  std::vector<double> s, v;
  for (int i = 0; i <= 40; ++i) {
    s.push_back(i / 40.0);
    v.push_back(0.2 * s.back() * (1 - s.back()));
  }
  s.insert(s.begin() + 21, {0.50040, 0.50050, 0.50060});
  v.insert(v.begin() + 21, {0.05, -0.05, 0.05});
  const auto f = ReactionTerm::tabulated(s, v);
  const auto verdict = check_invasion(f);
  EXPECT_TRUE(verdict.indeterminate);
  EXPECT_FALSE(verdict.holds);
}

TEST(Reaction, TabulatedPreservesSignBetweenKnots) {
  std::vector<double> s{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> v{0.0, -0.02, 0.0, 0.06, 0.05, 0.0};
  const auto f = ReactionTerm::tabulated(s, v);
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    if (x < 0.25) EXPECT_LE(f(x), 0.0) << x;
    if (x > 0.25) EXPECT_GE(f(x), 0.0) << x;
  }
  EXPECT_EQ(f.eval(1.0), 0.0);
}

TEST(Reaction, RestrictionRescales) {
  const auto f = ReactionTerm::tristable(0.1, 0.4, 0.7, 10.0);
  const auto lower = f.restricted(0.0, 0.4);
  for (double v : {0.1, 0.3, 0.8}) EXPECT_NEAR(lower(v), f(0.4 * v) / 0.4, 1e-15);
  EXPECT_NEAR(lower.derivative(0.5), f.derivative(0.2), 1e-12);
  const auto upper = f.restricted(0.4, 1.0);
  EXPECT_NEAR(upper(0.5), f(0.7) / 0.6, 1e-15);
}

TEST(Reaction, ParseSpecs) {
  const auto f = ReactionTerm::parse("bistable,alpha=0.25");
  EXPECT_EQ(f.kind(), ReactionKind::bistable);
  EXPECT_DOUBLE_EQ(f.param("alpha"), 0.25);
  EXPECT_EQ(ReactionTerm::parse("kind=kpp_logistic").kind(), ReactionKind::kpp_logistic);
  EXPECT_THROW(ReactionTerm::parse("bistable,alpah=0.25"), ConfigError);
  EXPECT_THROW(ReactionTerm::parse("cubic"), ConfigError);
  EXPECT_THROW(ReactionTerm::parse("bistable"), ConfigError);
}
