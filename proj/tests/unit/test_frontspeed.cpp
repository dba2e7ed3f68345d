#include <gtest/gtest.h>

#include <cmath>

#include "rds/frontspeed.hpp"

using namespace rds;

namespace {

const double kBistableQuarterSpeed = 0.5 / std::sqrt(2.0);

// Closed-form front of s(1-s)(s-α): speed √2(1/2-α), profile 1/(1+e^{z/√2}).
double bistable_speed(double alpha) { return std::sqrt(2.0) * (0.5 - alpha); }
double bistable_profile(double z) { return 1.0 / (1.0 + std::exp(z / std::sqrt(2.0))); }

}  // namespace

TEST(FrontSpeed, LogisticFrontExistence) {
  const auto f = ReactionTerm::kpp_logistic();
  EXPECT_TRUE(front_exists(f, 2.0));
  EXPECT_FALSE(front_exists(f, 1.0));
  EXPECT_TRUE(front_exists(f, 10.0));
  EXPECT_EQ(shoot(f, 1.0).outcome, ShotOutcome::focus);
}

TEST(FrontSpeed, BistableFrontOnlyAtItsSpeed) {
  const auto f = ReactionTerm::bistable(0.25);
  EXPECT_TRUE(front_exists(f, kBistableQuarterSpeed));
  EXPECT_EQ(shoot(f, kBistableQuarterSpeed - 1e-3).outcome, ShotOutcome::overshoot);
  EXPECT_EQ(shoot(f, kBistableQuarterSpeed + 1e-3).outcome, ShotOutcome::undershoot);
}

TEST(FrontSpeed, KppMinSpeed) {
  EXPECT_DOUBLE_EQ(kpp_min_speed(ReactionTerm::kpp_logistic()), 2.0);
  EXPECT_DOUBLE_EQ(kpp_min_speed(ReactionTerm::kpp_logistic(4.0)), 4.0);
  EXPECT_THROW(kpp_min_speed(ReactionTerm::bistable(0.25)), DomainError);
  EXPECT_NEAR(min_speed(ReactionTerm::kpp_logistic()).speed, 2.0, 1e-4);
}

TEST(FrontSpeed, BistableMinSpeedMatchesClosedForm) {
  for (double alpha : {0.1, 0.25, 0.4}) {
    EXPECT_NEAR(min_speed(ReactionTerm::bistable(alpha)).speed, bistable_speed(alpha), 1e-6) << alpha;
  }
  EXPECT_NEAR(min_speed(ReactionTerm::bistable(0.25)).speed, 0.353553, 1e-3);
}

TEST(FrontSpeed, BalancedBistableHasNoPositiveSpeed) {
  EXPECT_THROW(min_speed(ReactionTerm::bistable(0.5)), DomainError);
  EXPECT_THROW(min_speed(ReactionTerm::bistable(0.6)), DomainError);
}

TEST(FrontSpeed, IgnitionRegressionBaseline) {
  // Frozen from the shooting solver; no closed form.
  EXPECT_NEAR(min_speed(ReactionTerm::ignition(0.3)).speed, 0.49537019, 1e-6);
}

TEST(FrontSpeed, SpeedScalesWithSquareRootOfRate) {
  // φ(z) -> φ(√r z) maps fronts of f to fronts of r f with speed √r c.
  const double base = min_speed(ReactionTerm::ignition(0.3)).speed;
  EXPECT_NEAR(min_speed(ReactionTerm::ignition(0.3, 9.0)).speed, 3.0 * base, 1e-6);
  const double b = min_speed(ReactionTerm::bistable(0.2)).speed;
  EXPECT_NEAR(min_speed(ReactionTerm::bistable(0.2, 4.0)).speed, 2.0 * b, 1e-6);
}

TEST(FrontSpeed, ClosedFormProfileResidual) {
  // The analytic profile has a tiny discrete residual; our solver's profile
  // must match it up to translation.
  const auto f = ReactionTerm::bistable(0.25);
  std::vector<double> z, phi;
  for (int i = -20000; i <= 20000; ++i) {
    z.push_back(i * 1e-3);
    phi.push_back(bistable_profile(z.back()));
  }
  EXPECT_LT(profile_residual(f, kBistableQuarterSpeed, z, phi), 1e-6);
  EXPECT_GT(profile_residual(f, kBistableQuarterSpeed + 0.05, z, phi), 1e-3);

  const auto sol = front_profile(f, kBistableQuarterSpeed);
  EXPECT_LT(sol.residual, 1e-6);
  std::size_t mid = 0;
  while (sol.phi[mid] > 0.5) ++mid;
  const double z_half = sol.z[mid];
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.z.size(); i += 10) {
    worst = std::max(worst, std::abs(sol.phi[i] - bistable_profile(sol.z[i] - z_half)));
  }
  EXPECT_LT(worst, 2e-3);
}

TEST(FrontSpeed, ProfileIsMonotoneAndSpansClipBand) {
  for (const auto& f : {ReactionTerm::kpp_logistic(), ReactionTerm::bistable(0.3), ReactionTerm::ignition(0.2)}) {
    const auto sol = min_speed(f);
    ASSERT_GE(sol.phi.size(), 3u);
    EXPECT_GE(sol.phi.front(), 1.0 - 1e-3);
    EXPECT_LE(sol.phi.back(), 1e-3);
    for (std::size_t i = 1; i < sol.phi.size(); ++i) ASSERT_LT(sol.phi[i], sol.phi[i - 1]);
    EXPECT_LT(sol.residual, 1e-4) << f.describe();
  }
}

TEST(FrontSpeed, MinSpeedIsBelowEveryAdmissibleSpeed) {
  const auto f = ReactionTerm::bistable(0.3);
  const double c = min_speed(f).speed;
  EXPECT_FALSE(front_exists(f, c - 1e-4));
  for (double d : {1e-4, 0.1, 1.0}) EXPECT_NE(shoot(f, c + d).outcome, ShotOutcome::overshoot);
}

TEST(FrontSpeed, TerraceVerdicts) {
  const auto terrace = terrace_speeds(ReactionTerm::tristable(0.1, 0.4, 0.7, 20.0));
  EXPECT_EQ(terrace.verdict, TerraceVerdict::terrace_expected);
  EXPECT_GT(terrace.c1, terrace.c2);

  const auto single = terrace_speeds(ReactionTerm::tristable(0.1, 0.4, 0.6, 20.0));
  EXPECT_EQ(single.verdict, TerraceVerdict::single_front);
  EXPECT_LT(single.c1, single.c2);
}

TEST(FrontSpeed, TerraceSpeedsScaleWithRate) {
  const auto a = terrace_speeds(ReactionTerm::tristable(0.1, 0.4, 0.7, 1.0));
  const auto b = terrace_speeds(ReactionTerm::tristable(0.1, 0.4, 0.7, 16.0));
  EXPECT_NEAR(b.c1, 4.0 * a.c1, 1e-6);
  EXPECT_NEAR(b.c2, 4.0 * a.c2, 1e-6);
}

TEST(FrontSpeed, TerraceDegenerateWhenUpperIntegralVanishes) {
  // γ close to 1 makes ∫_β^1 f < 0.
  const auto t = terrace_speeds(ReactionTerm::tristable(0.1, 0.4, 0.9, 20.0));
  EXPECT_EQ(t.verdict, TerraceVerdict::degenerate);
  EXPECT_FALSE(t.notes.empty());
  EXPECT_THROW(terrace_speeds(ReactionTerm::bistable(0.25)), DomainError);
}
