#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rds/geometry.hpp"

using namespace rds;

namespace {

RasterMask disc_mask(double r, double h, double half) {
  const auto n = static_cast<std::size_t>(std::lround(2.0 * half / h)) + 1;
  RasterMask m({-half, -half}, h, n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m.set(i, j, norm(m.center(i, j)) <= r + 1e-12);
  return m;
}

Vec2 from_vertical(double deg) { return {std::sin(deg * kPi / 180.0), std::cos(deg * kPi / 180.0)}; }

}  // namespace

TEST(Arcs, MergeAndWrap) {
  const auto m = merge_arcs({{0.0, 1.0}, {0.5, 1.0}, {3.0, 0.5}, {-3.0, 0.5}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_NEAR(m[0].lo, 0.0, 1e-12);
  EXPECT_NEAR(m[0].len, 1.5, 1e-12);
  EXPECT_NEAR(m[1].lo, 3.0, 1e-12);
  EXPECT_NEAR(m[1].len, 2.0 * kPi - 3.0 - 3.0 + 0.5, 1e-12);
  EXPECT_EQ(merge_arcs({{0.0, 4.0}, {3.9, 2.5}}).size(), 1u);
}

TEST(Arcs, MaxDot) {
  const std::vector<Arc> lower{{-kPi, kPi}};
  EXPECT_NEAR(max_dot_over_arcs(lower, {0.0, 1.0}), 0.0, 1e-12);
  EXPECT_NEAR(max_dot_over_arcs(lower, {0.0, -1.0}), 1.0, 1e-12);
  EXPECT_NEAR(max_dot_over_arcs(lower, from_vertical(30.0)), std::sin(kPi / 6.0), 1e-12);
  EXPECT_EQ(max_dot_over_arcs({}, {1.0, 0.0}), -kInf);
}

TEST(DistanceTransform, PythagoreanTriple) {
  RasterMask m({0.0, 0.0}, 1.0, 8, 8);
  m.set(0, 0, true);
  const auto d = distance_transform(m);
  EXPECT_DOUBLE_EQ(d[4 * 8 + 3], 5.0);
  EXPECT_DOUBLE_EQ(d[0], 0.0);
}

TEST(DistanceTransform, FullAndEmptyMasks) {
  const RasterMask full({0.0, 0.0}, 0.5, 6, 4, true);
  for (double v : distance_transform(full)) EXPECT_EQ(v, 0.0);
  const RasterMask none({0.0, 0.0}, 0.5, 6, 4);
  for (double v : distance_transform(none)) EXPECT_EQ(v, kInf);
}

TEST(DistanceTransform, MatchesBruteForceOnRandomMasks) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t nx = 1 + rng() % 32, ny = 1 + rng() % 32;
    const double p = std::uniform_real_distribution<double>(0.01, 0.4)(rng);
    RasterMask m({0.0, 0.0}, 0.25, nx, ny);
    std::bernoulli_distribution b(p);
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) m.set(i, j, b(rng));
    const auto fast = distance_transform(m, Exec::serial);
    const auto slow = distance_transform_brute(m);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) {
      if (std::isinf(slow[k])) {
        EXPECT_TRUE(std::isinf(fast[k]));
      } else {
        EXPECT_NEAR(fast[k], slow[k], 1e-12) << "trial " << trial << " cell " << k;
      }
    }
  }
}

TEST(DistanceTransform, SerialAndParallelAgree) {
  std::mt19937 rng(11);
  RasterMask m({0.0, 0.0}, 0.1, 301, 257);
  std::bernoulli_distribution b(0.002);
  for (std::size_t j = 0; j < m.ny(); ++j)
    for (std::size_t i = 0; i < m.nx(); ++i) m.set(i, j, b(rng));
  EXPECT_EQ(distance_transform(m, Exec::serial), distance_transform(m, Exec::parallel));
}

TEST(Hausdorff, Conventions) {
  const auto a = disc_mask(1.0, 0.1, 4.0);
  const RasterMask none({-4.0, -4.0}, 0.1, a.nx(), a.ny());
  EXPECT_EQ(hausdorff(a, a), 0.0);
  EXPECT_EQ(hausdorff(none, none), 0.0);
  EXPECT_EQ(hausdorff(a, none), kInf);
  EXPECT_EQ(hausdorff(none, a), kInf);
}

TEST(Hausdorff, ConcentricDiscs) {
  const double h = 0.05;
  const auto a = disc_mask(1.0, h, 4.0), b = disc_mask(2.0, h, 4.0), c = disc_mask(3.0, h, 4.0);
  EXPECT_NEAR(hausdorff(a, b), 1.0, h);
  EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
  EXPECT_LE(hausdorff(a, c), hausdorff(a, b) + hausdorff(b, c) + 1e-12);
  EXPECT_EQ(directed_hausdorff(a, b), 0.0);
}

TEST(Dilation, MaskMatchesBruteDistance) {
  RasterMask m({0.0, 0.0}, 0.5, 20, 20);
  m.set(3, 4, true);
  m.set(15, 12, true);
  const auto d = minkowski_dilate(m, 1.5);
  const auto ref = distance_transform_brute(m);
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_EQ(d.cells()[k] != 0, ref[k] < 1.5);
}

TEST(Dilation, SupportBall) {
  const auto u = SupportSpec::ball({0.0, 0.0}, 1.0).dilated(2.0);
  EXPECT_TRUE(u.contains({2.9, 0.0}));
  EXPECT_FALSE(u.contains({3.1, 0.0}));
  EXPECT_NEAR(u.distance({0.0, 5.0}), 2.0, 1e-12);
}

TEST(Support, DistancesOfSimpleSets) {
  const auto hs = SupportSpec::half_space({0.0, 1.0}, 0.0);
  EXPECT_NEAR(hs.distance({3.0, 2.5}), 2.5, 1e-12);
  EXPECT_NEAR(hs.signed_distance({3.0, -1.5}), -1.5, 1e-12);
  const auto ball = SupportSpec::ball({1.0, 1.0}, 2.0);
  EXPECT_NEAR(ball.distance({1.0, 6.0}), 3.0, 1e-12);
  const auto sg = SupportSpec::subgraph(GraphTag::linear_cone, {{"alpha", 1.0}});
  EXPECT_NEAR(sg.distance({0.0, 1.0}), std::sqrt(0.5), 1e-7);
  EXPECT_TRUE(sg.contains({5.0, 4.0}));
  EXPECT_EQ(SupportSpec::empty().distance({0.0, 0.0}), kInf);
}

TEST(Support, ParseRoundTrip) {
  const auto a = SupportSpec::parse("subgraph,tag=linear_cone,alpha=2");
  EXPECT_EQ(a.kind(), SupportKind::subgraph);
  EXPECT_NEAR(a.graph(3.0).value(), 6.0, 1e-12);
  EXPECT_EQ(SupportSpec::parse("ball,r=2").kind(), SupportKind::ball_union);
  EXPECT_THROW(SupportSpec::parse("subgraph,tag=linear_cone,alhpa=2"), Error);
}

TEST(DirectionSets, HalfSpace) {
  const auto d = direction_sets(SupportSpec::half_space({0.0, 1.0}, 0.0));
  for (const auto& s : d.samples) {
    if (s.e.y <= 1e-12) {
      EXPECT_EQ(s.cls, DirClass::unbounded) << s.angle;
    } else {
      EXPECT_EQ(s.cls, DirClass::bounded) << s.angle;
    }
  }
}

TEST(DirectionSets, ConeOpening) {
  // Subgraph of |x'|: recession directions make an angle of at least 45° with e_N.
  const auto d = direction_sets(SupportSpec::subgraph(GraphTag::linear_cone, {{"alpha", 1.0}}));
  for (const auto& s : d.samples) {
    const double from_top = std::acos(std::clamp(s.e.y, -1.0, 1.0));
    if (from_top >= kPi / 4.0 - 1e-9) {
      EXPECT_EQ(s.cls, DirClass::unbounded) << s.angle;
    } else {
      EXPECT_EQ(s.cls, DirClass::bounded) << s.angle;
    }
  }
}

TEST(DirectionSets, BallIsBoundedEverywhere) {
  const auto d = direction_sets(SupportSpec::ball({0.0, 0.0}, 3.0));
  for (const auto& s : d.samples) EXPECT_EQ(s.cls, DirClass::bounded);
  EXPECT_TRUE(d.unbounded_arcs().empty());
}

TEST(DirectionSets, LineHasTwoDirections) {
  const auto d = direction_sets(SupportSpec::half_space({1.0, 0.0}, 0.0, 1));
  ASSERT_EQ(d.samples.size(), 2u);
  EXPECT_EQ(d.samples[0].cls, DirClass::bounded);
  EXPECT_EQ(d.samples[1].cls, DirClass::unbounded);
}

TEST(RhoInterior, HalfSpaceIsExact) {
  const auto r = rho_interior(SupportSpec::half_space({0.0, 1.0}, 0.0), 1.0);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.hausdorff_estimate, 1.0);
  EXPECT_TRUE(r.set.contains({0.0, -1.0}));
  EXPECT_FALSE(r.set.contains({0.0, -0.99}));
}

TEST(RhoInterior, ThinTubeIsEmpty) {
  const auto r = rho_interior(SupportSpec::gaussian_tube(1.0, 1.0), 1.0);
  EXPECT_TRUE(r.empty);
  EXPECT_EQ(r.hausdorff_estimate, kInf);
}

TEST(RhoInterior, AnnuliAreFinite) {
  const auto r = rho_interior(SupportSpec::annuli_union(2.0), 0.5);
  EXPECT_FALSE(r.empty);
  EXPECT_NEAR(r.hausdorff_estimate, 0.5, 0.15);
}

TEST(HypothesisU, ConeHolds) {
  const auto c = check_hypothesis_U(SupportSpec::subgraph(GraphTag::linear_cone, {{"alpha", 1.0}}), 1.0);
  EXPECT_TRUE(c.holds);
}

TEST(HypothesisU, BallHolds) {
  const auto c = check_hypothesis_U(SupportSpec::ball({0.0, 0.0}, 5.0), 1.0);
  EXPECT_TRUE(c.holds);
}

TEST(HypothesisU, AnnuliFail) {
  DirectionOptions o;
  o.n_dirs = 64;
  const auto c = check_hypothesis_U(SupportSpec::annuli_union(2.0), 0.5, o);
  EXPECT_FALSE(c.holds);
  EXPECT_TRUE(c.uncertain);
}

TEST(PredictedSpeed, ConeInVerticalDirection) {
  const auto d = direction_sets(SupportSpec::subgraph(GraphTag::linear_cone, {{"alpha", 1.0}}));
  const auto w = predicted_speed({0.0, 1.0}, d, 2.0);
  EXPECT_NEAR(w.value, 2.0 * std::sqrt(2.0), 1e-9);
}

TEST(PredictedSpeed, HalfSpaceOneOverCosine) {
  const auto d = direction_sets(SupportSpec::half_space({0.0, 1.0}, 0.0));
  for (double deg : {0.0, 20.0, 45.0, 70.0}) {
    const double expect = 2.0 / std::cos(deg * kPi / 180.0);
    EXPECT_NEAR(predicted_speed(from_vertical(deg), d, 2.0).value, expect, 1e-9) << deg;
  }
  EXPECT_EQ(predicted_speed({0.0, -1.0}, d, 2.0).value, kInf);
}

TEST(PredictedSpeed, BoundedSupportGivesCStar) {
  const auto d = direction_sets(SupportSpec::ball({0.0, 0.0}, 1.0));
  for (double deg = 0.0; deg < 360.0; deg += 37.0) EXPECT_DOUBLE_EQ(predicted_speed(from_vertical(deg), d, 2.0).value, 2.0);
}

TEST(PredictedSpeed, FormulasAgreeOnEverySample) {
  const auto d = direction_sets(SupportSpec::subgraph(GraphTag::linear_cone, {{"alpha", 0.5}}));
  for (const auto& s : d.samples) {
    SpeedPrediction w;
    ASSERT_NO_THROW(w = predicted_speed(s.e, d, 2.0)) << s.angle;
    if (std::isfinite(w.distance_formula)) {
      EXPECT_NEAR(w.sup_formula, w.distance_formula, 1e-9 * w.distance_formula);
    }
  }
}

TEST(Envelope, HalfSpaceStrip) {
  const auto d = direction_sets(SupportSpec::half_space({0.0, 1.0}, 0.0));
  const auto w = envelope_W(d, 2.0);
  EXPECT_TRUE(w.contains({50.0, 1.99}));
  EXPECT_FALSE(w.contains({50.0, 2.01}));
  EXPECT_TRUE(w.contains({-30.0, -400.0}));
}

TEST(Envelope, BoundedSupportGivesBall) {
  const auto w = envelope_W(direction_sets(SupportSpec::ball({0.0, 0.0}, 1.0)), 2.0);
  EXPECT_TRUE(w.contains({1.4, 1.4}));
  EXPECT_FALSE(w.contains({1.5, 1.5}));
}

TEST(Opening, ConvexSetsAreNonpositive) {
  const auto ball = SupportSpec::ball({0.0, 0.0}, 2.0);
  for (double deg : {0.0, 90.0, 200.0}) EXPECT_LE(opening(ball, from_vertical(deg) * 5.0).value, 1e-12);
  EXPECT_EQ(opening(SupportSpec::half_space({0.0, 1.0}, 0.0), {1.0, 3.0}).value, 0.0);
}

TEST(Opening, SingletonAndEmpty) {
  EXPECT_EQ(opening(SupportSpec::ball({0.0, 0.0}, 0.0), {1.0, 1.0}).value, -kInf);
  EXPECT_EQ(opening(SupportSpec::empty(), {1.0, 1.0}).value, -kInf);
}

TEST(Opening, RejectsPointsOfU) {
  EXPECT_THROW(opening(SupportSpec::ball({0.0, 0.0}, 2.0), {1.0, 0.0}), DomainError);
}

TEST(Opening, TwoHalfPlanesMatchDenseOracle) {
  const Vec2 n1 = from_vertical(-22.5), n2 = from_vertical(22.5);
  const auto u = SupportSpec::v_shaped(n1, 0.0, n2, 0.0);
  const Vec2 x{0.0, 1.0};
  const auto o = opening(u, x);
  EXPECT_NEAR(o.value, std::cos(kPi / 4.0), 1e-9);
  EXPECT_EQ(o.projections.size(), 2u);

  // Dense oracle: from each projection, scan directions on a fine grid and
  // radii out to 1e5; membership from the half-plane inequalities.
  double best = -kInf;
  for (const Vec2& xi : o.projections) {
    const Vec2 n = normalized(x - xi);
    for (int a = 0; a < 20000; ++a) {
      const Vec2 d = unit_from_angle(2.0 * kPi * a / 20000.0);
      for (double r = 1e-6; r < 1e5; r *= 1.05) {
        const Vec2 p = xi + d * r;
        if (dot(p, n1) <= 1e-12 || dot(p, n2) <= 1e-12) {
          best = std::max(best, dot(n, d));
          break;
        }
      }
    }
  }
  EXPECT_NEAR(o.value, best, 2e-3);
}

TEST(Opening, MasksOnlyGiveLowerBounds) {
  const auto m = SupportSpec::mask(disc_mask(2.0, 0.1, 5.0));
  const auto o = opening(m, {0.0, 4.0});
  EXPECT_TRUE(o.lower_bound_only);
  EXPECT_LE(o.value, 0.15);
}

TEST(DistanceLevel, PointsLieOnTheLevelSet) {
  const auto u = SupportSpec::ball({0.0, 0.0}, 1.0);
  const auto pts = distance_level_points(u, 3.0, {-10.0, 10.0, -10.0, 10.0}, 21);
  EXPECT_GE(pts.size(), 16u);
  for (const Vec2& p : pts) EXPECT_NEAR(norm(p), 4.0, 1e-9);
}

TEST(Ballcone, ConvexPlausibleWedgeNot) {
  const auto hs = ballcone_profile(SupportSpec::half_space({0.0, 1.0}, 0.0), {5.0, 10.0, 20.0});
  EXPECT_TRUE(hs.nonincreasing);
  EXPECT_TRUE(hs.plausible);
  const auto v = ballcone_profile(SupportSpec::v_shaped(from_vertical(-22.5), 0.0, from_vertical(22.5), 0.0),
                                  {5.0, 10.0, 20.0});
  for (const auto& p : v.profile) EXPECT_NEAR(p.sup_opening, std::cos(kPi / 4.0), 1e-6);
  EXPECT_FALSE(v.plausible);
}

TEST(Monotonicity, BallGivesWholeCircle) {
  const auto m = monotonicity_directions(SupportSpec::ball({0.0, 0.0}, 1.0), 100.0);
  EXPECT_FALSE(m.empty_flag);
  for (const auto& s : m.set.samples) EXPECT_EQ(s.cls, DirClass::member) << s.angle;
}

TEST(Monotonicity, BoundedWaveGivesVertical) {
  const auto m = monotonicity_directions(SupportSpec::subgraph(GraphTag::bounded_wave), 1000.0);
  for (const auto& s : m.set.samples) {
    const bool up = std::abs(s.e.x) < 1e-9 && s.e.y > 0.0;
    EXPECT_EQ(s.cls, up ? DirClass::member : DirClass::nonmember) << s.angle;
  }
}

TEST(Monotonicity, FullMaskIsFlaggedEmpty) {
  const auto m = monotonicity_directions(SupportSpec::mask(RasterMask({-5.0, -5.0}, 0.5, 21, 21, true)), 100.0);
  EXPECT_TRUE(m.empty_flag);
}
