#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rds/levelsets.hpp"

using namespace rds;

namespace {

double phi(double z) { return 1.0 / (1.0 + std::exp(z)); }

template <class F>
Field planted(const Window& w, double h, F u) {
  Field f;
  f.grid = Grid::plane(w, h);
  f.u.resize(f.grid.size());
  for (std::size_t j = 0; j < f.grid.ny; ++j)
    for (std::size_t i = 0; i < f.grid.nx; ++i) f.at(i, j) = u(f.grid.center(i, j));
  return f;
}

// Rotation by +90° about the grid centre on a square grid.
Field rotated(const Field& f) {
  Field g = f;
  const std::size_t n = f.grid.nx;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g.at(n - 1 - j, i) = f.at(i, j);
  return g;
}

double brute_defect(const std::vector<Vec2>& grads) {
  double m = 0.0;
  for (std::size_t a = 0; a < grads.size(); ++a)
    for (std::size_t b = a + 1; b < grads.size(); ++b) {
      const double c = dot(normalized(grads[a]), normalized(grads[b]));
      m = std::max(m, std::acos(std::clamp(c, -1.0, 1.0)));
    }
  return m;
}

}  // namespace

TEST(UpperLevelSet, ConstantsAndNesting) {
  const Window w{-5, 5, -5, 5};
  auto one = planted(w, 0.5, [](Vec2) { return 1.0; });
  auto zero = planted(w, 0.5, [](Vec2) { return 0.0; });
  EXPECT_EQ(upper_level_set(one, 0.5).count(), one.grid.size());
  EXPECT_EQ(upper_level_set(zero, 0.5).count(), 0u);

  auto bump = planted(w, 0.1, [](Vec2 x) { return std::exp(-dot(x, x) / 4.0); });
  const auto lo = upper_level_set(bump, 0.2), hi = upper_level_set(bump, 0.7);
  for (std::size_t k = 0; k < lo.size(); ++k) EXPECT_LE(hi.cells()[k], lo.cells()[k]);
  EXPECT_LT(hi.count(), lo.count());
  EXPECT_THROW(upper_level_set(bump, 1.0), DomainError);
}

TEST(UpperLevelSet, IndicatorGivesRasterizedSupport) {
  const auto g = Grid::plane({-10, 10, -10, 10}, 0.25);
  const auto f = rasterize_initial(SupportSpec::ball({1, 2}, 4.0), g, ReactionTerm::kpp_logistic(1.0), nullptr);
  for (double lambda : {0.01, 0.5, 0.99}) {
    const auto m = upper_level_set(f, lambda);
    for (std::size_t k = 0; k < m.size(); ++k) ASSERT_EQ(m.cells()[k] != 0, f.u[k] == 1.0);
  }
}

TEST(GraphPosition, PlantedFrontIsSecondOrder) {
  // u = φ(x_N − X) crosses 1/2 at X; the error of linear interpolation is O(h²).
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const double X = 3.3137;
    auto f = planted({-2, 2, -20, 20}, h, [&](Vec2 x) { return phi(x.y - X); });
    const auto p = graph_position(f, 0.5, 3);
    ASSERT_TRUE(p.valid());
    EXPECT_TRUE(p.monotone);
    const double err = std::abs(p.value - X);
    EXPECT_LE(err, 0.1 * h * h);
    if (prev > 0.0 && err > 1e-12) EXPECT_GT(prev / err, 3.0);
    prev = err;
  }
}

TEST(GraphPosition, OffCentreLevel) {
  const double X = -1.7;
  auto f = planted({-1, 1, -15, 15}, 0.05, [&](Vec2 x) { return phi(x.y - X); });
  // φ(z) = 0.2 at z = ln 4.
  EXPECT_NEAR(graph_position(f, 0.2, 0).value, X + std::log(4.0), 0.1 * 0.05 * 0.05 * 4);
}

TEST(GraphPosition, Flags) {
  const Window w{-1, 1, -4, 4};
  auto top = planted(w, 0.5, [](Vec2) { return 0.9; });
  auto p = graph_position(top, 0.5, 0);
  EXPECT_TRUE(p.above_window);
  EXPECT_FALSE(p.valid());
  EXPECT_DOUBLE_EQ(p.value, 4.0);

  auto none = planted(w, 0.5, [](Vec2) { return 0.1; });
  EXPECT_TRUE(graph_position(none, 0.5, 0).below_window);

  // Bump above the main front: the topmost crossing wins and is flagged.
  auto bumpy = planted(w, 0.25, [](Vec2 x) { return std::max(phi(4.0 * x.y), 0.8 * std::exp(-8.0 * (x.y - 2.5) * (x.y - 2.5))); });
  p = graph_position(bumpy, 0.5, 1);
  EXPECT_FALSE(p.monotone);
  EXPECT_GT(p.violation, 0.3);
  EXPECT_GT(p.value, 2.5);
  EXPECT_THROW(graph_position(bumpy, 0.5, 999), DomainError);
}

TEST(GraphPosition, SimulatedHalfSpaceStartsAtInterface) {
  const auto g = Grid::plane({-3, 3, -10, 10}, 0.1);
  RunConfig cfg;
  cfg.support = SupportSpec::half_space({0, 1});
  cfg.reaction = ReactionTerm::kpp_logistic(1.0);
  cfg.grid = g;
  cfg.t_final = 0.01;
  const auto res = run(cfg);
  const auto p = graph_position(res.snapshots.back().field, 0.5, 30);
  EXPECT_TRUE(p.valid());
  EXPECT_NEAR(p.value, 0.0, g.h);
}

TEST(GraphPosition, LineField) {
  Field f;
  f.grid = Grid::line(-20, 20, 0.05);
  f.u.resize(f.grid.size());
  for (std::size_t i = 0; i < f.grid.nx; ++i) f.at(i) = phi(f.grid.center(i, 0).x - 4.0);
  EXPECT_NEAR(graph_position(f, 0.5).value, 4.0, 1e-3);
}

TEST(GradGraph, TiltedAndHorizontalFronts) {
  const double h = 0.1;
  for (double theta : {0.0, 0.3, 0.7}) {
    const Vec2 e{std::sin(theta), std::cos(theta)};
    auto f = planted({-5, 5, -20, 20}, h, [&](Vec2 x) { return phi(dot(x, e) - 1.0); });
    const auto g = grad_graph(f, 0.5, {20, 50, 80});
    for (const auto& s : g) {
      ASSERT_TRUE(s.valid);
      EXPECT_NEAR(std::abs(s.dX), std::tan(theta), h);
      EXPECT_NEAR(s.dX, -std::tan(theta), 1e-3);
    }
  }
  auto f = planted({-5, 5, -20, 20}, h, [&](Vec2 x) { return phi(x.y); });
  EXPECT_THROW(grad_graph(f, 0.5, {0}), DomainError);
  const auto prof = graph_profile(f, 0.5);
  EXPECT_TRUE(std::isnan(prof.front().dX));
  EXPECT_NEAR(prof[10].dX, 0.0, 1e-12);
}

TEST(RayPosition, PlantedRadialFront) {
  const double h = 0.1, rho = 7.3;
  auto f = planted({-12, 12, -12, 12}, h, [&](Vec2 x) { return phi(norm(x) - rho); });
  for (double a = 0.0; a < 2.0 * kPi; a += 0.37) {
    const auto r = ray_position(f, unit_from_angle(a), 0.5);
    EXPECT_FALSE(r.window_limited);
    EXPECT_NEAR(r.R, rho, h);
  }
}

TEST(RayPosition, Flags) {
  auto one = planted({-3, 3, -3, 3}, 0.25, [](Vec2) { return 1.0; });
  auto r = ray_position(one, {1, 0}, 0.5);
  EXPECT_TRUE(r.window_limited);
  EXPECT_NEAR(r.R, 3.0, 0.25);
  auto zero = planted({-3, 3, -3, 3}, 0.25, [](Vec2) { return 0.0; });
  EXPECT_TRUE(ray_position(zero, {1, 0}, 0.5).no_crossing);
  auto off = planted({1, 3, 1, 3}, 0.25, [](Vec2) { return 1.0; });
  EXPECT_THROW(ray_position(off, {1, 0}, 0.5), DomainError);
}

TEST(RayPosition, FirstExitAndFurthest) {
  // Disc of radius 2 and an annulus 5 < r < 6.
  auto f = planted({-8, 8, -8, 8}, 0.05, [](Vec2 x) {
    const double r = norm(x);
    return std::max(phi(4.0 * (r - 2.0)), phi(4.0 * (5.0 - r)) * phi(4.0 * (r - 6.0)));
  });
  const auto far = ray_position(f, {0, 1}, 0.5);
  const auto first = ray_position(f, {0, 1}, 0.5, RayMode::first_exit);
  EXPECT_NEAR(far.R, 6.0, 0.05);
  EXPECT_NEAR(first.R, 2.0, 0.05);
}

TEST(RayPosition, HalfDomainAndRadialGrids) {
  // Cell centres start at h/2; the origin sits in the ghost half cell.
  auto half = planted({0, 10, 0, 10}, 0.1, [](Vec2 x) { return phi(norm(x) - 4.0); });
  EXPECT_NEAR(ray_position(half, normalized(Vec2{1, 1}), 0.5).R, 4.0, 0.1);

  Field rad;
  rad.grid = Grid::radial(3, 20.0, 0.05);
  rad.u.resize(rad.grid.size());
  for (std::size_t i = 0; i < rad.grid.nx; ++i) rad.at(i) = phi(rad.grid.center(i, 0).x - 11.0);
  EXPECT_NEAR(ray_position(rad, {1, 0}, 0.5).R, 11.0, 0.05);
  EXPECT_NEAR(ray_position(rad, {-1, 0}, 0.5).R, 11.0, 0.05);
}

TEST(SigmaK, ExactOnQuadratics) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = U(rng), b = U(rng), c = U(rng), d = U(rng), e = U(rng);
    auto f = planted({-2, 2, -2, 2}, 0.125,
                     [&](Vec2 x) { return a * x.x * x.x + b * x.x * x.y + c * x.y * x.y + d * x.x + e * x.y; });
    const auto s = sigma_k_field(f, 2);
    const double expect = 4.0 * a * c - b * b;
    for (std::size_t j = 1; j + 1 < f.grid.ny; ++j)
      for (std::size_t i = 1; i + 1 < f.grid.nx; ++i) ASSERT_NEAR(s[j * f.grid.nx + i], expect, 1e-9);
    EXPECT_TRUE(std::isnan(s[0]));
  }
  // x₁² + x₂ is not one-dimensional but σ₂ vanishes.
  auto f = planted({-2, 2, -2, 2}, 0.125, [](Vec2 x) { return x.x * x.x + x.y; });
  EXPECT_LE(sup_abs(sigma_k_field(f)), 1e-9);
  EXPECT_THROW(sigma_k_field(f, 3), DomainError);
}

TEST(SigmaK, OneDimensionalProfileAndBump) {
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const Vec2 e = normalized(Vec2{1, 2});
    auto f = planted({-6, 6, -6, 6}, h, [&](Vec2 x) { return phi(dot(x, e)); });
    const double s = sup_abs(sigma_k_field(f));
    EXPECT_LE(s, 0.05 * h * h);
    if (prev > 0.0) EXPECT_GT(prev / s, 3.0);
    prev = s;
  }
  auto bump = planted({-3, 3, -3, 3}, 0.01, [](Vec2 x) { return std::exp(-dot(x, x)); });
  const auto s = sigma_k_field(bump);
  const std::size_t c = bump.grid.nx / 2;
  // det D²e^{-r²} = 4(1 − 2r²)e^{-2r²}; the nearest cell is h/2 off centre.
  const double r2 = dot(bump.grid.center(c, c), bump.grid.center(c, c));
  EXPECT_NEAR(s[c * bump.grid.nx + c], 4.0 * (1.0 - 2.0 * r2) * std::exp(-2.0 * r2), 1e-3);
  EXPECT_GT(s[c * bump.grid.nx + c], 3.9);
}

TEST(Planarity, PlanarFront) {
  const Vec2 e = normalized(Vec2{1, 3});
  for (double h : {0.2, 0.1}) {
    auto f = planted({-8, 8, -8, 8}, h, [&](Vec2 x) { return phi(dot(x, e)); });
    const auto d = planarity_defect(f, {0.5, -0.3}, 3.0);
    EXPECT_FALSE(d.near_constant);
    EXPECT_GT(d.cells, 100u);
    EXPECT_LE(d.defect, h);
  }
}

TEST(Planarity, RadialFrontMatchesCircleGeometry) {
  const double rho0 = 10.0, r = 2.0;
  auto f = planted({-14, 14, -14, 14}, 0.05, [&](Vec2 x) { return phi(norm(x) - rho0); });
  for (double a : {0.0, 0.4, 1.1}) {
    const auto d = planarity_defect(f, unit_from_angle(a) * rho0, r);
    EXPECT_NEAR(d.defect, 2.0 * std::asin(r / rho0), 0.01);
  }
}

TEST(Planarity, ConstantWindowIsNearConstant) {
  auto f = planted({-5, 5, -5, 5}, 0.25, [](Vec2) { return 0.4; });
  const auto d = planarity_defect(f, {0, 0}, 2.0);
  EXPECT_TRUE(d.near_constant);
  EXPECT_EQ(d.defect, 0.0);
  EXPECT_THROW(planarity_defect(f, {4, 0}, 2.0), DomainError);
}

TEST(Planarity, InvariantUnderQuarterTurns) {
  auto f = planted({-6, 6, -6, 6}, 0.1, [](Vec2 x) { return phi(x.x + 0.3 * x.y * x.y - 0.5 * x.x * x.y); });
  const auto d0 = planarity_defect(f, {0, 0}, 3.0);
  auto g = f;
  for (int k = 1; k <= 3; ++k) {
    g = rotated(g);
    EXPECT_NEAR(planarity_defect(g, {0, 0}, 3.0).defect, d0.defect, 1e-12);
  }
}

TEST(Planarity, AgreesWithPairwiseOracle) {
  // Random fields whose gradients spread past a half turn exercise both paths.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double a = U(rng), b = U(rng), c = U(rng) * (trial % 2 ? 3.0 : 0.05);
    auto f = planted({-3, 3, -3, 3}, 0.25,
                     [&](Vec2 x) { return a * x.x + b * x.y + c * (x.x * x.x - 0.7 * x.y * x.y + x.x * x.y); });
    const Vec2 center{0.1, -0.2};
    const double radius = 2.0, h = f.grid.h;
    std::vector<Vec2> grads;
    for (std::size_t j = 1; j + 1 < f.grid.ny; ++j)
      for (std::size_t i = 1; i + 1 < f.grid.nx; ++i) {
        if (norm(f.grid.center(i, j) - center) > radius) continue;
        const Vec2 g{(f.at(i + 1, j) - f.at(i - 1, j)) / (2 * h), (f.at(i, j + 1) - f.at(i, j - 1)) / (2 * h)};
        if (norm(g) >= 1e-4) grads.push_back(g);
      }
    const auto d = planarity_defect(f, center, radius);
    EXPECT_EQ(d.cells, grads.size());
    EXPECT_NEAR(d.defect, brute_defect(grads), 1e-9);
  }
}

TEST(Csv, EmittersWriteHeadersAndRows) {
  auto f = planted({-2, 2, -6, 6}, 0.5, [](Vec2 x) { return phi(x.y); });
  std::ostringstream os;
  write_graph_csv(os, 1.5, graph_profile(f, 0.5), true);
  write_ray_csv(os, 1.5, {0, 1}, ray_position(f, {0, 1}, 0.5), true);
  write_sigma_csv(os, 1.5, 0.25, false);
  write_defect_csv(os, 1.5, {0, 0}, planarity_defect(f, {0, 0}, 1.0), true);
  const std::string s = os.str();
  EXPECT_NE(s.find("t,x_prime,X,dX"), std::string::npos);
  EXPECT_NE(s.find("t,e_x,e_y,R"), std::string::npos);
  EXPECT_EQ(s.find("sup_abs_sigma2"), std::string::npos);
  EXPECT_NE(s.find("1.5,0.25\n"), std::string::npos);
  EXPECT_NE(s.find("t,center_x,center_y,defect"), std::string::npos);
}

TEST(ColumnOf, EdgeHalfCellsBelongToEdgeColumns) {
  Field f;
  f.grid = Grid::plane({0.0, 10.0, 0.0, 2.0}, 0.25);
  f.u.assign(f.grid.size(), 0.0);
  EXPECT_EQ(column_of(f, 0.0), 0u);
  EXPECT_EQ(column_of(f, 0.3), 1u);
  EXPECT_EQ(column_of(f, 10.0), f.grid.nx - 1);
  EXPECT_THROW(column_of(f, -0.01), DomainError);
  EXPECT_THROW(column_of(f, 10.01), DomainError);
}
