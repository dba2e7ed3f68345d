#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "rds/solver.hpp"

using namespace rds;

namespace {

// Exact heat solution started from a Gaussian of variance 2 t0 per axis.
double heat(double r2, double t0, double t, int n) {
  return std::pow(t0 / (t0 + t), n / 2.0) * std::exp(-r2 / (4.0 * (t0 + t)));
}

Field gaussian_field(const Grid& g, double t0) {
  Field f;
  f.grid = g;
  f.u.resize(g.size());
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Vec2 c = g.center(i, j);
      f.at(i, j) = heat(dot(c, c), t0, 0.0, g.space_dim());
    }
  return f;
}

double heat_error(const Grid& g, double t0, double t, double dt) {
  RunConfig cfg;
  cfg.grid = g;
  cfg.reaction = ReactionTerm::zero();
  cfg.dt = dt;
  cfg.t_final = t;
  const auto res = run_from(gaussian_field(g, t0), cfg);
  const Field& u = res.snapshots.back().field;
  double err = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Vec2 c = g.center(i, j);
      err = std::max(err, std::abs(u.at(i, j) - heat(dot(c, c), t0, u.t, g.space_dim())));
    }
  return err / heat(0.0, t0, u.t, g.space_dim());
}

// Largest dt <= the CFL bound that divides t exactly.
double fitting_dt(const Grid& g, double t) { return t / std::ceil(t / cfl_bound(g)); }

}  // namespace

TEST(Grid, CellCentredLayout) {
  const auto g = Grid::plane({-2.0, 2.0, 0.0, 1.0}, 0.5);
  EXPECT_EQ(g.nx, 8u);
  EXPECT_EQ(g.ny, 2u);
  EXPECT_DOUBLE_EQ(g.center(0, 0).x, -1.75);
  const auto r = Grid::radial(3, 10.0, 0.1);
  EXPECT_DOUBLE_EQ(r.center(0, 0).x, 0.05);
  EXPECT_DOUBLE_EQ(r.dim_factor(), 1.5);
  EXPECT_DOUBLE_EQ(cfl_bound(Grid::line(0.0, 1.0, 0.1)), 0.9 * 0.01 / 2.0);
}

TEST(Rasterize, HalfSpaceFillsLowerHalf) {
  const auto g = Grid::plane({-5.0, 5.0, -5.0, 5.0}, 0.5);
  const auto f = rasterize_initial(SupportSpec::half_space({0.0, 1.0}, 0.0), g, ReactionTerm::zero());
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) EXPECT_EQ(f.at(i, j), j < g.ny / 2 ? 1.0 : 0.0);
}

TEST(Rasterize, SmallBallArea) {
  const double h = 0.01;
  const auto g = Grid::plane({-10.5 * h, 10.5 * h, -10.5 * h, 10.5 * h}, h);
  const auto f = rasterize_initial(SupportSpec::ball({0.0, 0.0}, 3.0 * h), g, ReactionTerm::zero());
  double cells = 0.0;
  for (double v : f.u) cells += v;
  EXPECT_NEAR(cells / (kPi * 9.0), 1.0, 0.1);
}

TEST(Rasterize, Warnings) {
  std::vector<std::string> w;
  rasterize_initial(SupportSpec::gaussian_tube(1.0, 1.0), Grid::plane({-20.0, 20.0, -5.0, 5.0}, 1.0),
                    ReactionTerm::zero(), &w);
  ASSERT_FALSE(w.empty());
  EXPECT_NE(w.front().find("thinner"), std::string::npos);
  w.clear();
  rasterize_initial(SupportSpec::ball({100.0, 0.0}, 1.0), Grid::line(-5.0, 5.0, 0.5), ReactionTerm::zero(), &w);
  ASSERT_EQ(w.size(), 1u);
}

TEST(Step, EquilibriaStayPut) {
  for (double c : {0.0, 1.0}) {
    Field f;
    f.grid = Grid::plane({0.0, 4.0, 0.0, 3.0}, 0.1);
    f.reaction = ReactionTerm::bistable(0.3);
    f.u.assign(f.grid.size(), c);
    for (int k = 0; k < 10; ++k) step(f, cfl_bound(f.grid));
    for (double v : f.u) EXPECT_EQ(v, c);
  }
}

TEST(Step, RejectsCflViolation) {
  Field f;
  f.grid = Grid::line(0.0, 1.0, 0.1);
  f.u.assign(f.grid.size(), 0.5);
  EXPECT_THROW(step(f, 0.0051), SchemeError);
  EXPECT_NO_THROW(step(f, 0.005));
}

TEST(Step, SerialAndBandedAgreeBitForBit) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const Grid& g : {Grid::plane({0.0, 7.3, 0.0, 4.1}, 0.1), Grid::line(-3.0, 3.0, 0.05), Grid::radial(3, 5.0, 0.05)}) {
    Field a;
    a.grid = g;
    a.reaction = ReactionTerm::kpp_logistic();
    a.u.resize(g.size());
    for (double& v : a.u) v = U(rng);
    Field b = a;
    for (int k = 0; k < 25; ++k) {
      step(a, cfl_bound(g), Exec::serial);
      step(b, cfl_bound(g), Exec::parallel);
    }
    EXPECT_EQ(a.u, b.u) << to_string(g.mode);
  }
}

TEST(Step, HeatKernelPlane) {
  const auto g = Grid::plane({-10.0, 10.0, -10.0, 10.0}, 0.05);
  EXPECT_LE(heat_error(g, 0.25, 1.0, fitting_dt(g, 1.0)), 0.02);
}

TEST(Step, HeatKernelRadial) {
  for (int n : {2, 3}) {
    const auto g = Grid::radial(n, 12.0, 0.05);
    EXPECT_LE(heat_error(g, 0.25, 1.0, fitting_dt(g, 1.0)), 0.02) << n;
  }
}

TEST(Step, SecondOrderInSpace) {
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto g = Grid::line(-12.0, 12.0, h);
    const double e = heat_error(g, 0.5, 1.0, fitting_dt(g, 1.0));
    if (prev > 0.0) EXPECT_GE(prev / e, 3.5) << h;
    prev = e;
  }
}

TEST(Step, MonotoneInVerticalDirection) {
  const auto g = Grid::plane({-10.0, 10.0, -10.0, 10.0}, 0.2);
  Field f = rasterize_initial(SupportSpec::subgraph(GraphTag::bounded_wave, {{"amplitude", 3.0}}), g,
                              ReactionTerm::kpp_logistic());
  for (int k = 0; k < 200; ++k) step(f, cfl_bound(g));
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 1; j < g.ny; ++j) EXPECT_LE(f.at(i, j), f.at(i, j - 1)) << i << "," << j;
}

TEST(Step, TranslationEquivariance) {
  const auto g = Grid::plane({0.0, 20.0, 0.0, 20.0}, 0.2);
  const auto a0 = rasterize_initial(SupportSpec::ball({9.0, 9.0}, 2.0), g, ReactionTerm::kpp_logistic());
  const auto b0 = rasterize_initial(SupportSpec::ball({9.6, 8.4}, 2.0), g, ReactionTerm::kpp_logistic());
  Field a = a0, b = b0;
  for (int k = 0; k < 20; ++k) {
    step(a, cfl_bound(g), Exec::serial);
    step(b, cfl_bound(g), Exec::serial);
  }
  for (std::size_t j = 3; j < g.ny; ++j)
    for (std::size_t i = 0; i + 3 < g.nx; ++i) ASSERT_EQ(a.at(i, j), b.at(i + 3, j - 3));
}

TEST(Run, SnapshotsOnNearestStep) {
  RunConfig cfg;
  cfg.grid = Grid::line(-5.0, 5.0, 0.1);
  cfg.dt = 0.004;
  cfg.t_final = 0.1;
  cfg.snapshot_times = {0.0, 0.021, 0.05};
  const auto res = run(cfg);
  ASSERT_EQ(res.snapshots.size(), 4u);
  EXPECT_EQ(res.snapshots[1].field.t, 5 * 0.004);
  EXPECT_EQ(res.snapshots.back().field.t, 25 * 0.004);
  EXPECT_EQ(res.steps, 25u);
}

TEST(Run, ContaminationSentinel) {
  RunConfig cfg;
  cfg.support = SupportSpec::ball({0.0, 0.0}, 1.0, 1);
  cfg.grid = Grid::line(-300.0, 300.0, 0.1);
  cfg.t_final = 100.0;
  cfg.snapshot_times = {25.0, 50.0, 75.0};
  const auto clean = run(cfg, {}, false);
  EXPECT_FALSE(clean.contaminated);
  cfg.grid = Grid::line(-150.0, 150.0, 0.1);
  std::vector<bool> flags;
  const auto dirty = run(cfg, [&](const Snapshot& s) { flags.push_back(s.contaminated); }, false);
  EXPECT_TRUE(dirty.contaminated);
  EXPECT_FALSE(flags.front());
  EXPECT_TRUE(flags.back());
}

TEST(Run, MassConservedWithoutReaction) {
  RunConfig cfg;
  cfg.support = SupportSpec::ball({1.0, -2.0}, 3.0);
  cfg.reaction = ReactionTerm::zero();
  cfg.grid = Grid::plane({-8.0, 8.0, -8.0, 8.0}, 0.2);
  cfg.t_final = 40.0;
  cfg.snapshot_times = {0.0};
  const auto res = run(cfg);
  ASSERT_EQ(res.snapshots.size(), 2u);
  auto mass = [](const Field& f) {
    double m = 0.0;
    for (double v : f.u) m += v;
    return m;
  };
  const double m0 = mass(res.snapshots.front().field), m1 = mass(res.snapshots.back().field);
  EXPECT_NEAR(m1 / m0, 1.0, 1e-8);
  EXPECT_TRUE(res.contaminated);
}

TEST(Run, RadialAgreesWithPlane) {
  const double h = 0.1, t = 10.0;
  RunConfig plane;
  plane.support = SupportSpec::ball({0.0, 0.0}, 5.0);
  plane.grid = Grid::plane({0.0, 40.0, 0.0, 40.0}, h);
  plane.t_final = t;
  plane.dt = fitting_dt(plane.grid, t);
  RunConfig radial = plane;
  radial.grid = Grid::radial(2, 60.0, h);
  const auto a = run(plane).snapshots.back().field;
  const auto b = run(radial).snapshots.back().field;
  double err = 0.0;
  for (std::size_t j = 0; j < a.grid.ny; ++j)
    for (std::size_t i = 0; i < a.grid.nx; ++i) {
      const double r = norm(a.grid.center(i, j));
      if (r > 38.0) continue;
      err = std::max(err, std::abs(a.at(i, j) - b.sample({r, 0.0}).value()));
    }
  EXPECT_LE(err, 0.01);
}

TEST(Comparison, IdenticalAndNestedBalls) {
  RunConfig a;
  a.grid = Grid::plane({-10.0, 10.0, -10.0, 10.0}, 0.25);
  a.reaction = ReactionTerm::bistable(0.3);
  a.t_final = 5.0;
  a.support = SupportSpec::ball({0.0, 0.0}, 2.0);
  RunConfig b = a;
  EXPECT_TRUE(comparison_check(a, b));
  b.support = SupportSpec::ball({0.5, 0.0}, 4.0);
  EXPECT_TRUE(comparison_check(a, b));
  EXPECT_FALSE(comparison_check(b, a));
}

TEST(Comparison, RandomOrderedMasks) {
  std::mt19937 rng(2024);
  RunConfig cfg;
  cfg.grid = Grid::plane({0.0, 12.0, 0.0, 12.0}, 0.25);
  cfg.t_final = 1.5;
  for (int trial = 0; trial < 10; ++trial) {
    cfg.reaction = trial % 2 ? ReactionTerm::bistable(0.2 + 0.05 * trial) : ReactionTerm::kpp_logistic(1.0 + 0.2 * trial);
    Field a;
    a.grid = cfg.grid;
    a.u.resize(cfg.grid.size());
    std::bernoulli_distribution pa(0.3), pb(0.3);
    for (double& v : a.u) v = pa(rng) ? 1.0 : 0.0;
    Field b = a;
    for (double& v : b.u) v = std::max(v, pb(rng) ? 1.0 : 0.0);
    EXPECT_TRUE(comparison_check(a, b, cfg)) << trial;
  }
}

TEST(DiscreteKpp, ConvergesToContinuumSpeed) {
  auto brute = [](double a, double h, double dt) {
    double best = kInf;
    for (double lam = 0.01; lam < 10.0; lam += 1e-4)
      best = std::min(best, std::log(1.0 + dt * (a + (2.0 * std::cosh(lam * h) - 2.0) / (h * h))) / (dt * lam));
    return best;
  };
  double prev = kInf;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const double dt = 0.45 * h * h;
    const double c = discrete_kpp_speed(1.0, h, dt);
    EXPECT_NEAR(c, brute(1.0, h, dt), 1e-6);
    EXPECT_LT(std::abs(c - 2.0), std::abs(prev - 2.0));
    prev = c;
  }
  EXPECT_NEAR(discrete_kpp_speed(4.0, 0.01, 0.45e-4), 4.0, 1e-3);
}

class SnapshotFile : public ::testing::Test {
 protected:
  std::string path = ::testing::TempDir() + "rds_snapshot.bin";
  void TearDown() override { std::remove(path.c_str()); }
  std::string bytes() {
    std::ifstream is(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  }
  void put(const std::string& s) { std::ofstream(path, std::ios::binary | std::ios::trunc) << s; }
};

TEST_F(SnapshotFile, RoundTripIsBitExact) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const Grid& g : {Grid::plane({-1.0, 2.0, 0.5, 1.7}, 0.1), Grid::radial(3, 4.0, 0.2), Grid::line(0.0, 1.0, 0.3)}) {
    Field f;
    f.grid = g;
    f.t = 1.0 / 3.0;
    f.u.resize(g.size());
    for (double& v : f.u) v = U(rng);
    write_snapshot(f, path);
    const Field r = read_snapshot(path);
    EXPECT_TRUE(r.grid == g);
    EXPECT_EQ(r.t, f.t);
    EXPECT_EQ(r.u, f.u);
  }
}

TEST_F(SnapshotFile, TruncationAndForeignFiles) {
  Field f;
  f.grid = Grid::plane({0.0, 1.0, 0.0, 1.0}, 0.25);
  f.u.assign(f.grid.size(), 0.5);
  write_snapshot(f, path);
  const std::string good = bytes();
  EXPECT_EQ(good.substr(0, 6), "RDFLD1");

  put(good.substr(0, good.size() - 5));
  EXPECT_THROW(read_snapshot(path), TruncationError);
  put(good.substr(0, 10));
  EXPECT_THROW(read_snapshot(path), TruncationError);

  put("RDFLD2" + good.substr(6));
  try {
    read_snapshot(path);
    FAIL();
  } catch (const TruncationError&) {
    FAIL();
  } catch (const FormatError&) {
  }

  // Same file written big-endian.
  std::string swapped = good.substr(0, 8);
  for (std::size_t p = 8; p < good.size(); p += 8) {
    std::string w = good.substr(p, 8);
    std::reverse(w.begin(), w.end());
    swapped += w;
  }
  put(swapped);
  try {
    read_snapshot(path);
    FAIL();
  } catch (const TruncationError&) {
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("byte order"), std::string::npos);
  }
}
