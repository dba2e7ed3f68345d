#include <algorithm>
#include <cmath>

#include "rds/geometry.hpp"
#include "support_impl.hpp"

namespace rds {

namespace {

Vec2 rotate(Vec2 v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

bool singleton_or_empty(const SupportSpec& u) {
  return u.kind() == SupportKind::empty || u.impl().is_singleton();
}

// sup of n·d over directions d from ξ that reach U within the radius budget.
// Directions are visited in decreasing n·d, so the first hit is the sup.
double near_field_sup(const SupportSpec& u, Vec2 xi, Vec2 n, int n_angles, double budget) {
  const double step = 2.0 * kPi / n_angles;
  constexpr int kRadii = 96;
  // Below a few cells a raster only sees its own staircase.
  const double r_min = std::max(1e-7 * budget, 5.0 * u.impl().resolution());
  const double q = std::pow(r_min / budget, 1.0 / (kRadii - 1));
  for (int k = 0; k <= n_angles / 2; ++k) {
    for (int sign : {1, -1}) {
      if (k == 0 && sign < 0) continue;
      if (2 * k == n_angles && sign < 0) continue;
      const Vec2 d = rotate(n, sign * k * step);
      double r = budget;
      for (int j = 0; j < kRadii; ++j, r *= q) {
        if (u.contains(xi + d * r)) return dot(n, d);
      }
    }
  }
  return -kInf;
}

}  // namespace

OpeningValue opening(const SupportSpec& u, Vec2 x, const OpeningOptions& opt) {
  OpeningValue out;
  if (singleton_or_empty(u)) return out;
  const double d = u.distance(x);
  if (!(d > 1e-12)) throw DomainError("opening needs a point outside the closure of U");
  out.projections = u.projections(x);
  const auto arcs = u.asymptotic_arcs();
  out.lower_bound_only = !arcs.has_value();
  const double budget = opt.radius_budget > 0.0 ? opt.radius_budget : 4.0 * std::max(d, 10.0);
  for (const Vec2& xi : out.projections) {
    const Vec2 n = normalized(x - xi);
    double v = near_field_sup(u, xi, n, opt.n_angles, budget);
    if (arcs) v = std::max(v, max_dot_over_arcs(*arcs, n));
    out.value = std::max(out.value, v);
  }
  if (std::abs(out.value) < 1e-12) out.value = 0.0;
  return out;
}

std::vector<Vec2> distance_level_points(const SupportSpec& u, double R, const Window& w, int lines) {
  std::vector<std::vector<Vec2>> per_line(2 * lines);
  const int samples = 4 * lines;
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l < 2 * lines; ++l) {
    const bool horizontal = l < lines;
    const int idx = horizontal ? l : l - lines;
    const double frac = lines > 1 ? static_cast<double>(idx) / (lines - 1) : 0.5;
    auto point = [&](double s) {
      return horizontal ? Vec2{w.xmin + s * (w.xmax - w.xmin), w.ymin + frac * (w.ymax - w.ymin)}
                        : Vec2{w.xmin + frac * (w.xmax - w.xmin), w.ymin + s * (w.ymax - w.ymin)};
    };
    auto f = [&](double s) { return u.distance(point(s)) - R; };
    double s0 = 0.0, f0 = f(0.0);
    for (int k = 1; k <= samples; ++k) {
      const double s1 = static_cast<double>(k) / samples;
      const double f1 = f(s1);
      if (std::isfinite(f0) && std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0)) {
        double a = s0, b = s1, fa = f0;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = f(m);
          if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        per_line[l].push_back(point(0.5 * (a + b)));
      }
      s0 = s1;
      f0 = f1;
    }
  }
  std::vector<Vec2> out;
  for (auto& v : per_line) out.insert(out.end(), v.begin(), v.end());
  return out;
}

BallconeProfile ballcone_profile(const SupportSpec& u, const std::vector<double>& radii, double eps, int lines) {
  if (!std::is_sorted(radii.begin(), radii.end())) throw DomainError("ballcone radii must be increasing");
  BallconeProfile out;
  for (double R : radii) {
    const double half = 2.0 * R + 20.0;
    const auto pts = distance_level_points(u, R, {-half, half, -half, half}, lines);
    BallconePoint p;
    p.R = R;
    p.points = pts.size();
    OpeningOptions oo;
    oo.n_angles = 720;
    for (const Vec2& x : pts) {
      const auto o = opening(u, x, oo);
      p.sup_opening = std::max(p.sup_opening, o.value);
      p.lower_bound_only = p.lower_bound_only || o.lower_bound_only;
    }
    out.profile.push_back(p);
  }
  out.nonincreasing = true;
  for (std::size_t i = 1; i < out.profile.size(); ++i)
    out.nonincreasing = out.nonincreasing && out.profile[i].sup_opening <= out.profile[i - 1].sup_opening + 1e-6;
  out.plausible = out.nonincreasing && !out.profile.empty() && out.profile.back().sup_opening <= eps;
  return out;
}

MonotonicityDirections monotonicity_directions(const SupportSpec& u, double r_far, int n_dirs) {
  if (!(r_far >= 100.0)) throw DomainError("monotonicity_directions needs R_far >= 100");
  const double half = 1.5 * r_far + 10.0;
  const Window w = u.impl().known_window().value_or(Window{-half, half, -half, half});
  MonotonicityDirections out;
  const auto pts = distance_level_points(u, r_far, w, 81);
  for (const Vec2& x : pts)
    for (const Vec2& xi : u.projections(x)) out.projection_dirs.push_back(normalized(x - xi));
  out.empty_flag = out.projection_dirs.empty();

  out.set.dim = u.dimension();
  out.set.eps = 0.0;
  const double spacing = 2.0 * kPi / n_dirs;
  for (int k = 0; k < n_dirs; ++k) {
    DirectionSample s;
    s.angle = std::remainder(spacing * k, 2.0 * kPi);
    s.e = unit_from_angle(s.angle);
    double gap = kPi;
    for (const Vec2& d : out.projection_dirs) gap = std::min(gap, std::acos(std::clamp(dot(d, s.e), -1.0, 1.0)));
    s.margin = gap;
    s.cls = gap <= 0.5 * spacing ? DirClass::member : DirClass::nonmember;
    out.set.samples.push_back(s);
  }
  return out;
}

}  // namespace rds
