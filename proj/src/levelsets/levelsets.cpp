#include "rds/levelsets.hpp"

#include <algorithm>
#include <cmath>

namespace rds {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("level must lie in (0,1)");
}

// Column i as a strided view: rows of a plane, the single row otherwise.
struct Column {
  const Field& f;
  std::size_t i;
  std::size_t size() const { return f.grid.mode == GridMode::plane ? f.grid.ny : f.grid.nx; }
  double operator[](std::size_t k) const { return f.grid.mode == GridMode::plane ? f.at(i, k) : f.at(k, 0); }
  double coord(std::size_t k) const {
    return f.grid.mode == GridMode::plane ? f.grid.center(i, k).y : f.grid.center(k, 0).x;
  }
};

}  // namespace

RasterMask upper_level_set(const Field& f, double lambda) {
  check_lambda(lambda);
  RasterMask m(f.grid.origin, f.grid.h, f.grid.nx, f.grid.ny);
  for (std::size_t k = 0; k < f.u.size(); ++k) m.cells()[k] = f.u[k] > lambda ? 1 : 0;
  return m;
}

std::size_t column_of(const Field& f, double x_prime) {
  if (f.grid.mode != GridMode::plane) return 0;
  const double last = static_cast<double>(f.grid.nx - 1);
  const double r = (x_prime - f.grid.origin.x) / f.grid.h;
  // The outer half cell belongs to the edge column.
  if (r < -0.5 || r > last + 0.5) throw DomainError("x' outside the grid");
  return static_cast<std::size_t>(std::clamp(std::round(r), 0.0, last));
}

GraphPosition graph_position(const Field& f, double lambda, std::size_t column) {
  check_lambda(lambda);
  if (f.grid.mode == GridMode::plane ? column >= f.grid.nx : column != 0) throw DomainError("column out of range");
  const Column c{f, column};
  const std::size_t n = c.size();
  GraphPosition out;
  out.x_prime = f.grid.mode == GridMode::plane ? f.grid.center(column, 0).x : 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) out.violation = std::max(out.violation, c[k + 1] - c[k]);
  out.monotone = out.violation <= 1e-12;

  std::size_t top = n;
  for (std::size_t k = n; k-- > 0;)
    if (c[k] > lambda) {
      top = k;
      break;
    }
  if (top == n) {
    out.below_window = true;
    out.value = c.coord(0) - 0.5 * f.grid.h;
    return out;
  }
  if (top + 1 == n) {
    out.above_window = true;
    out.value = c.coord(n - 1) + 0.5 * f.grid.h;
    return out;
  }
  const double a = c[top], b = c[top + 1];
  out.value = c.coord(top) + f.grid.h * (a - lambda) / (a - b);
  return out;
}

std::vector<GraphGradient> grad_graph(const Field& f, double lambda, const std::vector<std::size_t>& columns) {
  if (f.grid.mode != GridMode::plane) throw DomainError("grad_graph needs a plane field");
  std::vector<GraphGradient> out;
  out.reserve(columns.size());
  for (std::size_t i : columns) {
    if (i == 0 || i + 1 >= f.grid.nx) throw DomainError("grad_graph needs interior columns");
    const auto l = graph_position(f, lambda, i - 1), r = graph_position(f, lambda, i + 1);
    GraphGradient g;
    g.x_prime = f.grid.center(i, 0).x;
    g.valid = l.valid() && r.valid();
    g.monotone = l.monotone && r.monotone;
    g.dX = (r.value - l.value) / (2.0 * f.grid.h);
    out.push_back(g);
  }
  return out;
}

RayPosition ray_position(const Field& f, Vec2 e, double lambda, RayMode mode) {
  check_lambda(lambda);
  if (f.grid.mode == GridMode::plane) {
    e = normalized(e);
  } else {
    e = {e.x >= 0.0 ? 1.0 : -1.0, 0.0};
    if (f.grid.mode == GridMode::radial && e.x < 0.0) e.x = 1.0;
  }
  const double ds = 0.25 * f.grid.h;
  auto value = [&](double r) { return f.sample(e * r); };
  RayPosition out;
  auto v0 = value(0.0);
  if (!v0) throw DomainError("ray origin lies outside the grid");
  if (*v0 <= lambda) {
    out.no_crossing = true;
    return out;
  }
  double r_prev = 0.0, v_prev = *v0;
  for (std::size_t k = 1;; ++k) {
    const double r = ds * static_cast<double>(k);
    const auto v = value(r);
    if (!v) break;
    if (*v <= lambda && v_prev > lambda) {
      out.R = r_prev + ds * (v_prev - lambda) / (v_prev - *v);
      if (mode == RayMode::first_exit) return out;
    }
    r_prev = r;
    v_prev = *v;
  }
  if (v_prev > lambda) {
    out.window_limited = true;
    out.R = r_prev;
  }
  return out;
}

std::vector<double> sigma_k_field(const Field& f, int k) {
  if (f.grid.mode != GridMode::plane) throw DomainError("sigma_k_field needs a plane field");
  if (k != 2) throw DomainError("in the plane only sigma_2 is defined");
  const std::size_t nx = f.grid.nx, ny = f.grid.ny;
  const double inv_h2 = 1.0 / (f.grid.h * f.grid.h);
  std::vector<double> out(f.u.size(), std::nan(""));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 1; jj < static_cast<std::ptrdiff_t>(ny) - 1; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double c = f.at(i, j);
      const double uxx = (f.at(i + 1, j) - 2.0 * c + f.at(i - 1, j)) * inv_h2;
      const double uyy = (f.at(i, j + 1) - 2.0 * c + f.at(i, j - 1)) * inv_h2;
      const double uxy =
          (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) * 0.25 * inv_h2;
      out[j * nx + i] = uxx * uyy - uxy * uxy;
    }
  }
  return out;
}

PlanarityDefect planarity_defect(const Field& f, Vec2 center, double radius, double g_min) {
  if (f.grid.mode != GridMode::plane) throw DomainError("planarity_defect needs a plane field");
  const Window w = f.grid.window();
  if (center.x - radius < w.xmin || center.x + radius > w.xmax || center.y - radius < w.ymin ||
      center.y + radius > w.ymax)
    throw DomainError("planarity window leaves the grid");
  const double h = f.grid.h;
  std::vector<double> angles;
  const auto i_lo = static_cast<std::size_t>(std::max(1.0, std::floor((center.x - radius - f.grid.origin.x) / h)));
  const auto j_lo = static_cast<std::size_t>(std::max(1.0, std::floor((center.y - radius - f.grid.origin.y) / h)));
  for (std::size_t j = j_lo; j + 1 < f.grid.ny; ++j) {
    if (f.grid.center(0, j).y > center.y + radius) break;
    for (std::size_t i = i_lo; i + 1 < f.grid.nx; ++i) {
      const Vec2 c = f.grid.center(i, j);
      if (c.x > center.x + radius) break;
      if (norm(c - center) > radius) continue;
      const Vec2 g{(f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h), (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h)};
      if (norm(g) >= g_min) angles.push_back(std::atan2(g.y, g.x));
    }
  }
  PlanarityDefect out;
  out.cells = angles.size();
  if (angles.empty()) {
    out.near_constant = true;
    return out;
  }
  std::sort(angles.begin(), angles.end());
  // All directions inside an arc of length < π: the spread is that arc.
  double gap = angles.front() + 2.0 * kPi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  const double spread = 2.0 * kPi - gap;
  if (spread <= kPi) {
    out.defect = spread;
    return out;
  }
  for (std::size_t a = 0; a < angles.size() && out.defect < kPi; ++a)
    for (std::size_t b = a + 1; b < angles.size(); ++b) {
      const double d = angles[b] - angles[a];
      out.defect = std::max(out.defect, std::min(d, 2.0 * kPi - d));
    }
  return out;
}

double sup_abs(const std::vector<double>& sigma) {
  double m = 0.0;
  for (double v : sigma)
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  return m;
}

std::vector<GraphSample> graph_profile(const Field& f, double lambda) {
  const std::size_t n = f.grid.mode == GridMode::plane ? f.grid.nx : 1;
  std::vector<GraphSample> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].pos = graph_position(f, lambda, i);
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (out[i - 1].pos.valid() && out[i + 1].pos.valid())
      out[i].dX = (out[i + 1].pos.value - out[i - 1].pos.value) / (2.0 * f.grid.h);
  return out;
}

void write_graph_csv(std::ostream& os, double t, const std::vector<GraphSample>& g, bool header) {
  if (header) os << "t,x_prime,X,dX,monotone,violation,above_window,below_window\n";
  for (const auto& s : g)
    os << t << ',' << s.pos.x_prime << ',' << s.pos.value << ',' << s.dX << ',' << s.pos.monotone << ','
       << s.pos.violation << ',' << s.pos.above_window << ',' << s.pos.below_window << '\n';
}

void write_ray_csv(std::ostream& os, double t, Vec2 e, const RayPosition& r, bool header) {
  if (header) os << "t,e_x,e_y,R,window_limited,no_crossing\n";
  os << t << ',' << e.x << ',' << e.y << ',' << r.R << ',' << r.window_limited << ',' << r.no_crossing << '\n';
}

void write_sigma_csv(std::ostream& os, double t, double sup_sigma2, bool header) {
  if (header) os << "t,sup_abs_sigma2\n";
  os << t << ',' << sup_sigma2 << '\n';
}

void write_defect_csv(std::ostream& os, double t, Vec2 center, const PlanarityDefect& d, bool header) {
  if (header) os << "t,center_x,center_y,defect,near_constant,cells\n";
  os << t << ',' << center.x << ',' << center.y << ',' << d.defect << ',' << d.near_constant << ',' << d.cells << '\n';
}

}  // namespace rds
