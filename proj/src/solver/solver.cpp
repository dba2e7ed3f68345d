#include "rds/solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

namespace rds {

namespace {

constexpr double kClampTol = 1e-12;

// Inline copies of the common reaction kinds; same arithmetic as ReactionTerm.
struct ZeroF {
  double operator()(double) const { return 0.0; }
};
struct LogisticF {
  double r;
  double operator()(double s) const { return r * s * (1.0 - s); }
};
struct BistableF {
  double r, a;
  double operator()(double s) const { return r * s * (1.0 - s) * (s - a); }
};
struct TristableF {
  double r, a, b, c;
  double operator()(double s) const { return -r * s * (s - a) * (s - b) * (s - c) * (s - 1.0); }
};
struct GenericF {
  const ReactionTerm* f;
  double operator()(double s) const { return (*f)(s); }
};

template <class Fn>
auto with_reaction(const ReactionTerm& f, Fn&& fn) {
  if (!f.is_restricted()) {
    switch (f.kind()) {
      case ReactionKind::zero: return fn(ZeroF{});
      case ReactionKind::kpp_logistic: return fn(LogisticF{f.param("rate")});
      case ReactionKind::bistable: return fn(BistableF{f.param("rate"), f.param("alpha")});
      case ReactionKind::tristable:
        return fn(TristableF{f.param("rate"), f.param("alpha"), f.param("beta"), f.param("gamma")});
      default: break;
    }
  }
  return fn(GenericF{&f});
}

// Shared by the reference and the banded kernels so both round identically.
template <class F>
inline double plane_update(double c, double l, double r, double d, double u, double inv_h2, double dt, const F& f) {
  return c + dt * (((l + r) + (d + u) - 4.0 * c) * inv_h2 + f(c));
}

template <class F>
inline double axis_update(double c, double l, double r, double k, double inv_h2, double dt, const F& f) {
  return c + dt * ((l + r - 2.0 * c) * inv_h2 + k * (r - l) + f(c));
}

// (N-1)/(2 h r_i) for the radial first-derivative term; 0 on a line.
std::vector<double> drift_coefficients(const Grid& g) {
  std::vector<double> k(g.nx, 0.0);
  if (g.mode != GridMode::radial) return k;
  for (std::size_t i = 0; i < g.nx; ++i) k[i] = (g.radial_dim - 1) / (2.0 * g.h * g.center(i, 0).x);
  return k;
}

// Clamps v into [0,1] and returns how far it moved. NaN passes through and is
// caught by scan_finite.
inline double clamp_unit(double& v) {
  const double moved = std::max(-v, v - 1.0);
  v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return moved;
}

void scan_finite(const std::vector<double>& u) {
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(u.size()); ++k) ok = ok && std::isfinite(u[k]);
  if (!ok) throw SchemeError("non-finite value in the field");
}

// Cells 1..nx-2 of one plane row.
template <class F>
double interior_row(const double* __restrict c, const double* __restrict dn, const double* __restrict up,
                    double* __restrict w, std::size_t nx, double inv_h2, double dt, const F& f) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    double v = plane_update(c[i], c[i - 1], c[i + 1], dn[i], up[i], inv_h2, dt, f);
    worst = std::max(worst, clamp_unit(v));
    w[i] = v;
  }
  return worst;
}

template <class F>
double step_reference(const Field& in, std::vector<double>& out, double dt, const F& f) {
  const Grid& g = in.grid;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const auto k = drift_coefficients(g);
  const auto nx = static_cast<std::ptrdiff_t>(g.nx), ny = static_cast<std::ptrdiff_t>(g.ny);
  auto val = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    // Neumann: the ghost cell mirrors the boundary cell.
    i = std::clamp<std::ptrdiff_t>(i, 0, nx - 1);
    j = std::clamp<std::ptrdiff_t>(j, 0, ny - 1);
    return in.u[j * nx + i];
  };
  double worst = 0.0;
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const double c = val(i, j);
      double v = g.mode == GridMode::plane
                     ? plane_update(c, val(i - 1, j), val(i + 1, j), val(i, j - 1), val(i, j + 1), inv_h2, dt, f)
                     : axis_update(c, val(i - 1, j), val(i + 1, j), k[i], inv_h2, dt, f);
      worst = std::max(worst, clamp_unit(v));
      out[j * nx + i] = v;
    }
  }
  return worst;
}

template <class F>
double step_banded(const Field& in, std::vector<double>& out, double dt, const F& f) {
  const Grid& g = in.grid;
  const double inv_h2 = 1.0 / (g.h * g.h);
  const std::size_t nx = g.nx, ny = g.ny;
  const double* u = in.u.data();
  double* o = out.data();
  double worst = 0.0;

  if (g.mode == GridMode::plane) {
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(ny); ++jj) {
      const std::size_t j = static_cast<std::size_t>(jj);
      const double* c = u + j * nx;
      const double* dn = j == 0 ? c : c - nx;
      const double* up = j + 1 == ny ? c : c + nx;
      double* w = o + j * nx;
      double row_worst = 0.0;
      auto edge = [&](std::size_t i, double l, double r) {
        double v = plane_update(c[i], l, r, dn[i], up[i], inv_h2, dt, f);
        row_worst = std::max(row_worst, clamp_unit(v));
        w[i] = v;
      };
      if (nx == 1) {
        edge(0, c[0], c[0]);
      } else {
        edge(0, c[0], c[1]);
        edge(nx - 1, c[nx - 2], c[nx - 1]);
        row_worst = std::max(row_worst, interior_row(c, dn, up, w, nx, inv_h2, dt, f));
      }
      worst = std::max(worst, row_worst);
    }
  } else {
    const auto k = drift_coefficients(g);
    const auto n = static_cast<std::ptrdiff_t>(nx);
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double l = u[i == 0 ? 0 : i - 1];
      const double r = u[i + 1 == n ? i : i + 1];
      double v = axis_update(u[i], l, r, k[i], inv_h2, dt, f);
      worst = std::max(worst, clamp_unit(v));
      o[i] = v;
    }
  }
  return worst;
}

std::vector<std::size_t> face_cells(const Grid& g, unsigned faces) {
  std::vector<std::size_t> out;
  const std::size_t nx = g.nx, ny = g.ny;
  auto add_col = [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j) out.push_back(j * nx + i);
  };
  auto add_row = [&](std::size_t j) {
    for (std::size_t i = 0; i < nx; ++i) out.push_back(j * nx + i);
  };
  // The centre of a radial grid is not a boundary.
  if ((faces & face_left) && g.mode != GridMode::radial) add_col(0);
  if (faces & face_right) add_col(nx - 1);
  if (g.mode == GridMode::plane) {
    if (faces & face_bottom) add_row(0);
    if (faces & face_top) add_row(ny - 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string to_string(GridMode m) {
  switch (m) {
    case GridMode::line: return "line";
    case GridMode::plane: return "plane";
    case GridMode::radial: return "radial";
  }
  return "unknown";
}

Grid Grid::line(double xmin, double xmax, double h) {
  if (!(h > 0.0) || !(xmax > xmin)) throw DomainError("line grid needs h > 0 and xmax > xmin");
  Grid g;
  g.mode = GridMode::line;
  g.h = h;
  g.nx = static_cast<std::size_t>(std::llround((xmax - xmin) / h));
  g.ny = 1;
  g.origin = {xmin + 0.5 * h, 0.0};
  return g;
}

Grid Grid::plane(const Window& w, double h) {
  if (!(h > 0.0) || !(w.xmax > w.xmin) || !(w.ymax > w.ymin)) throw DomainError("plane grid needs h > 0 and a nonempty window");
  Grid g;
  g.mode = GridMode::plane;
  g.h = h;
  g.nx = static_cast<std::size_t>(std::llround((w.xmax - w.xmin) / h));
  g.ny = static_cast<std::size_t>(std::llround((w.ymax - w.ymin) / h));
  g.origin = {w.xmin + 0.5 * h, w.ymin + 0.5 * h};
  return g;
}

Grid Grid::radial(int n, double rmax, double h) {
  if (n < 1 || n > 4) throw DomainError("radial mode supports 1 <= N <= 4");
  if (!(h > 0.0) || !(rmax > h)) throw DomainError("radial grid needs 0 < h < rmax");
  Grid g;
  g.mode = GridMode::radial;
  g.radial_dim = n;
  g.h = h;
  g.nx = static_cast<std::size_t>(std::llround(rmax / h));
  g.ny = 1;
  g.origin = {0.5 * h, 0.0};
  return g;
}

int Grid::space_dim() const {
  switch (mode) {
    case GridMode::line: return 1;
    case GridMode::plane: return 2;
    case GridMode::radial: return radial_dim;
  }
  return 0;
}

double Grid::dim_factor() const {
  switch (mode) {
    case GridMode::line: return 1.0;
    case GridMode::plane: return 2.0;
    // The mirrored centre cell carries weight N/h² on its neighbour.
    case GridMode::radial: return std::max(1.0, radial_dim / 2.0);
  }
  return 1.0;
}

Window Grid::window() const {
  const double yl = ny == 1 ? origin.y : origin.y - 0.5 * h;
  const double yh = ny == 1 ? origin.y : origin.y + h * (ny - 0.5);
  return {origin.x - 0.5 * h, origin.x + h * (nx - 0.5), yl, yh};
}

bool Grid::operator==(const Grid& o) const {
  return mode == o.mode && radial_dim == o.radial_dim && origin == o.origin && h == o.h && nx == o.nx && ny == o.ny;
}

double cfl_bound(const Grid& g, double sigma) { return sigma * g.h * g.h / (2.0 * g.dim_factor()); }

std::optional<double> Field::sample(Vec2 x) const {
  // Up to half a cell past the last centre the Neumann ghost repeats the edge.
  const double last_x = static_cast<double>(grid.nx - 1);
  const double rx = (x.x - grid.origin.x) / grid.h;
  if (rx < -0.5 || rx > last_x + 0.5) return std::nullopt;
  const double fx = std::clamp(rx, 0.0, last_x);
  const auto i0 = std::min(static_cast<std::size_t>(fx), grid.nx > 1 ? grid.nx - 2 : 0);
  const double ax = grid.nx > 1 ? fx - static_cast<double>(i0) : 0.0;
  auto row = [&](std::size_t j) {
    return grid.nx > 1 ? (1.0 - ax) * at(i0, j) + ax * at(i0 + 1, j) : at(0, j);
  };
  if (grid.ny == 1) return row(0);
  const double last_y = static_cast<double>(grid.ny - 1);
  const double ry = (x.y - grid.origin.y) / grid.h;
  if (ry < -0.5 || ry > last_y + 0.5) return std::nullopt;
  const double fy = std::clamp(ry, 0.0, last_y);
  const auto j0 = std::min(static_cast<std::size_t>(fy), grid.ny - 2);
  const double ay = fy - static_cast<double>(j0);
  return (1.0 - ay) * row(j0) + ay * row(j0 + 1);
}

Field rasterize_initial(const SupportSpec& s, const Grid& g, const ReactionTerm& f, std::vector<std::string>* warnings) {
  if (g.nx == 0 || g.ny == 0) throw DomainError("empty grid");
  if (g.mode != GridMode::plane && g.ny != 1) throw DomainError("line and radial grids have one row");
  if (g.mode == GridMode::radial && std::abs(g.origin.x - 0.5 * g.h) > 1e-12 * g.h)
    throw DomainError("radial grids start at r = h/2");
  Field out;
  out.grid = g;
  out.reaction = f;
  out.u.assign(g.size(), 0.0);
  std::size_t occupied = 0;
#pragma omp parallel for schedule(static) reduction(+ : occupied)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(g.ny); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const bool in = s.contains(g.center(i, j));
      out.u[j * g.nx + i] = in ? 1.0 : 0.0;
      occupied += in;
    }
  }
  if (!warnings) return out;
  if (occupied == 0) warnings->push_back("U does not meet the grid window");
  if (occupied == g.size()) warnings->push_back("U covers the whole grid window");
  // U crossing a cell that neither it nor any neighbour rasterizes. Checked on
  // at most ~4096 cells because distances to subgraphs are numeric.
  const double reach = g.mode == GridMode::plane ? 0.5 * std::sqrt(2.0) * g.h : 0.5 * g.h;
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(g.size() / 4096.0)));
  auto occ = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
    return i >= 0 && j >= 0 && i < static_cast<std::ptrdiff_t>(g.nx) && j < static_cast<std::ptrdiff_t>(g.ny) &&
           out.u[j * g.nx + i] > 0.0;
  };
  std::size_t missed = 0;
  for (std::size_t j = 0; j < g.ny; j += (g.ny > 1 ? stride : 1))
    for (std::size_t i = 0; i < g.nx; i += stride) {
      const auto a = static_cast<std::ptrdiff_t>(i), b = static_cast<std::ptrdiff_t>(j);
      if (occ(a, b) || occ(a - 1, b) || occ(a + 1, b) || occ(a, b - 1) || occ(a, b + 1)) continue;
      missed += s.distance(g.center(i, j)) < reach;
    }
  if (missed > 0)
    warnings->push_back("U has features thinner than the grid spacing (" + std::to_string(missed) +
                        " sampled cells crossed by U but not rasterized)");
  return out;
}

namespace {

double advance(Field& field, double dt, Exec exec, std::vector<double>& scratch) {
  const double limit = cfl_bound(field.grid, 1.0);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw SchemeError("dt = " + std::to_string(dt) + " breaks the CFL bound h^2/(2 dim_factor) = " + std::to_string(limit));
  scratch.resize(field.u.size());
  const double worst = with_reaction(field.reaction, [&](const auto& f) {
    return exec == Exec::serial ? step_reference(field, scratch, dt, f) : step_banded(field, scratch, dt, f);
  });
  if (worst > kClampTol) throw SchemeError("range clamp moved a value by " + std::to_string(worst));
  field.u.swap(scratch);
  field.t += dt;
  return worst;
}

}  // namespace

double step(Field& field, double dt, Exec exec) {
  std::vector<double> scratch;
  const double worst = advance(field, dt, exec, scratch);
  scan_finite(field.u);
  return worst;
}

double resolve_dt(const RunConfig& cfg) {
  const double bound = cfl_bound(cfg.grid, cfg.sigma_cfl);
  const double dt = cfg.dt > 0.0 ? cfg.dt : bound;
  if (dt > bound * (1.0 + 1e-12))
    throw SchemeError("dt = " + std::to_string(dt) + " exceeds the CFL bound sigma h^2/(2 dim_factor) = " +
                      std::to_string(bound));
  // Monotonicity also needs the reaction's negative slope absorbed by the diagonal.
  const double diag = 1.0 - 2.0 * cfg.grid.dim_factor() * dt / (cfg.grid.h * cfg.grid.h) +
                      dt * std::min(0.0, cfg.reaction.min_derivative());
  if (diag < 0.0) throw SchemeError("dt too large for a monotone scheme with this reaction");
  return dt;
}

RunResult run(const RunConfig& cfg, const std::function<void(const Snapshot&)>& observer, bool keep) {
  Field f = rasterize_initial(cfg.support, cfg.grid, cfg.reaction);
  f.provenance = cfg.provenance;
  return run_from(std::move(f), cfg, observer, keep);
}

RunResult run_from(Field f, const RunConfig& cfg, const std::function<void(const Snapshot&)>& observer, bool keep) {
  if (!(f.grid == cfg.grid)) throw DomainError("initial field is not on the configured grid");
  if (!(cfg.t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
  RunResult res;
  res.dt = resolve_dt(cfg);
  f.reaction = cfg.reaction;
  if (f.provenance.empty()) f.provenance = cfg.provenance;

  const auto faces = face_cells(cfg.grid, cfg.sentinel_faces);
  std::vector<double> face0(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) face0[k] = f.u[faces[k]];

  const auto n_final = static_cast<std::size_t>(std::llround(cfg.t_final / res.dt));
  std::vector<std::size_t> marks;
  for (double t : cfg.snapshot_times) {
    if (t < 0.0) throw DomainError("snapshot times must be nonnegative");
    marks.push_back(std::min(n_final, static_cast<std::size_t>(std::llround(t / res.dt))));
  }
  marks.push_back(n_final);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const double t0 = f.t;
  auto emit = [&](std::size_t n) {
    scan_finite(f.u);
    f.t = t0 + static_cast<double>(n) * res.dt;
    Snapshot s;
    for (std::size_t k = 0; k < faces.size(); ++k)
      s.boundary_deviation = std::max(s.boundary_deviation, std::abs(f.u[faces[k]] - face0[k]));
    s.contaminated = s.boundary_deviation > cfg.eps_b;
    res.contaminated = res.contaminated || s.contaminated;
    s.field = f;
    if (observer) observer(s);
    if (keep) res.snapshots.push_back(std::move(s));
  };

  std::vector<double> scratch;
  std::size_t next = 0;
  for (std::size_t n = 0;; ++n) {
    if (next < marks.size() && marks[next] == n) {
      emit(n);
      ++next;
    }
    if (n == n_final) break;
    res.max_clamp = std::max(res.max_clamp, advance(f, res.dt, cfg.exec, scratch));
    ++res.steps;
  }
  f.t = t0 + static_cast<double>(n_final) * res.dt;
  return res;
}

bool comparison_check(const Field& a0, const Field& b0, const RunConfig& cfg) {
  if (!(a0.grid == b0.grid) || !(a0.grid == cfg.grid)) throw DomainError("comparison_check needs one shared grid");
  Field a = a0, b = b0;
  a.reaction = b.reaction = cfg.reaction;
  const double dt = resolve_dt(cfg);
  const auto n_final = static_cast<std::size_t>(std::llround(cfg.t_final / dt));
  auto ordered = [&] {
    for (std::size_t k = 0; k < a.u.size(); ++k)
      if (a.u[k] > b.u[k] + 1e-10) return false;
    return true;
  };
  if (!ordered()) return false;
  std::vector<double> sa, sb;
  for (std::size_t n = 0; n < n_final; ++n) {
    advance(a, dt, cfg.exec, sa);
    advance(b, dt, cfg.exec, sb);
    if (!ordered()) return false;
  }
  return true;
}

bool comparison_check(const RunConfig& a, const RunConfig& b) {
  if (!(a.grid == b.grid) || resolve_dt(a) != resolve_dt(b) || a.reaction.describe() != b.reaction.describe())
    throw DomainError("comparison_check needs one grid, dt and reaction");
  return comparison_check(rasterize_initial(a.support, a.grid, a.reaction),
                          rasterize_initial(b.support, b.grid, b.reaction), a);
}

double discrete_kpp_speed(double a, double h, double dt) {
  if (!(a > 0.0) || !(h > 0.0) || !(dt > 0.0)) throw DomainError("discrete_kpp_speed needs positive f'(0), h, dt");
  auto c = [&](double lam) {
    const double g = 1.0 + dt * (a + (2.0 * std::cosh(lam * h) - 2.0) / (h * h));
    return std::log(g) / (dt * lam);
  };
  const double s = std::sqrt(a);
  const auto r = boost::math::tools::brent_find_minima(c, 1e-3 * s, std::min(20.0 * s, 30.0 / h), 50);
  return r.second;
}

}  // namespace rds
