#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "rds/experiments.hpp"

namespace rds {

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit out;
  out.n = std::min(x.size(), y.size());
  if (out.n < 2) return out;
  const double n = static_cast<double>(out.n);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < out.n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < out.n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < out.n; ++k) {
    const double r = y[k] - (out.intercept + out.slope * x[k]);
    ss += r * r;
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

SpeedFit fit_speed(const std::vector<RaySample>& samples) {
  if (samples.size() < 8) throw DomainError("speed fit needs at least 8 snapshots, got " + std::to_string(samples.size()));
  auto s = samples;
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  SpeedFit out;
  out.t_to = s.back().t;
  out.t_from = 0.5 * out.t_to;
  std::vector<double> t, r;
  for (const auto& p : s) {
    if (p.t < out.t_from) continue;
    if (p.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(p.t));
    if (p.ray.no_crossing) throw Inconclusive("u <= λ at the ray origin at t = " + std::to_string(p.t));
    if (p.ray.window_limited) out.window_limited = true;
    t.push_back(p.t);
    r.push_back(p.ray.R);
  }
  out.samples = t.size();
  if (out.samples < 3) throw DomainError("fewer than 3 snapshots in [T/2, T]");
  if (out.window_limited) return out;
  const auto fit = least_squares(t, r);
  out.w_hat = fit.slope;
  out.intercept = fit.intercept;
  out.residual_rms = fit.rms;
  return out;
}

SpeedFit estimate_speed(const std::vector<Snapshot>& snaps, Vec2 e, double lambda, RayMode mode) {
  std::vector<RaySample> s;
  for (const auto& sn : snaps) s.push_back({sn.field.t, ray_position(sn.field, e, lambda, mode), sn.contaminated});
  return fit_speed(s);
}

PositionSample front_position(const Snapshot& s, double lambda, double x_prime) {
  const auto p = graph_position(s.field, lambda, column_of(s.field, x_prime));
  return {s.field.t, p.value, p.valid(), s.contaminated};
}

LagFit fit_lag(const std::vector<PositionSample>& s, double c_star, double k_pred, double fit_from) {
  LagFit out;
  out.c_star = c_star;
  out.k_pred = k_pred;
  double t_min = kInf, t_max = 0.0;
  for (const auto& p : s)
    if (p.t > 0.0) {
      t_min = std::min(t_min, p.t);
      t_max = std::max(t_max, p.t);
    }
  if (!(t_max >= 10.0 * t_min)) throw DomainError("lag fit needs samples spanning a decade in t");
  out.t_to = t_max;
  out.t_from = fit_from * t_max;
  std::vector<double> lt, lag;
  for (const auto& p : s) {
    if (p.t < out.t_from || p.t <= 0.0) continue;
    if (p.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(p.t));
    if (!p.valid) throw Inconclusive("no front crossing at t = " + std::to_string(p.t));
    lt.push_back(std::log(p.t));
    lag.push_back(c_star * p.t - p.X);
    out.samples.emplace_back(p.t, lag.back());
  }
  if (lt.size() < 3) throw DomainError("fewer than 3 samples in the lag fit window");
  const auto fit = least_squares(lt, lag);
  out.k_hat = fit.slope * c_star;
  out.intercept = fit.intercept;
  out.residual_rms = fit.rms;
  out.residual_warning = fit.rms > 0.2;
  return out;
}

LagFit lag_fit(const std::vector<Snapshot>& snaps, double lambda, double x_prime, double c_star, double k_pred) {
  std::vector<PositionSample> s;
  for (const auto& sn : snaps) s.push_back(front_position(sn, lambda, x_prime));
  auto out = fit_lag(s, c_star, k_pred);
  out.lambda = lambda;
  return out;
}

namespace {

bool cheap_distance(SupportKind k) {
  switch (k) {
    case SupportKind::empty:
    case SupportKind::half_space:
    case SupportKind::ball_union:
    case SupportKind::annuli_union:
    case SupportKind::v_shaped:
    case SupportKind::cone:
      return true;
    default:
      return false;
  }
}

RasterMask grid_mask(const Grid& g) { return RasterMask(g.origin, g.h, g.nx, g.ny); }

// First cell of a set on a face that is not a mirror, if any.
std::string touched_face(const RasterMask& m, unsigned mirror) {
  const std::size_t nx = m.nx(), ny = m.ny();
  auto any_row = [&](std::size_t j) {
    for (std::size_t i = 0; i < nx; ++i)
      if (m.at(i, j)) return true;
    return false;
  };
  auto any_col = [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j)
      if (m.at(i, j)) return true;
    return false;
  };
  if (!(mirror & face_left) && any_col(0)) return "left";
  if (!(mirror & face_right) && any_col(nx - 1)) return "right";
  if (!(mirror & face_bottom) && any_row(0)) return "bottom";
  if (!(mirror & face_top) && any_row(ny - 1)) return "top";
  return {};
}

}  // namespace

double scaled_hausdorff(const Field& f, const SupportSpec& u, const HausdorffOptions& opt) {
  if (f.grid.mode != GridMode::plane) throw DomainError("Hausdorff convergence needs a plane field");
  const double t = f.t;
  if (!(t > 0.0)) throw DomainError("Hausdorff convergence needs t > 0");
  const Grid& g = f.grid;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
  RasterMask a = upper_level_set(f, opt.lambda);
  RasterMask b = grid_mask(g);

  if (opt.mode == HausdorffMode::U_dilated) {
    // (1/t)E vs (1/t)U + B_c is t⁻¹ times E vs U + B_{ct}.
    const double r = opt.c_star * t;
    if (cheap_distance(u.kind())) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k) % g.nx, j = static_cast<std::size_t>(k) / g.nx;
        b.cells()[k] = u.distance(g.center(i, j)) < r ? 1 : 0;
      }
    } else {
      // Nearest points of U are searched inside the window only.
      const auto d = distance_transform(u.rasterize(g.origin, g.h, g.nx, g.ny));
      for (std::ptrdiff_t k = 0; k < n; ++k) b.cells()[k] = d[k] < r ? 1 : 0;
    }
    return hausdorff(a, b) / t;
  }

  const double R = opt.R * t;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k) % g.nx, j = static_cast<std::size_t>(k) / g.nx;
    const Vec2 x = g.center(i, j);
    const bool in_disc = norm(x) <= R;
    b.cells()[k] = in_disc && opt.W.contains(x / t) ? 1 : 0;
    if (!in_disc) a.cells()[k] = 0;
  }
  for (const auto* m : {&a, &b}) {
    const auto face = touched_face(*m, opt.mirror_faces);
    if (!face.empty())
      throw Inconclusive("window guard: the " + std::string(m == &a ? "level set" : "spreading set") +
                         " reaches the " + face + " face at t = " + std::to_string(t));
  }
  return hausdorff(a, b) / t;
}

Trend last_half_trend(const std::vector<std::pair<double, double>>& series) {
  Trend out;
  if (series.empty()) return out;
  const double T = series.back().first;
  std::vector<double> t, v;
  for (const auto& [ti, vi] : series)
    if (ti >= 0.5 * T && std::isfinite(vi)) {
      t.push_back(ti);
      v.push_back(vi);
    }
  out.final_value = series.back().second;
  if (v.size() < 2) return out;
  out.slope = least_squares(t, v).slope;
  out.decreasing = out.slope < 0.0;
  std::size_t down = 0;
  for (std::size_t k = 1; k < v.size(); ++k) down += v[k] <= v[k - 1];
  out.nonincreasing_fraction = static_cast<double>(down) / static_cast<double>(v.size() - 1);
  return out;
}

HausdorffSeries hausdorff_convergence(const std::vector<Snapshot>& snaps, const SupportSpec& u,
                                      const HausdorffOptions& opt) {
  HausdorffSeries out;
  for (const auto& s : snaps) {
    if (!(s.field.t > 0.0)) continue;
    if (s.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(s.field.t));
    out.points.emplace_back(s.field.t, scaled_hausdorff(s.field, u, opt));
  }
  out.trend = last_half_trend(out.points);
  return out;
}

double max_graph_slope(const Field& f, double lambda, double radius) {
  const auto prof = graph_profile(f, lambda);
  double m = kNaN;
  for (const auto& s : prof) {
    if (std::abs(s.pos.x_prime) > radius || !std::isfinite(s.dX)) continue;
    m = std::isfinite(m) ? std::max(m, std::abs(s.dX)) : std::abs(s.dX);
  }
  return m;
}

FlatteningSeries flattening_series(const std::vector<Snapshot>& snaps, const std::vector<double>& lambdas,
                                   double radius) {
  FlatteningSeries out;
  for (double l : lambdas) {
    auto& series = out.by_lambda[l];
    for (const auto& s : snaps) {
      if (s.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(s.field.t));
      series.emplace_back(s.field.t, max_graph_slope(s.field, l, radius));
    }
    out.trend[l] = last_half_trend(series);
  }
  return out;
}

Field unfold_left(const Field& f) {
  if (f.grid.mode != GridMode::plane) throw DomainError("unfold_left needs a plane field");
  if (std::abs(f.grid.origin.x - 0.5 * f.grid.h) > 1e-9 * f.grid.h)
    throw DomainError("unfold_left needs a grid whose left face is x' = 0");
  Field out = f;
  const std::size_t nx = f.grid.nx;
  out.grid.nx = 2 * nx;
  out.grid.origin.x = -(static_cast<double>(nx) - 0.5) * f.grid.h;
  out.u.assign(out.grid.size(), 0.0);
  for (std::size_t j = 0; j < f.grid.ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      out.at(nx + i, j) = f.at(i, j);
      out.at(nx - 1 - i, j) = f.at(i, j);
    }
  return out;
}

SymmetryPoint symmetry_probe(const Field& f, double lambda, double x_prime, double radius) {
  SymmetryPoint out;
  out.t = f.t;
  out.sup_sigma2 = sup_abs(sigma_k_field(f, 2));
  const auto p = graph_position(f, lambda, column_of(f, x_prime));
  if (!p.valid()) throw Inconclusive("no level-set crossing at x' = " + std::to_string(x_prime));
  out.center = {p.x_prime, p.value};
  out.defect = planarity_defect(f, out.center, radius);
  return out;
}

std::vector<SymmetryPoint> symmetry_report(const std::vector<Snapshot>& snaps, double lambda, double x_prime,
                                           double radius) {
  std::vector<SymmetryPoint> out;
  for (const auto& s : snaps) {
    if (s.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(s.field.t));
    out.push_back(symmetry_probe(s.field, lambda, x_prime, radius));
  }
  return out;
}

PlanarBaseline planar_sigma2_baseline(const ReactionTerm& f, double h, Vec2 e) {
  e = normalized(e);
  const auto front = kpp_front(f);
  const auto& z = front.z;
  const auto& phi = front.phi;
  const double dz = z[1] - z[0];
  // Centre the profile on φ = 1/2 and stay inside the table, where the
  // spline is smooth; clamping beyond it would plant kinks.
  std::size_t mid = 0;
  while (mid + 1 < phi.size() && phi[mid] > 0.5) ++mid;
  const double z0 = z[mid];
  const boost::math::interpolators::cardinal_cubic_b_spline<double> psi(phi.begin(), phi.end(), z.front(), dz);
  const double reach = std::min(z0 - z.front(), z.back() - z0) - 1.0;
  const double half = reach / std::max(std::abs(e.x) + std::abs(e.y), 1e-12);
  if (!(half > 4.0 * h)) throw DomainError("front table too short for the planted baseline");

  PlanarBaseline out;
  out.e = e;
  Field field;
  field.grid = Grid::plane({-half, half, -half, half}, h);
  field.u.resize(field.grid.size());
  for (std::size_t j = 0; j < field.grid.ny; ++j)
    for (std::size_t i = 0; i < field.grid.nx; ++i) field.at(i, j) = psi(z0 + dot(field.grid.center(i, j), e));
  out.sup_sigma2 = sup_abs(sigma_k_field(field, 2));

  // Leading stencil error of det D² on ψ(x·e): −(h²/4) e_x² e_y² ψ''ψ''''.
  const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.02 / dz)));
  const double d = dz * static_cast<double>(step);
  double sup = 0.0;
  for (std::size_t k = 2 * step; k + 2 * step < phi.size(); ++k) {
    if (std::abs(z[k] - z0) > reach) continue;
    const double p2 = (phi[k + step] - 2.0 * phi[k] + phi[k - step]) / (d * d);
    const double p4 = (phi[k + 2 * step] - 4.0 * phi[k + step] + 6.0 * phi[k] - 4.0 * phi[k - step] +
                       phi[k - 2 * step]) /
                      (d * d * d * d);
    sup = std::max(sup, std::abs(p2 * p4));
  }
  out.floor = 0.25 * h * h * e.x * e.x * e.y * e.y * sup;
  return out;
}

TerraceResult terrace_detect(const std::vector<Snapshot>& snaps, double beta, double speed_tolerance) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("β must lie in (0,1)");
  if (snaps.size() < 8) throw DomainError("terrace detection needs at least 8 snapshots");
  const double T = snaps.back().field.t;
  std::vector<double> t, lo, hi;
  for (const auto& s : snaps) {
    if (s.field.t < 0.5 * T) continue;
    if (s.contaminated) throw Inconclusive("contaminated snapshot at t = " + std::to_string(s.field.t));
    const auto a = graph_position(s.field, 0.5 * beta), b = graph_position(s.field, 0.5 * (1.0 + beta));
    if (!a.valid() || !b.valid()) throw Inconclusive("a terrace level set left the window");
    t.push_back(s.field.t);
    hi.push_back(a.value);
    lo.push_back(b.value);
  }
  TerraceResult out;
  out.c_high = least_squares(t, hi).slope;
  out.c_low = least_squares(t, lo).slope;
  // Middle third of the gap between the two level sets at T.
  const Field& f = snaps.back().field;
  const double x_lo = lo.back(), x_hi = hi.back();
  const double a = x_lo + (x_hi - x_lo) / 3.0, b = x_hi - (x_hi - x_lo) / 3.0;
  double dev = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < f.grid.nx; ++i) {
    const double x = f.grid.center(i, 0).x;
    if (x < a || x > b) continue;
    dev = std::max(dev, std::abs(f.at(i) - beta));
    ++cells;
  }
  out.plateau_deviation = cells ? dev : kNaN;
  const bool split = out.c_high - out.c_low > speed_tolerance * std::max(std::abs(out.c_high), 1e-12);
  out.terrace = split && cells > 0 && dev <= 0.05;
  out.verdict = !split ? "no terrace: the two level sets move together"
                       : (out.terrace ? "terrace: plateau at β between two fronts"
                                      : "fronts split but no flat plateau at β");
  return out;
}

}  // namespace rds
