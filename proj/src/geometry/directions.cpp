#include <algorithm>
#include <cmath>

#include "rds/geometry.hpp"

namespace rds {

namespace {

double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

std::vector<double> sample_angles(int dim, int n_dirs) {
  if (dim == 1) return {0.0, kPi};
  std::vector<double> a(n_dirs);
  for (int k = 0; k < n_dirs; ++k) a[k] = std::remainder(2.0 * kPi * k / n_dirs, 2.0 * kPi);
  return a;
}

double ratio(const SupportSpec& u, Vec2 e, double tau) {
  const double d = u.distance(e * tau);
  return std::isfinite(d) ? std::min(1.0, d / tau) : 1.0;
}

}  // namespace

std::string to_string(DirClass c) {
  switch (c) {
    case DirClass::bounded: return "bounded";
    case DirClass::unbounded: return "unbounded";
    case DirClass::uncertain: return "uncertain";
    case DirClass::member: return "member";
    case DirClass::nonmember: return "nonmember";
  }
  return "unknown";
}

std::vector<Vec2> DirectionSet::unbounded() const {
  std::vector<Vec2> out;
  for (const auto& s : samples)
    if (s.cls == DirClass::unbounded) out.push_back(s.e);
  return out;
}

double DirectionSet::spacing() const {
  return dim == 1 || samples.empty() ? kPi : 2.0 * kPi / static_cast<double>(samples.size());
}

std::vector<Arc> DirectionSet::unbounded_arcs() const {
  const std::size_t n = samples.size();
  std::vector<Arc> arcs;
  if (n == 0) return arcs;
  if (dim == 1) {
    for (const auto& s : samples)
      if (s.cls == DirClass::unbounded) arcs.push_back(Arc{s.angle, 0.0});
    return arcs;
  }
  std::size_t in = 0;
  for (const auto& s : samples) in += s.cls == DirClass::unbounded;
  if (in == n) return {Arc{-kPi, 2.0 * kPi}};
  if (in == 0) return arcs;
  // Start right after a bounded/uncertain sample so no run wraps.
  std::size_t start = 0;
  while (samples[start].cls == DirClass::unbounded) ++start;
  const double step = spacing();
  std::size_t k = 0;
  while (k < n) {
    const std::size_t idx = (start + k) % n;
    if (samples[idx].cls != DirClass::unbounded) {
      ++k;
      continue;
    }
    std::size_t run = 0;
    while (k + run < n && samples[(start + k + run) % n].cls == DirClass::unbounded) ++run;
    arcs.push_back(Arc{samples[idx].angle, step * static_cast<double>(run - 1)});
    k += run;
  }
  return arcs;
}

DirectionSet direction_sets(const SupportSpec& u, const DirectionOptions& opt) {
  if (!(opt.tau_max >= 100.0)) throw DomainError("direction_sets needs tau_max >= 100");
  if (u.dimension() == 2 && opt.n_dirs < 64) throw DomainError("direction_sets needs n_dirs >= 64 in the plane");
  std::vector<double> ladder;
  for (double t = 10.0; t <= opt.tau_max * (1.0 + 1e-12); t *= 2.0) ladder.push_back(t);

  DirectionSet out;
  out.dim = u.dimension();
  out.eps = opt.eps;
  const auto angles = sample_angles(out.dim, opt.n_dirs);
  out.samples.resize(angles.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(angles.size()); ++k) {
    DirectionSample s;
    s.angle = angles[k];
    s.e = unit_from_angle(angles[k]);
    if (out.dim == 1) s.e.y = 0.0;
    const double top = ratio(u, s.e, ladder.back());
    const double prev = ratio(u, s.e, ladder[ladder.size() - 2]);
    s.margin = std::clamp(2.0 * top - prev, 0.0, 1.0);
    s.stable = std::abs(top - prev) <= 0.1 * std::max(top, prev) || std::max(top, prev) <= opt.eps;
    // Dense look at the top octave: liminf and limsup of an oscillating
    // ratio alias on the ratio-2 ladder.
    s.liminf = s.limsup = top;
    for (int j = 1; j < opt.octave_samples; ++j) {
      const double tau = opt.tau_max * std::exp2(-static_cast<double>(j) / opt.octave_samples);
      const double r = ratio(u, s.e, tau);
      s.liminf = std::min(s.liminf, r);
      s.limsup = std::max(s.limsup, r);
    }
    if (s.limsup <= opt.eps && s.margin <= opt.eps) {
      s.cls = DirClass::unbounded;
    } else if (s.stable && s.liminf >= 2.0 * opt.eps && s.margin >= 2.0 * opt.eps) {
      s.cls = DirClass::bounded;
    } else {
      s.cls = DirClass::uncertain;
    }
    out.samples[k] = s;
  }
  return out;
}

RhoInterior rho_interior(const SupportSpec& u, double rho, double window_half, double h) {
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  RhoInterior out{u.eroded(rho), false, 0.0, false, {}};
  // Exact cases.
  if (u.kind() == SupportKind::half_space) {
    out.exact = true;
    out.hausdorff_estimate = rho;
    out.notes = "inward offset of a half-space";
    return out;
  }

  const int dim = u.dimension();
  const std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * window_half / h)) + 1;
  const Vec2 origin{-window_half, dim == 1 ? 0.0 : -window_half};
  const std::size_t ny = dim == 1 ? 1 : n;
  const RasterMask inner = out.set.rasterize(origin, h, n, ny);
  if (inner.empty()) {
    out.set = SupportSpec::empty(dim);
    out.empty = true;
    out.hausdorff_estimate = kInf;
    out.notes = "no point of the sampled window lies at depth >= rho";
    return out;
  }
  // Occupied cells away from the window edge: treat U_ρ as bounded and use the
  // raster itself, whose far-field distance is reliable.
  bool touches_edge = false;
  for (std::size_t j = 0; j < ny && !touches_edge; ++j)
    for (std::size_t i = 0; i < n && !touches_edge; ++i)
      if (inner.at(i, j) && (i < 2 || i + 2 >= n || (dim == 2 && (j < 2 || j + 2 >= ny)))) touches_edge = true;
  if (!touches_edge && u.kind() != SupportKind::ball_union) {
    out.set = SupportSpec::mask(inner);
    out.notes = "bounded rho-interior, represented by its raster";
  }
  const RasterMask outer = u.rasterize(origin, h, n, ny);
  const double m = 0.25 * window_half;
  const Window clip{-window_half + m, window_half - m, dim == 1 ? 0.0 : -window_half + m,
                    dim == 1 ? 0.0 : window_half - m};
  // Only U is clipped: its nearest points of U_ρ may lie outside the clip.
  const auto d = distance_transform(inner);
  out.hausdorff_estimate = 0.0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (outer.at(i, j) && clip.contains(outer.center(i, j)))
        out.hausdorff_estimate = std::max(out.hausdorff_estimate, d[j * n + i]);
  if (out.notes.empty()) out.notes = "window estimate";
  return out;
}

HypothesisUCheck check_hypothesis_U(const SupportSpec& u, double rho, const DirectionOptions& opt) {
  const auto du = direction_sets(u, opt);
  const auto dr = direction_sets(rho_interior(u, rho).set, opt);
  HypothesisUCheck out;
  out.holds = true;
  for (std::size_t k = 0; k < du.samples.size(); ++k) {
    const auto& a = du.samples[k];
    const auto& b = dr.samples[k];
    if (a.cls == DirClass::bounded || b.cls == DirClass::unbounded) continue;
    // Stable margins in the (ε, 2ε) band that U and U_ρ reproduce: positive
    // limit below the classification resolution.
    const bool gap_band = a.stable && b.stable && a.liminf > opt.eps && a.limsup - a.liminf <= opt.eps / 2.0 &&
                          std::abs(a.margin - b.margin) <= opt.eps / 2.0;
    if (gap_band) {
      ++out.resolution_limited;
      continue;
    }
    out.holds = false;
    out.missing_dirs.push_back(a.e);
    out.uncertain = out.uncertain || a.cls == DirClass::uncertain || b.cls == DirClass::uncertain;
  }
  return out;
}

SpeedPrediction predicted_speed(Vec2 e, const DirectionSet& dirs, double c_star) {
  if (!(c_star > 0.0)) throw DomainError("c* must be positive");
  e = normalized(e);
  SpeedPrediction out;

  // Variational form over the sampled directions.
  bool any = false;
  double sup = c_star;
  for (const Vec2& xi : dirs.unbounded()) {
    const double c = dot(xi, e);
    if (c < -1e-12) continue;
    any = true;
    if (c >= 1.0 - 1e-12) {
      sup = kInf;
      break;
    }
    sup = std::max(sup, c_star / std::sqrt(1.0 - c * c));
  }
  out.sup_formula = any ? sup : c_star;

  // Geometric form over the arcs: c*/dist(e, ℝ⁺𝒰), with 0 ∈ ℝ⁺𝒰.
  double dist = 1.0;
  const double ae = angle_of(e);
  for (const Arc& a : dirs.unbounded_arcs()) {
    if (a.contains(ae, 1e-12)) {
      dist = 0.0;
      break;
    }
    for (double end : {a.lo, a.hi()}) {
      const Vec2 u = unit_from_angle(end);
      if (dot(u, e) >= 0.0) dist = std::min(dist, std::abs(cross(e, u)));
    }
  }
  out.distance_formula = dist == 0.0 ? kInf : c_star / dist;

  // The arcs fill the gaps between samples; inside an arc the sampled sup is
  // finite but at least c*/sin(spacing).
  const double step = dirs.spacing();
  if (std::isinf(out.distance_formula)) {
    out.tolerance = kInf;
    if (!(out.sup_formula >= c_star / std::sin(std::min(step, kPi / 2.0)) * (1.0 - 1e-9))) {
      throw Error("predicted_speed: e lies in 𝒰 but the sampled sup is only " + std::to_string(out.sup_formula));
    }
  } else {
    out.tolerance = 1e-9 * out.distance_formula;
    if (std::abs(out.sup_formula - out.distance_formula) > out.tolerance) {
      throw Error("predicted_speed: variational and geometric forms disagree (" + std::to_string(out.sup_formula) +
                  " vs " + std::to_string(out.distance_formula) + ")");
    }
  }
  out.value = out.distance_formula;
  return out;
}

SupportSpec envelope_W(const DirectionSet& dirs, double c_star) {
  if (!(c_star > 0.0)) throw DomainError("c* must be positive");
  return SupportSpec::ray_cone(dirs.unbounded_arcs(), dirs.dim).dilated(c_star);
}

SupportSpec minkowski_dilate(const SupportSpec& u, double r) { return u.dilated(r); }

}  // namespace rds
