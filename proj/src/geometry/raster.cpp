#include <algorithm>
#include <cmath>
#include <numeric>

#include "rds/geometry.hpp"

namespace rds {

namespace {

constexpr double kFar = 1e30;

// Felzenszwalb-Huttenlocher lower envelope of parabolas: d[q] = min_p (q-p)^2 + f[p].
void edt_1d(const double* f, std::size_t n, double* d, std::vector<std::size_t>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  std::size_t k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (std::size_t q = 1; q < n; ++q) {
    const double fq = f[q] + static_cast<double>(q) * q;
    double s = 0.0;
    while (true) {
      const std::size_t p = v[k];
      s = (fq - (f[p] + static_cast<double>(p) * p)) / (2.0 * (static_cast<double>(q) - p));
      if (s > z[k] || k == 0) break;
      --k;
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -kFar;
      z[1] = kFar;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const double dq = static_cast<double>(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Squared distances in cell units; kFar for "no site".
std::vector<double> squared_edt(const RasterMask& m, bool parallel) {
  const std::size_t nx = m.nx(), ny = m.ny();
  std::vector<double> g(m.size());
  const auto& cells = m.cells();
#pragma omp parallel if (parallel)
  {
    std::vector<double> f(std::max(nx, ny)), d(std::max(nx, ny));
    std::vector<std::size_t> v;
    std::vector<double> z;
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ny); ++j) {
      for (std::size_t i = 0; i < nx; ++i) f[i] = cells[j * nx + i] ? 0.0 : kFar;
      edt_1d(f.data(), nx, &g[j * nx], v, z);
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nx); ++i) {
      for (std::size_t j = 0; j < ny; ++j) f[j] = g[j * nx + i];
      edt_1d(f.data(), ny, d.data(), v, z);
      for (std::size_t j = 0; j < ny; ++j) g[j * nx + i] = d[j];
    }
  }
  return g;
}

RasterMask clipped(const RasterMask& m, const std::optional<Window>& clip) {
  if (!clip) return m;
  RasterMask out = m;
  for (std::size_t j = 0; j < m.ny(); ++j)
    for (std::size_t i = 0; i < m.nx(); ++i)
      if (out.at(i, j) && !clip->contains(m.center(i, j))) out.set(i, j, false);
  return out;
}

}  // namespace

RasterMask::RasterMask(Vec2 origin, double h, std::size_t nx, std::size_t ny, bool fill)
    : origin_(origin), h_(h), nx_(nx), ny_(ny), cells_(nx * ny, fill ? 1 : 0) {
  if (!(h > 0.0)) throw DomainError("mask spacing must be positive");
  if (nx == 0 || ny == 0) throw DomainError("mask window must be nonempty");
}

std::size_t RasterMask::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

bool RasterMask::same_grid(const RasterMask& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_ && origin_ == o.origin_;
}

Window RasterMask::window() const {
  return {origin_.x, origin_.x + h_ * (nx_ - 1), origin_.y, origin_.y + h_ * (ny_ - 1)};
}

std::optional<std::pair<std::size_t, std::size_t>> RasterMask::cell_of(Vec2 p) const {
  const double fi = std::round((p.x - origin_.x) / h_);
  const double fj = ny_ == 1 ? 0.0 : std::round((p.y - origin_.y) / h_);
  if (fi < 0 || fj < 0 || fi >= static_cast<double>(nx_) || fj >= static_cast<double>(ny_)) return std::nullopt;
  return std::pair{static_cast<std::size_t>(fi), static_cast<std::size_t>(fj)};
}

std::vector<double> distance_transform(const RasterMask& mask, Exec exec) {
  auto g = squared_edt(mask, exec == Exec::parallel);
  const double h = mask.h();
  for (double& v : g) v = v >= 0.5 * kFar ? kInf : h * std::sqrt(v);
  return g;
}

std::vector<double> distance_transform_brute(const RasterMask& mask) {
  std::vector<std::pair<std::size_t, std::size_t>> sites;
  for (std::size_t j = 0; j < mask.ny(); ++j)
    for (std::size_t i = 0; i < mask.nx(); ++i)
      if (mask.at(i, j)) sites.emplace_back(i, j);
  std::vector<double> out(mask.size(), kInf);
  for (std::size_t j = 0; j < mask.ny(); ++j) {
    for (std::size_t i = 0; i < mask.nx(); ++i) {
      double best = kInf;
      for (const auto& [si, sj] : sites) {
        const double di = static_cast<double>(i) - static_cast<double>(si);
        const double dj = static_cast<double>(j) - static_cast<double>(sj);
        best = std::min(best, di * di + dj * dj);
      }
      out[j * mask.nx() + i] = mask.h() * std::sqrt(best);
    }
  }
  return out;
}

double directed_hausdorff(const RasterMask& a, const RasterMask& b, const std::optional<Window>& clip) {
  if (!a.same_grid(b)) throw DomainError("hausdorff needs masks on the same grid");
  const RasterMask ac = clipped(a, clip), bc = clipped(b, clip);
  if (ac.empty()) return 0.0;
  if (bc.empty()) return kInf;
  const auto d = distance_transform(bc);
  double worst = 0.0;
  for (std::size_t k = 0; k < ac.size(); ++k)
    if (ac.cells()[k]) worst = std::max(worst, d[k]);
  return worst;
}

double hausdorff(const RasterMask& a, const RasterMask& b, const std::optional<Window>& clip) {
  if (!a.same_grid(b)) throw DomainError("hausdorff needs masks on the same grid");
  const bool ea = clipped(a, clip).empty(), eb = clipped(b, clip).empty();
  if (ea && eb) return 0.0;
  if (ea || eb) return kInf;
  return std::max(directed_hausdorff(a, b, clip), directed_hausdorff(b, a, clip));
}

RasterMask minkowski_dilate(const RasterMask& mask, double r) {
  if (!(r >= 0.0)) throw DomainError("dilation radius must be nonnegative");
  const auto d = distance_transform(mask);
  RasterMask out = mask;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k] < r) out.cells()[k] = 1;
  return out;
}

}  // namespace rds
