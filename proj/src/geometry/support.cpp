#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <sstream>

#include "support_impl.hpp"

namespace rds {

namespace detail {

std::vector<Vec2> SupportImpl::projections(Vec2) const {
  throw DomainError("projections are not available for support kind '" + to_string(kind()) + "'");
}

}  // namespace detail

namespace {

using detail::SupportImpl;

struct GraphSearch {
  double dist = kInf;
  std::vector<double> feet;
};

// Nearest points of {(s, γ(s))} to x. A coarse multi-scale ladder bounds the
// search radius B (any foot has |s - x'| <= B), uniform passes shrink B, and
// Brent polishes the best local minima of the last pass.
GraphSearch graph_search(const std::function<double(double)>& gamma, Vec2 x, bool all_feet) {
  auto d2 = [&](double s) {
    const double dy = gamma(s) - x.y;
    const double dx = s - x.x;
    return dx * dx + dy * dy;
  };
  const double v0 = std::abs(gamma(x.x) - x.y);
  if (v0 == 0.0) return {0.0, {x.x}};
  double best2 = v0 * v0;
  auto consider = [&](double s) { best2 = std::min(best2, d2(s)); };
  consider(0.0);
  for (int k = -8; k <= 40; ++k) {
    const double p = std::ldexp(1.0, k);
    consider(p);
    consider(-p);
    consider(x.x + p);
    consider(x.x - p);
  }

  constexpr int n = 512;
  std::vector<double> ss(n + 1), vv(n + 1);
  double radius = std::sqrt(best2);
  for (int pass = 0; pass < 4; ++pass) {
    const double lo = x.x - radius;
    const double step = 2.0 * radius / n;
    for (int i = 0; i <= n; ++i) {
      ss[i] = lo + i * step;
      vv[i] = d2(ss[i]);
      best2 = std::min(best2, vv[i]);
    }
    const double shrunk = std::sqrt(best2);
    if (shrunk > 0.98 * radius) break;
    radius = shrunk;
  }

  std::vector<int> minima;
  for (int i = 0; i <= n; ++i) {
    const bool left = i == 0 || vv[i] <= vv[i - 1];
    const bool right = i == n || vv[i] <= vv[i + 1];
    if (left && right) minima.push_back(i);
  }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return vv[a] < vv[b]; });
  if (minima.size() > 8) minima.resize(8);

  std::vector<std::pair<double, double>> polished;  // (d², s)
  for (int i : minima) {
    const double a = ss[std::max(i - 1, 0)];
    const double b = ss[std::min(i + 1, n)];
    auto r = boost::math::tools::brent_find_minima(d2, a, b, 40);
    polished.emplace_back(std::min(r.second, vv[i]), r.second < vv[i] ? r.first : ss[i]);
  }
  GraphSearch out;
  double bmin = best2;
  for (const auto& p : polished) bmin = std::min(bmin, p.first);
  out.dist = std::sqrt(bmin);
  if (all_feet) {
    const double tol = out.dist * 1e-6 + 1e-9;
    for (const auto& [v, s] : polished) {
      if (std::sqrt(v) > out.dist + tol) continue;
      bool dup = false;
      for (double f : out.feet) dup = dup || std::abs(f - s) <= 1e-6 * (1.0 + std::abs(s));
      if (!dup) out.feet.push_back(s);
    }
  }
  return out;
}

double ray_distance(Vec2 p, Vec2 u) {
  const double t = dot(p, u);
  return t <= 0.0 ? norm(p) : std::abs(cross(p, u));
}

double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

Arc half_circle_below(Vec2 normal) { return Arc{angle_of(normal) + kPi / 2.0, kPi}; }

std::vector<Arc> lower_half_circle() { return {Arc{-kPi, kPi}}; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

class EmptySet final : public SupportImpl {
 public:
  explicit EmptySet(int dim) : dim_(dim) {}
  SupportKind kind() const override { return SupportKind::empty; }
  int dimension() const override { return dim_; }
  std::string describe() const override { return "empty"; }
  double signed_distance(Vec2) const override { return kInf; }
  bool contains(Vec2) const override { return false; }
  std::vector<Vec2> projections(Vec2) const override { return {}; }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return std::vector<Arc>{}; }

 private:
  int dim_;
};

class HalfSpace final : public SupportImpl {
 public:
  HalfSpace(Vec2 n, double off, int dim) : n_(normalized(n)), off_(off), dim_(dim) {}
  SupportKind kind() const override { return SupportKind::half_space; }
  int dimension() const override { return dim_; }
  std::string describe() const override {
    return "half_space(n=(" + fmt(n_.x) + "," + fmt(n_.y) + "),offset=" + fmt(off_) + ")";
  }
  double signed_distance(Vec2 x) const override { return dot(x, n_) - off_; }
  std::vector<Vec2> projections(Vec2 x) const override { return {x - n_ * signed_distance(x)}; }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override {
    if (dim_ == 1) return std::vector<Arc>{Arc{angle_of(-n_), 0.0}};
    return std::vector<Arc>{half_circle_below(n_)};
  }
  Vec2 normal() const { return n_; }
  double offset() const { return off_; }

 private:
  Vec2 n_;
  double off_;
  int dim_;
};

class BallUnion final : public SupportImpl {
 public:
  BallUnion(std::vector<Vec2> c, std::vector<double> r, int dim) : c_(std::move(c)), r_(std::move(r)), dim_(dim) {}
  SupportKind kind() const override { return SupportKind::ball_union; }
  int dimension() const override { return dim_; }
  std::string describe() const override {
    std::string s = "ball_union(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ";";
      s += "c=(" + fmt(c_[i].x) + "," + fmt(c_[i].y) + "),r=" + fmt(r_[i]);
    }
    return s + ")";
  }
  double signed_distance(Vec2 x) const override {
    double outside = kInf, depth = -kInf;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const double d = norm(x - c_[i]) - r_[i];
      outside = std::min(outside, d);
      depth = std::max(depth, -d);
    }
    return outside > 0.0 ? outside : -depth;
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    const double dmin = signed_distance(x);
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const Vec2 p = x - c_[i];
      if (norm(p) - r_[i] <= dmin + 1e-9 * (1.0 + dmin)) out.push_back(c_[i] + normalized(p) * r_[i]);
    }
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return std::vector<Arc>{}; }
  bool is_singleton() const override { return c_.size() == 1 && r_[0] == 0.0; }
  const std::vector<Vec2>& centers() const { return c_; }
  const std::vector<double>& radii() const { return r_; }

 private:
  std::vector<Vec2> c_;
  std::vector<double> r_;
  int dim_;
};

class AnnuliUnion final : public SupportImpl {
 public:
  AnnuliUnion(double base, int dim) : base_(base), dim_(dim) {}
  SupportKind kind() const override { return SupportKind::annuli_union; }
  int dimension() const override { return dim_; }
  std::string describe() const override { return "annuli_union(base=" + fmt(base_) + ")"; }

  // Merged radial intervals covering [0, reach].
  std::vector<std::pair<double, double>> intervals(double reach) const {
    std::vector<std::pair<double, double>> out;
    for (int n = 0;; ++n) {
      const double c = std::pow(base_, n);
      const double lo = std::max(0.0, c - 1.0), hi = c + 1.0;
      if (!out.empty() && lo <= out.back().second) {
        out.back().second = std::max(out.back().second, hi);
      } else {
        out.emplace_back(lo, hi);
      }
      if (lo > reach) break;
    }
    return out;
  }

  double radial_sd(double r) const {
    double outside = kInf;
    for (const auto& [lo, hi] : intervals(2.0 * r + 10.0)) {
      if (r >= lo && r <= hi) {
        const double inner = lo > 0.0 ? r - lo : kInf;
        return -std::min(hi - r, inner);
      }
      outside = std::min(outside, r < lo ? lo - r : r - hi);
    }
    return outside;
  }

  double signed_distance(Vec2 x) const override { return radial_sd(norm(x)); }
  std::vector<Vec2> projections(Vec2 x) const override {
    const double r = norm(x);
    const double d = radial_sd(r);
    std::vector<Vec2> out;
    const Vec2 u = normalized(x);
    for (double target : {r - d, r + d}) {
      if (target >= 0.0 && std::abs(radial_sd(target)) <= 1e-9 * (1.0 + r)) out.push_back(u * target);
    }
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override {
    if (dim_ == 1) return std::vector<Arc>{Arc{0.0, 0.0}, Arc{kPi, 0.0}};
    return std::vector<Arc>{Arc{-kPi, 2.0 * kPi}};
  }

 private:
  double base_;
  int dim_;
};

class Subgraph final : public SupportImpl {
 public:
  Subgraph(std::function<double(double)> g, std::string label, std::vector<Arc> arcs)
      : g_(std::move(g)), label_(std::move(label)), arcs_(std::move(arcs)) {}
  SupportKind kind() const override { return SupportKind::subgraph; }
  std::string describe() const override { return "subgraph(" + label_ + ")"; }
  bool contains(Vec2 x) const override { return x.y <= g_(x.x); }
  double signed_distance(Vec2 x) const override {
    const double d = graph_search(g_, x, false).dist;
    return contains(x) ? -d : d;
  }
  double distance(Vec2 x) const override { return contains(x) ? 0.0 : graph_search(g_, x, false).dist; }
  std::optional<double> graph(double xp) const override { return g_(xp); }
  std::vector<Vec2> projections(Vec2 x) const override {
    std::vector<Vec2> out;
    for (double s : graph_search(g_, x, true).feet) out.push_back({s, g_(s)});
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return arcs_; }

 private:
  std::function<double(double)> g_;
  std::string label_;
  std::vector<Arc> arcs_;
};

class VShaped final : public SupportImpl {
 public:
  VShaped(Vec2 n1, double o1, Vec2 n2, double o2) : n1_(normalized(n1)), n2_(normalized(n2)), o1_(o1), o2_(o2) {}
  SupportKind kind() const override { return SupportKind::v_shaped; }
  std::string describe() const override {
    return "v_shaped(n1=(" + fmt(n1_.x) + "," + fmt(n1_.y) + "),o1=" + fmt(o1_) + ",n2=(" + fmt(n2_.x) + "," +
           fmt(n2_.y) + "),o2=" + fmt(o2_) + ")";
  }
  bool contains(Vec2 x) const override { return dot(x, n1_) <= o1_ || dot(x, n2_) <= o2_; }
  double signed_distance(Vec2 x) const override {
    const double s1 = dot(x, n1_) - o1_, s2 = dot(x, n2_) - o2_;
    if (s1 > 0.0 && s2 > 0.0) return std::min(s1, s2);
    return -wedge_distance(x, s1, s2);
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    const double s1 = dot(x, n1_) - o1_, s2 = dot(x, n2_) - o2_;
    const double m = std::min(s1, s2);
    const double tol = 1e-9 * (1.0 + std::abs(m));
    std::vector<Vec2> out;
    if (s1 <= m + tol) out.push_back(x - n1_ * s1);
    if (s2 <= m + tol) out.push_back(x - n2_ * s2);
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override {
    return merge_arcs({half_circle_below(n1_), half_circle_below(n2_)});
  }

 private:
  // Distance to the closed wedge {x·n1 >= o1} ∩ {x·n2 >= o2}.
  double wedge_distance(Vec2 x, double s1, double s2) const {
    double best = kInf;
    const Vec2 q1 = x - n1_ * s1, q2 = x - n2_ * s2;
    if (dot(q1, n2_) - o2_ >= -1e-12) best = std::min(best, std::abs(s1));
    if (dot(q2, n1_) - o1_ >= -1e-12) best = std::min(best, std::abs(s2));
    const double det = cross(n1_, n2_);
    if (std::abs(det) > 1e-14) {
      const Vec2 c{(o1_ * n2_.y - o2_ * n1_.y) / det, (n1_.x * o2_ - n2_.x * o1_) / det};
      best = std::min(best, norm(x - c));
    }
    return best;
  }

  Vec2 n1_, n2_;
  double o1_, o2_;
};

class Cone final : public SupportImpl {
 public:
  Cone(Vec2 v, Vec2 axis, double phi) : v_(v), a_(normalized(axis)), phi_(phi) {
    const double ca = std::cos(phi), sa = std::sin(phi);
    u1_ = {a_.x * ca - a_.y * sa, a_.x * sa + a_.y * ca};
    u2_ = {a_.x * ca + a_.y * sa, -a_.x * sa + a_.y * ca};
  }
  SupportKind kind() const override { return SupportKind::cone; }
  std::string describe() const override {
    return "cone(vertex=(" + fmt(v_.x) + "," + fmt(v_.y) + "),axis=(" + fmt(a_.x) + "," + fmt(a_.y) +
           "),half_angle=" + fmt(phi_) + ")";
  }
  bool contains(Vec2 x) const override {
    const Vec2 p = x - v_;
    const double r = norm(p);
    if (r == 0.0) return true;
    return std::acos(std::clamp(dot(p, a_) / r, -1.0, 1.0)) <= phi_ + 1e-15;
  }
  double signed_distance(Vec2 x) const override {
    const Vec2 p = x - v_;
    const double d = std::min(ray_distance(p, u1_), ray_distance(p, u2_));
    return contains(x) ? -d : d;
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    const Vec2 p = x - v_;
    const double d1 = ray_distance(p, u1_), d2 = ray_distance(p, u2_);
    const double m = std::min(d1, d2);
    std::vector<Vec2> out;
    for (auto [d, u] : {std::pair{d1, u1_}, std::pair{d2, u2_}}) {
      if (d > m + 1e-9 * (1.0 + m)) continue;
      const double t = dot(p, u);
      const Vec2 foot = t <= 0.0 ? v_ : v_ + u * t;
      if (out.empty() || norm(out.back() - foot) > 1e-12) out.push_back(foot);
    }
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override {
    return std::vector<Arc>{Arc{angle_of(a_) - phi_, 2.0 * phi_}};
  }

 private:
  Vec2 v_, a_, u1_, u2_;
  double phi_;
};

class GaussianTube final : public SupportImpl {
 public:
  GaussianTube(double a, double w)
      : a_(a), w_(w), upper_([a, w](double s) { return a * std::exp(-(s / w) * (s / w)); }),
        lower_([a, w](double s) { return -a * std::exp(-(s / w) * (s / w)); }) {}
  SupportKind kind() const override { return SupportKind::gaussian_tube; }
  std::string describe() const override { return "gaussian_tube(amplitude=" + fmt(a_) + ",width=" + fmt(w_) + ")"; }
  bool contains(Vec2 x) const override { return std::abs(x.y) <= upper_(x.x); }
  double signed_distance(Vec2 x) const override {
    if (contains(x)) {
      return -std::min(graph_search(upper_, x, false).dist, graph_search(lower_, x, false).dist);
    }
    return graph_search(x.y > 0.0 ? upper_ : lower_, x, false).dist;
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    const auto& g = x.y > 0.0 ? upper_ : lower_;
    std::vector<Vec2> out;
    for (double s : graph_search(g, x, true).feet) out.push_back({s, g(s)});
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override {
    return std::vector<Arc>{Arc{0.0, 0.0}, Arc{kPi, 0.0}};
  }

 private:
  double a_, w_;
  std::function<double(double)> upper_, lower_;
};

class MaskSet final : public SupportImpl {
 public:
  explicit MaskSet(RasterMask m) : m_(std::move(m)) {
    to_occupied_ = distance_transform(m_);
    RasterMask comp = m_;
    for (auto& c : comp.cells()) c = c ? 0 : 1;
    to_free_ = distance_transform(comp);
    for (std::size_t j = 0; j < m_.ny(); ++j)
      for (std::size_t i = 0; i < m_.nx(); ++i)
        if (m_.at(i, j)) occupied_.push_back(m_.center(i, j));
  }
  SupportKind kind() const override { return SupportKind::mask; }
  int dimension() const override { return m_.ny() == 1 ? 1 : 2; }
  std::string describe() const override {
    return "mask(" + std::to_string(m_.nx()) + "x" + std::to_string(m_.ny()) + ",h=" + fmt(m_.h()) + ")";
  }
  bool contains(Vec2 x) const override {
    const auto c = m_.cell_of(x);
    return c && m_.at(c->first, c->second);
  }
  double signed_distance(Vec2 x) const override {
    if (occupied_.empty()) return kInf;
    const Window w = m_.window();
    const Vec2 clamped{std::clamp(x.x, w.xmin, w.xmax), std::clamp(x.y, w.ymin, w.ymax)};
    const auto c = m_.cell_of(clamped);
    const std::size_t idx = c->second * m_.nx() + c->first;
    const double off = norm(x - clamped);
    if (off == 0.0 && m_.at(c->first, c->second)) return -to_free_[idx];
    return off + to_occupied_[idx];
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    double best = kInf;
    for (const Vec2& p : occupied_) best = std::min(best, norm(x - p));
    std::vector<Vec2> out;
    for (const Vec2& p : occupied_)
      if (norm(x - p) <= best + 0.5 * m_.h()) out.push_back(p);
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return std::nullopt; }
  bool is_singleton() const override { return occupied_.size() == 1; }
  std::optional<Window> known_window() const override { return m_.window(); }
  double resolution() const override { return m_.h(); }
  const RasterMask& raster() const { return m_; }

 private:
  RasterMask m_;
  std::vector<double> to_occupied_, to_free_;
  std::vector<Vec2> occupied_;
};

class Eroded final : public SupportImpl {
 public:
  Eroded(SupportSpec base, double rho) : base_(std::move(base)), rho_(rho) {}
  SupportKind kind() const override { return SupportKind::eroded; }
  int dimension() const override { return base_.dimension(); }
  std::string describe() const override { return "eroded(" + base_.describe() + ",rho=" + fmt(rho_) + ")"; }
  bool contains(Vec2 x) const override { return base_.signed_distance(x) <= -rho_; }
  double signed_distance(Vec2 x) const override { return base_.signed_distance(x) + rho_; }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return base_.asymptotic_arcs(); }

 private:
  SupportSpec base_;
  double rho_;
};

class Dilated final : public SupportImpl {
 public:
  Dilated(SupportSpec base, double r) : base_(std::move(base)), r_(r) {}
  SupportKind kind() const override { return SupportKind::dilated; }
  int dimension() const override { return base_.dimension(); }
  std::string describe() const override { return "dilated(" + base_.describe() + ",r=" + fmt(r_) + ")"; }
  bool contains(Vec2 x) const override { return base_.distance(x) < r_; }
  double signed_distance(Vec2 x) const override { return base_.signed_distance(x) - r_; }
  double distance(Vec2 x) const override { return std::max(0.0, base_.distance(x) - r_); }
  std::vector<Vec2> projections(Vec2 x) const override {
    std::vector<Vec2> out;
    for (const Vec2& xi : base_.projections(x)) out.push_back(xi + normalized(x - xi) * r_);
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return base_.asymptotic_arcs(); }

 private:
  SupportSpec base_;
  double r_;
};

class RayCone final : public SupportImpl {
 public:
  RayCone(std::vector<Arc> arcs, int dim) : arcs_(merge_arcs(std::move(arcs))), dim_(dim) {
    for (const Arc& a : arcs_) {
      full_ = full_ || a.len >= 2.0 * kPi;
      ends_.push_back(unit_from_angle(a.lo));
      ends_.push_back(unit_from_angle(a.hi()));
    }
  }
  SupportKind kind() const override { return SupportKind::ray_cone; }
  int dimension() const override { return dim_; }
  std::string describe() const override {
    std::string s = "ray_cone(";
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      if (i) s += ";";
      s += "[" + fmt(arcs_[i].lo) + "," + fmt(arcs_[i].hi()) + "]";
    }
    return s + ")";
  }
  bool contains(Vec2 x) const override {
    if (norm(x) == 0.0 || full_) return true;
    const double a = angle_of(x);
    for (const Arc& arc : arcs_)
      if (arc.contains(a, 1e-12)) return true;
    return false;
  }
  double distance(Vec2 x) const override {
    if (contains(x)) return 0.0;
    double best = norm(x);
    for (const Vec2& e : ends_) best = std::min(best, ray_distance(x, e));
    return best;
  }
  double signed_distance(Vec2 x) const override {
    if (!contains(x)) return distance(x);
    if (full_) return -kInf;
    double depth = kInf;
    for (const Vec2& e : ends_) depth = std::min(depth, ray_distance(x, e));
    return -depth;
  }
  std::vector<Vec2> projections(Vec2 x) const override {
    const double d = distance(x);
    std::vector<Vec2> out;
    if (std::abs(norm(x) - d) <= 1e-12 * (1.0 + d)) out.push_back({0.0, 0.0});
    for (const Vec2& e : ends_) {
      const double t = dot(x, e);
      if (t > 0.0 && std::abs(std::abs(cross(x, e)) - d) <= 1e-12 * (1.0 + d)) out.push_back(e * t);
    }
    return out;
  }
  std::optional<std::vector<Arc>> asymptotic_arcs() const override { return arcs_; }

 private:
  std::vector<Arc> arcs_;
  std::vector<Vec2> ends_;
  bool full_ = false;
  int dim_;
};

double get(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

void check_keys(const std::map<std::string, double>& p, std::initializer_list<const char*> allowed,
                const std::string& what) {
  for (const auto& [k, _] : p) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown parameter '" + k + "' for " + what);
  }
}

// Recession arcs of {x_N <= α|x'|} for any real α.
std::vector<Arc> slope_cone_arcs(double alpha) {
  const double beta = std::atan2(1.0, alpha);
  return {Arc{beta - 1.5 * kPi, 2.0 * kPi - 2.0 * beta}};
}

}  // namespace

bool Arc::contains(double angle, double tol) const {
  if (len >= 2.0 * kPi - tol) return true;
  double d = std::fmod(angle - lo, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return d <= len + tol || d >= 2.0 * kPi - tol;
}

double max_dot_over_arcs(const std::vector<Arc>& arcs, Vec2 e) {
  double best = -kInf;
  const double ae = angle_of(e);
  const double ne = norm(e);
  for (const Arc& a : arcs) {
    if (a.contains(ae)) return ne;
    best = std::max({best, ne * std::cos(a.lo - ae), ne * std::cos(a.hi() - ae)});
  }
  return best;
}

std::vector<Arc> merge_arcs(std::vector<Arc> arcs) {
  if (arcs.empty()) return arcs;
  for (Arc& a : arcs) {
    if (a.len >= 2.0 * kPi) return {Arc{-kPi, 2.0 * kPi}};
    a.lo = std::remainder(a.lo, 2.0 * kPi);
    if (a.lo >= kPi) a.lo -= 2.0 * kPi;
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
  std::vector<Arc> out{arcs.front()};
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    Arc& cur = out.back();
    if (arcs[i].lo <= cur.hi() + 1e-15) {
      cur.len = std::max(cur.hi(), arcs[i].hi()) - cur.lo;
    } else {
      out.push_back(arcs[i]);
    }
  }
  // Wrap-around between the last and the first arc.
  if (out.size() > 1 && out.back().hi() >= out.front().lo + 2.0 * kPi - 1e-15) {
    Arc& last = out.back();
    last.len = std::max(last.hi(), out.front().hi() + 2.0 * kPi) - last.lo;
    out.erase(out.begin());
  }
  for (const Arc& a : out)
    if (a.len >= 2.0 * kPi - 1e-15) return {Arc{-kPi, 2.0 * kPi}};
  return out;
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::empty: return "empty";
    case SupportKind::half_space: return "half_space";
    case SupportKind::ball_union: return "ball_union";
    case SupportKind::annuli_union: return "annuli_union";
    case SupportKind::subgraph: return "subgraph";
    case SupportKind::v_shaped: return "v_shaped";
    case SupportKind::cone: return "cone";
    case SupportKind::gaussian_tube: return "gaussian_tube";
    case SupportKind::mask: return "mask";
    case SupportKind::eroded: return "eroded";
    case SupportKind::dilated: return "dilated";
    case SupportKind::ray_cone: return "ray_cone";
  }
  return "unknown";
}

std::string to_string(GraphTag tag) {
  switch (tag) {
    case GraphTag::linear_cone: return "linear_cone";
    case GraphTag::linear: return "linear";
    case GraphTag::neg_quadratic: return "neg_quadratic";
    case GraphTag::log_decay: return "log_decay";
    case GraphTag::sqrt_growth: return "sqrt_growth";
    case GraphTag::bounded_wave: return "bounded_wave";
    case GraphTag::abs_smooth: return "abs_smooth";
    case GraphTag::custom: return "custom";
  }
  return "unknown";
}

SupportSpec SupportSpec::empty(int dim) { return SupportSpec(std::make_shared<EmptySet>(dim)); }

SupportSpec SupportSpec::half_space(Vec2 normal, double offset, int dim) {
  if (norm(normal) == 0.0) throw DomainError("half_space normal must be nonzero");
  if (dim == 1 && normal.y != 0.0) throw DomainError("a half-line normal must be (±1, 0)");
  return SupportSpec(std::make_shared<HalfSpace>(normal, offset, dim));
}

SupportSpec SupportSpec::ball(Vec2 center, double radius, int dim) { return ball_union({center}, {radius}, dim); }

SupportSpec SupportSpec::ball_union(std::vector<Vec2> centers, std::vector<double> radii, int dim) {
  if (centers.empty() || centers.size() != radii.size()) {
    throw DomainError("ball_union needs matching, nonempty centre and radius lists");
  }
  for (double r : radii)
    if (!(r >= 0.0)) throw DomainError("ball radii must be nonnegative");
  return SupportSpec(std::make_shared<BallUnion>(std::move(centers), std::move(radii), dim));
}

SupportSpec SupportSpec::annuli_union(double base, int dim) {
  if (!(base > 1.0)) throw DomainError("annuli base must exceed 1");
  return SupportSpec(std::make_shared<AnnuliUnion>(base, dim));
}

SupportSpec SupportSpec::subgraph(GraphTag tag, const std::map<std::string, double>& p) {
  std::function<double(double)> g;
  std::vector<Arc> arcs = lower_half_circle();
  std::ostringstream label;
  label << to_string(tag);
  for (const auto& [k, v] : p) label << "," << k << "=" << v;
  switch (tag) {
    case GraphTag::linear_cone: {
      check_keys(p, {"alpha"}, "linear_cone");
      const double a = get(p, "alpha", 1.0);
      g = [a](double s) { return a * std::abs(s); };
      arcs = slope_cone_arcs(a);
      break;
    }
    case GraphTag::linear: {
      check_keys(p, {"slope"}, "linear");
      const double k = get(p, "slope", 1.0);
      g = [k](double s) { return k * s; };
      arcs = {half_circle_below(normalized(Vec2{-k, 1.0}))};
      break;
    }
    case GraphTag::neg_quadratic: {
      check_keys(p, {"a"}, "neg_quadratic");
      const double a = get(p, "a", 0.25);
      if (!(a > 0.0)) throw DomainError("neg_quadratic needs a > 0");
      g = [a](double s) { return -a * s * s; };
      arcs = {Arc{-kPi / 2.0, 0.0}};
      break;
    }
    case GraphTag::log_decay: {
      check_keys(p, {"kappa"}, "log_decay");
      const double k = get(p, "kappa", 3.0);
      g = [k](double s) { return -k * std::log1p(std::abs(s)); };
      break;
    }
    case GraphTag::sqrt_growth: {
      check_keys(p, {"a"}, "sqrt_growth");
      const double a = get(p, "a", 1.0);
      g = [a](double s) { return a * std::sqrt(std::abs(s)); };
      break;
    }
    case GraphTag::bounded_wave: {
      check_keys(p, {"amplitude", "k", "damping"}, "bounded_wave");
      const double a = get(p, "amplitude", 1.0), k = get(p, "k", 1.0), d = get(p, "damping", 0.1);
      g = [a, k, d](double s) { return a * std::sin(k * s) / (1.0 + d * std::abs(s)); };
      break;
    }
    case GraphTag::abs_smooth: {
      check_keys(p, {"ell", "w"}, "abs_smooth");
      const double l = get(p, "ell", 1.0), w = get(p, "w", 1.0);
      g = [l, w](double s) { return -l * std::sqrt(s * s + w * w); };
      arcs = slope_cone_arcs(-l);
      break;
    }
    case GraphTag::custom: throw DomainError("custom subgraphs are built with subgraph_custom");
  }
  return SupportSpec(std::make_shared<Subgraph>(std::move(g), label.str(), std::move(arcs)));
}

SupportSpec SupportSpec::subgraph_custom(std::function<double(double)> gamma, std::string label,
                                         std::optional<std::vector<Arc>> asymptotic) {
  return SupportSpec(std::make_shared<Subgraph>(std::move(gamma), "custom," + label,
                                                asymptotic ? *asymptotic : lower_half_circle()));
}

SupportSpec SupportSpec::v_shaped(Vec2 n1, double o1, Vec2 n2, double o2) {
  if (norm(n1) == 0.0 || norm(n2) == 0.0) throw DomainError("v_shaped normals must be nonzero");
  return SupportSpec(std::make_shared<VShaped>(n1, o1, n2, o2));
}

SupportSpec SupportSpec::cone(Vec2 vertex, Vec2 axis, double half_angle) {
  if (!(half_angle > 0.0 && half_angle < kPi)) throw DomainError("cone half-angle must lie in (0, π)");
  return SupportSpec(std::make_shared<Cone>(vertex, axis, half_angle));
}

SupportSpec SupportSpec::gaussian_tube(double amplitude, double width) {
  if (!(amplitude > 0.0 && width > 0.0)) throw DomainError("gaussian_tube needs positive amplitude and width");
  return SupportSpec(std::make_shared<GaussianTube>(amplitude, width));
}

SupportSpec SupportSpec::mask(RasterMask m) {
  if (m.size() == 0) throw DomainError("mask support needs a nonempty window");
  return SupportSpec(std::make_shared<MaskSet>(std::move(m)));
}

SupportSpec SupportSpec::ray_cone(std::vector<Arc> arcs, int dim) {
  return SupportSpec(std::make_shared<RayCone>(std::move(arcs), dim));
}

SupportSpec SupportSpec::from_params(const std::string& kind, const std::map<std::string, std::string>& raw) {
  std::map<std::string, double> p;
  std::string tag;
  for (const auto& [k, v] : raw) {
    if (k == "tag") {
      tag = v;
      continue;
    }
    try {
      std::size_t used = 0;
      p[k] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::exception&) {
      throw ConfigError("support parameter '" + k + "' is not a number: '" + v + "'");
    }
  }
  auto dim = [&] { return static_cast<int>(get(p, "dim", 2.0)); };
  const auto deg = kPi / 180.0;
  if (kind == "half_space") {
    check_keys(p, {"nx", "ny", "offset", "dim"}, "half_space");
    const int d = dim();
    const Vec2 n{get(p, "nx", d == 1 ? 1.0 : 0.0), get(p, "ny", d == 1 ? 0.0 : 1.0)};
    return half_space(n, get(p, "offset", 0.0), d);
  }
  if (kind == "ball") {
    check_keys(p, {"cx", "cy", "r", "dim"}, "ball");
    return ball({get(p, "cx", 0.0), get(p, "cy", 0.0)}, get(p, "r", 1.0), dim());
  }
  if (kind == "annuli_union") {
    check_keys(p, {"base", "dim"}, "annuli_union");
    return annuli_union(get(p, "base", 2.0), dim());
  }
  if (kind == "subgraph") {
    for (GraphTag t : {GraphTag::linear_cone, GraphTag::linear, GraphTag::neg_quadratic, GraphTag::log_decay,
                       GraphTag::sqrt_growth, GraphTag::bounded_wave, GraphTag::abs_smooth}) {
      if (to_string(t) == tag) return subgraph(t, p);
    }
    throw ConfigError("unknown subgraph tag '" + tag + "'");
  }
  if (!tag.empty()) throw ConfigError("parameter 'tag' only applies to subgraph supports");
  if (kind == "v_shaped") {
    if (p.count("normal_angle_deg")) {
      check_keys(p, {"normal_angle_deg", "offset"}, "v_shaped");
      const double half = 0.5 * p.at("normal_angle_deg") * deg;
      const double o = get(p, "offset", 0.0);
      return v_shaped({-std::sin(half), std::cos(half)}, o, {std::sin(half), std::cos(half)}, o);
    }
    check_keys(p, {"n1x", "n1y", "o1", "n2x", "n2y", "o2"}, "v_shaped");
    return v_shaped({get(p, "n1x", -1.0), get(p, "n1y", 1.0)}, get(p, "o1", 0.0),
                    {get(p, "n2x", 1.0), get(p, "n2y", 1.0)}, get(p, "o2", 0.0));
  }
  if (kind == "cone") {
    check_keys(p, {"vx", "vy", "ax", "ay", "half_angle_deg"}, "cone");
    return cone({get(p, "vx", 0.0), get(p, "vy", 0.0)}, {get(p, "ax", 0.0), get(p, "ay", -1.0)},
                get(p, "half_angle_deg", 45.0) * deg);
  }
  if (kind == "gaussian_tube") {
    check_keys(p, {"amplitude", "width"}, "gaussian_tube");
    return gaussian_tube(get(p, "amplitude", 1.0), get(p, "width", 1.0));
  }
  throw ConfigError("unknown support kind '" + kind + "'");
}

SupportSpec SupportSpec::parse(const std::string& spec) {
  std::stringstream ss(spec);
  std::string item, kind;
  std::map<std::string, std::string> params;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!kind.empty()) throw ConfigError("support spec has two kind names: '" + spec + "'");
      kind = item;
    } else if (item.substr(0, eq) == "kind") {
      kind = item.substr(eq + 1);
    } else {
      params[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  if (kind.empty()) throw ConfigError("support spec names no kind: '" + spec + "'");
  return from_params(kind, params);
}

SupportKind SupportSpec::kind() const { return impl_->kind(); }
int SupportSpec::dimension() const { return impl_->dimension(); }
std::string SupportSpec::describe() const { return impl_->describe(); }
bool SupportSpec::contains(Vec2 x) const { return impl_->contains(x); }
double SupportSpec::distance(Vec2 x) const { return impl_->distance(x); }
double SupportSpec::signed_distance(Vec2 x) const { return impl_->signed_distance(x); }
std::optional<double> SupportSpec::graph(double xp) const { return impl_->graph(xp); }
std::vector<Vec2> SupportSpec::projections(Vec2 x) const { return impl_->projections(x); }
std::optional<std::vector<Arc>> SupportSpec::asymptotic_arcs() const { return impl_->asymptotic_arcs(); }

bool SupportSpec::is_bounded() const {
  if (kind() == SupportKind::mask) return true;
  const auto arcs = asymptotic_arcs();
  return arcs && arcs->empty();
}

RasterMask SupportSpec::rasterize(Vec2 origin, double h, std::size_t nx, std::size_t ny) const {
  RasterMask m(origin, h, nx, ny);
  auto& cells = m.cells();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ny); ++j)
    for (std::size_t i = 0; i < nx; ++i) cells[j * nx + i] = contains(m.center(i, j)) ? 1 : 0;
  return m;
}

SupportSpec SupportSpec::eroded(double rho) const {
  if (!(rho > 0.0)) throw DomainError("erosion radius must be positive");
  return SupportSpec(std::make_shared<Eroded>(*this, rho));
}

SupportSpec SupportSpec::dilated(double r) const {
  if (!(r >= 0.0)) throw DomainError("dilation radius must be nonnegative");
  if (r == 0.0) return *this;
  return SupportSpec(std::make_shared<Dilated>(*this, r));
}

double distance_to_graph(const std::function<double(double)>& gamma, Vec2 x, double* foot) {
  const auto r = graph_search(gamma, x, foot != nullptr);
  if (foot && !r.feet.empty()) *foot = r.feet.front();
  return r.dist;
}

}  // namespace rds
