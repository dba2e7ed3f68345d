#pragma once

// Initial supports U ⊂ R^N (N = 1, 2), raster masks, direction sets and the
// spreading-set geometry built on them.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rds/common.hpp"

namespace rds {

// e_N for the given dimension (the line uses the x coordinate).
inline Vec2 vertical(int dim) { return dim == 1 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }

// Closed arc of S^1 in standard angle: {lo + s : 0 <= s <= len}, len in [0, 2π].
struct Arc {
  double lo = 0.0;
  double len = 0.0;

  bool contains(double angle, double tol = 1e-12) const;
  double hi() const { return lo + len; }
};

// Largest e·d over d in the arcs; -inf for no arcs.
double max_dot_over_arcs(const std::vector<Arc>& arcs, Vec2 e);
// Merge overlapping arcs; a full circle collapses to a single arc.
std::vector<Arc> merge_arcs(std::vector<Arc> arcs);

struct Window {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

enum class Exec { serial, parallel };

// Occupancy of cell centres origin + (i h, j h), row-major with j the row.
// On the line ny == 1.
class RasterMask {
 public:
  RasterMask() = default;
  RasterMask(Vec2 origin, double h, std::size_t nx, std::size_t ny, bool fill = false);

  Vec2 origin() const { return origin_; }
  double h() const { return h_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return cells_.size(); }
  Vec2 center(std::size_t i, std::size_t j) const { return {origin_.x + h_ * i, origin_.y + h_ * j}; }
  bool at(std::size_t i, std::size_t j) const { return cells_[j * nx_ + i] != 0; }
  void set(std::size_t i, std::size_t j, bool v) { cells_[j * nx_ + i] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_grid(const RasterMask& o) const;
  // Cell-centre bounding box.
  Window window() const;
  // Nearest cell to p, if p lies within half a cell of the grid.
  std::optional<std::pair<std::size_t, std::size_t>> cell_of(Vec2 p) const;

 private:
  Vec2 origin_{};
  double h_ = 1.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Exact Euclidean distance (physical units) from every cell centre to the
// nearest occupied cell centre; +inf everywhere for an empty mask.
std::vector<double> distance_transform(const RasterMask& mask, Exec exec = Exec::parallel);
// O(n²) scan over all occupied cells; test oracle.
std::vector<double> distance_transform_brute(const RasterMask& mask);

// sup_{a in A} dist(a, B) over cell centres, after clipping both sets.
double directed_hausdorff(const RasterMask& a, const RasterMask& b, const std::optional<Window>& clip = {});
// d_H with d_H(∅,∅) = 0 and d_H(A,∅) = d_H(∅,A) = +inf.
double hausdorff(const RasterMask& a, const RasterMask& b, const std::optional<Window>& clip = {});
// {x : dist(x, mask) < r} on the same grid.
RasterMask minkowski_dilate(const RasterMask& mask, double r);

enum class SupportKind {
  empty,
  half_space,
  ball_union,
  annuli_union,
  subgraph,
  v_shaped,
  cone,
  gaussian_tube,
  mask,
  eroded,
  dilated,
  ray_cone,
};

enum class GraphTag {
  linear_cone,    // α|x'|
  linear,         // s x'
  neg_quadratic,  // -a x'^2
  log_decay,      // -κ ln(1+|x'|)
  sqrt_growth,    // a √|x'|
  bounded_wave,   // A sin(k x') / (1 + d|x'|)
  abs_smooth,     // -ℓ √(x'^2 + w^2)
  custom,
};

std::string to_string(SupportKind kind);
std::string to_string(GraphTag tag);

namespace detail {
class SupportImpl;
}

class SupportSpec {
 public:
  static SupportSpec empty(int dim = 2);
  // {x : x·normal <= offset}; normal is normalised.
  static SupportSpec half_space(Vec2 normal, double offset = 0.0, int dim = 2);
  static SupportSpec ball(Vec2 center, double radius, int dim = 2);
  static SupportSpec ball_union(std::vector<Vec2> centers, std::vector<double> radii, int dim = 2);
  // ⋃_{n>=0} {base^n - 1 <= |x| <= base^n + 1}.
  static SupportSpec annuli_union(double base = 2.0, int dim = 2);
  static SupportSpec subgraph(GraphTag tag, const std::map<std::string, double>& params = {});
  // γ must be finite everywhere; `asymptotic` lists the recession directions
  // of the subgraph (default: the closed lower half circle).
  static SupportSpec subgraph_custom(std::function<double(double)> gamma, std::string label,
                                     std::optional<std::vector<Arc>> asymptotic = {});
  // {x·n1 <= o1} ∪ {x·n2 <= o2}.
  static SupportSpec v_shaped(Vec2 n1, double o1, Vec2 n2, double o2);
  static SupportSpec cone(Vec2 vertex, Vec2 axis, double half_angle);
  // {|x_N| <= A exp(-(x'/w)^2)}.
  static SupportSpec gaussian_tube(double amplitude = 1.0, double width = 1.0);
  static SupportSpec mask(RasterMask m);
  // ℝ⁺K for K a union of closed arcs, origin included.
  static SupportSpec ray_cone(std::vector<Arc> arcs, int dim = 2);

  // "kind,key=value,..." (subgraph takes tag=<name>).
  static SupportSpec parse(const std::string& spec);
  static SupportSpec from_params(const std::string& kind, const std::map<std::string, std::string>& params);

  SupportKind kind() const;
  int dimension() const;
  std::string describe() const;

  bool contains(Vec2 x) const;
  // dist(x, U); 0 inside, +inf for the empty set.
  double distance(Vec2 x) const;
  // dist(x, U) outside, -dist(x, ∂U) inside. Exact outside for every kind;
  // inside it is exact for half-spaces, single balls, annuli, cones and
  // subgraphs.
  double signed_distance(Vec2 x) const;
  // γ(x') for subgraph kinds.
  std::optional<double> graph(double xp) const;
  // Nearest points of the closure of U to an exterior point x.
  std::vector<Vec2> projections(Vec2 x) const;
  // Recession directions of U; nullopt when unknown (masks).
  std::optional<std::vector<Arc>> asymptotic_arcs() const;
  bool is_bounded() const;

  RasterMask rasterize(Vec2 origin, double h, std::size_t nx, std::size_t ny) const;

  // Composite views.
  SupportSpec eroded(double rho) const;
  SupportSpec dilated(double r) const;

  const detail::SupportImpl& impl() const { return *impl_; }

 private:
  explicit SupportSpec(std::shared_ptr<const detail::SupportImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::SupportImpl> impl_;
};

// Distance from a point to the graph {(s, γ(s))}; numeric, see geometry/support.cpp.
double distance_to_graph(const std::function<double(double)>& gamma, Vec2 x, double* foot = nullptr);

struct RhoInterior {
  SupportSpec set;
  bool empty = false;
  // d_H(U, U_ρ); +inf when U_ρ is empty. Estimated on `window` unless exact.
  double hausdorff_estimate = 0.0;
  bool exact = false;
  std::string notes;
};

RhoInterior rho_interior(const SupportSpec& u, double rho, double window_half = 40.0, double h = 0.1);

enum class DirClass { bounded, unbounded, uncertain, member, nonmember };

std::string to_string(DirClass c);

struct DirectionSample {
  Vec2 e;
  double angle = 0.0;   // standard angle of e
  double margin = 0.0;  // extrapolated lim dist(τe,U)/τ in [0,1]
  double liminf = 0.0;  // min over the top octave
  double limsup = 0.0;  // max over the top octave
  bool stable = true;   // top two ladder rungs within 10%
  DirClass cls = DirClass::uncertain;
};

struct DirectionSet {
  int dim = 2;
  double eps = 1e-2;
  std::vector<DirectionSample> samples;

  std::vector<Vec2> unbounded() const;
  // Maximal runs of consecutive unbounded samples as arcs (sample angles only).
  std::vector<Arc> unbounded_arcs() const;
  double spacing() const;
};

struct DirectionOptions {
  double tau_max = 1e4;
  int n_dirs = 256;
  double eps = 1e-2;
  int octave_samples = 64;
};

DirectionSet direction_sets(const SupportSpec& u, const DirectionOptions& opt = {});

struct HypothesisUCheck {
  bool holds = false;
  std::vector<Vec2> missing_dirs;
  bool uncertain = false;        // some missing direction was only uncertain
  int resolution_limited = 0;    // gap-band directions accepted on agreement
};

HypothesisUCheck check_hypothesis_U(const SupportSpec& u, double rho, const DirectionOptions& opt = {});

struct SpeedPrediction {
  double value = 0.0;
  double sup_formula = 0.0;
  double distance_formula = 0.0;
  double tolerance = 0.0;
};

// w(e) by the variational sup over sampled 𝒰(U) and by c*/dist(e, ℝ⁺𝒰(U))
// over its arcs. Throws Error when the two disagree beyond the sampling bound.
SpeedPrediction predicted_speed(Vec2 e, const DirectionSet& dirs, double c_star);

// {x : dist(x, ℝ⁺𝒰(U)) < c*}.
SupportSpec envelope_W(const DirectionSet& dirs, double c_star);

SupportSpec minkowski_dilate(const SupportSpec& u, double r);

struct OpeningValue {
  double value = -kInf;
  std::vector<Vec2> projections;
  bool lower_bound_only = false;
};

struct OpeningOptions {
  int n_angles = 1440;
  double radius_budget = 0.0;  // 0: 4 max(dist(x,U), 10)
};

OpeningValue opening(const SupportSpec& u, Vec2 x, const OpeningOptions& opt = {});

// Points with dist(x, U) = R inside the window, found by bisection along
// `lines` horizontal and vertical grid lines.
std::vector<Vec2> distance_level_points(const SupportSpec& u, double R, const Window& w, int lines = 81);

struct BallconePoint {
  double R = 0.0;
  double sup_opening = -kInf;
  bool lower_bound_only = false;
  std::size_t points = 0;
};

struct BallconeProfile {
  std::vector<BallconePoint> profile;
  bool nonincreasing = false;
  bool plausible = false;  // nonincreasing and last value <= eps
};

BallconeProfile ballcone_profile(const SupportSpec& u, const std::vector<double>& radii, double eps = 1e-2,
                                 int lines = 41);

struct MonotonicityDirections {
  DirectionSet set;  // cls member / nonmember, margin = angular gap
  std::vector<Vec2> projection_dirs;
  bool empty_flag = false;  // relatively dense or window too small
};

MonotonicityDirections monotonicity_directions(const SupportSpec& u, double r_far, int n_dirs = 64);

}  // namespace rds
