#pragma once

// Level-set geometry read off solver fields: E_λ masks, graph positions
// X_λ(x'), ray positions, Hessian invariants and planarity defects.

#include <limits>
#include <ostream>
#include <vector>

#include "rds/solver.hpp"

namespace rds {

// {cells with u > λ} on the field's grid.
RasterMask upper_level_set(const Field& f, double lambda);

struct GraphPosition {
  double x_prime = 0.0;
  double value = 0.0;           // X_λ; the window edge when a flag below is set
  bool monotone = true;         // column nonincreasing in x_N
  double violation = 0.0;       // largest upward jump along the column
  bool above_window = false;    // u > λ up to the top row
  bool below_window = false;    // u <= λ everywhere in the column
  bool valid() const { return !above_window && !below_window; }
};

// Topmost crossing of λ in column i, linearly interpolated. On line and
// radial grids the single row is the column.
GraphPosition graph_position(const Field& f, double lambda, std::size_t column = 0);
// Column nearest to x'.
std::size_t column_of(const Field& f, double x_prime);

struct GraphGradient {
  double x_prime = 0.0;
  double dX = 0.0;  // centred difference of X_λ across columns
  bool valid = true;
  bool monotone = true;
};

// ∂_{x'}X_λ at the given interior columns.
std::vector<GraphGradient> grad_graph(const Field& f, double lambda, const std::vector<std::size_t>& columns);

enum class RayMode { furthest, first_exit };

struct RayPosition {
  double R = 0.0;
  bool window_limited = false;  // u > λ up to where the ray leaves the grid
  bool no_crossing = false;     // u <= λ already at the origin
};

// sup{r : u(r e) > λ} (furthest) or the first r where u drops to λ
// (first_exit), sampled every h/4 from the origin. On line and radial grids
// only the sign of e.x matters.
RayPosition ray_position(const Field& f, Vec2 e, double lambda, RayMode mode = RayMode::furthest);

// σ_k of the finite-difference Hessian (plane, k = 2: det D²u). Cells on the
// one-cell margin hold NaN.
std::vector<double> sigma_k_field(const Field& f, int k = 2);

struct PlanarityDefect {
  double defect = 0.0;       // largest angle between two gradient directions
  bool near_constant = false;
  std::size_t cells = 0;     // cells above the gradient floor
};

PlanarityDefect planarity_defect(const Field& f, Vec2 center, double radius, double g_min = 1e-4);

// sup over finite entries of |σ₂|.
double sup_abs(const std::vector<double>& sigma);

// X_λ in every column, with ∂X_λ at interior columns (NaN at the edges).
struct GraphSample {
  GraphPosition pos;
  double dX = std::numeric_limits<double>::quiet_NaN();
};
std::vector<GraphSample> graph_profile(const Field& f, double lambda);

// CSV emitters, one row per call; the column header first when asked.
void write_graph_csv(std::ostream& os, double t, const std::vector<GraphSample>& g, bool header);
void write_ray_csv(std::ostream& os, double t, Vec2 e, const RayPosition& r, bool header);
void write_sigma_csv(std::ostream& os, double t, double sup_sigma2, bool header);
void write_defect_csv(std::ostream& os, double t, Vec2 center, const PlanarityDefect& d, bool header);

}  // namespace rds
