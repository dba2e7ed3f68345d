#pragma once

// Explicit finite differences for u_t = Δu + f(u) on a line, a plane or a
// radially symmetric grid in N dimensions.

#include <functional>
#include <string>
#include <vector>

#include "rds/geometry.hpp"
#include "rds/reaction.hpp"

namespace rds {

enum class GridMode : std::uint8_t { line = 0, plane = 1, radial = 2 };

std::string to_string(GridMode m);

// Cell-centred grid. Cell (i,j) sits at origin + (i h, j h); ny == 1 unless
// mode == plane. In radial mode x is the radius and origin.x must be h/2.
struct Grid {
  GridMode mode = GridMode::plane;
  int radial_dim = 2;
  Vec2 origin{};
  double h = 0.1;
  std::size_t nx = 1, ny = 1;

  static Grid line(double xmin, double xmax, double h);
  static Grid plane(const Window& w, double h);
  static Grid radial(int n, double rmax, double h);

  std::size_t size() const { return nx * ny; }
  Vec2 center(std::size_t i, std::size_t j) const { return {origin.x + h * i, origin.y + h * j}; }
  // Dimension of the physical space: 1, 2 or N.
  int space_dim() const;
  // Stencil weight in the CFL bound dt <= σ h² / (2 dim_factor).
  double dim_factor() const;
  Window window() const;
  bool operator==(const Grid& o) const;
};

double cfl_bound(const Grid& g, double sigma = 0.9);

struct Field {
  Grid grid;
  std::vector<double> u;
  double t = 0.0;
  ReactionTerm reaction = ReactionTerm::zero();
  std::string provenance;

  double at(std::size_t i, std::size_t j = 0) const { return u[j * grid.nx + i]; }
  double& at(std::size_t i, std::size_t j = 0) { return u[j * grid.nx + i]; }
  // Bilinear between cell centres, constant over the outer half cell;
  // nullopt beyond that.
  std::optional<double> sample(Vec2 x) const;
};

// 1 on cell centres in U, 0 elsewhere. Warnings go to *warnings.
Field rasterize_initial(const SupportSpec& u, const Grid& g, const ReactionTerm& f,
                        std::vector<std::string>* warnings = nullptr);

// One explicit Euler step of the full right-hand side. Throws SchemeError when
// dt breaks the CFL bound, or when the final clamp would move a value by more
// than 1e-12. Returns the largest clamp applied.
double step(Field& field, double dt, Exec exec = Exec::parallel);

enum Face : unsigned {
  face_left = 1u,
  face_right = 2u,
  face_bottom = 4u,
  face_top = 8u,
  face_all = 15u,
};

struct RunConfig {
  SupportSpec support = SupportSpec::empty();
  ReactionTerm reaction = ReactionTerm::kpp_logistic();
  Grid grid;
  double dt = 0.0;  // 0: σ_cfl h² / (2 dim_factor)
  double sigma_cfl = 0.9;
  double t_final = 1.0;
  std::vector<double> snapshot_times;
  double eps_b = 1e-4;
  unsigned sentinel_faces = face_all;
  Exec exec = Exec::parallel;
  std::string provenance;
};

struct Snapshot {
  Field field;
  bool contaminated = false;
  double boundary_deviation = 0.0;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  bool contaminated = false;
  double dt = 0.0;
  std::size_t steps = 0;
  double max_clamp = 0.0;
};

double resolve_dt(const RunConfig& cfg);

// Integrates to t_final. Snapshots fall on the nearest completed step and
// record its exact time; t_final is always the last one. With `keep` false
// the snapshots are only passed to the observer.
RunResult run(const RunConfig& cfg, const std::function<void(const Snapshot&)>& observer = {}, bool keep = true);
// Same, from an arbitrary initial field on cfg.grid.
RunResult run_from(Field initial, const RunConfig& cfg, const std::function<void(const Snapshot&)>& observer = {},
                   bool keep = true);

// u_A <= u_B + 1e-10 at every snapshot of two runs on one grid.
bool comparison_check(const RunConfig& a, const RunConfig& b);
bool comparison_check(const Field& a0, const Field& b0, const RunConfig& cfg);

// Speed of the slowest travelling wave of the linearised scheme
// u_t = D_h u + f'(0) u with explicit Euler step dt; tends to 2√f'(0).
double discrete_kpp_speed(double f_prime_zero, double h, double dt);

void write_snapshot(const Field& f, const std::string& path);
// Writes to path.part and renames over path.
void write_file_atomic(const std::string& path, const std::string& bytes);
// Throws FormatError for a bad magic, mode or byte order and TruncationError
// for a short file.
Field read_snapshot(const std::string& path);

}  // namespace rds
