#pragma once

// Traveling fronts φ(x·e - ct) connecting 1 to 0: phase-plane shooting,
// minimal speeds, and the two terrace speeds of a tristable reaction.

#include <string>
#include <vector>

#include "rds/reaction.hpp"

namespace rds {

enum class FrontMethod { closed_form_kpp, shooting_bisection };

struct FrontSolution {
  double speed = 0.0;
  std::vector<double> z;    // uniform grid
  std::vector<double> phi;  // strictly decreasing, φ(z_0) >= 1-1e-3, φ(z_end) <= 1e-3
  FrontMethod method = FrontMethod::shooting_bisection;
  double residual = 0.0;    // sup |φ'' + cφ' + f(φ)| by centered differences
};

// How a trajectory leaving (φ,φ') = (1,0) along its unstable manifold ends.
enum class ShotOutcome {
  connects,    // reaches φ = 0 with φ' ~ 0, no sign change of φ'
  overshoot,   // crosses φ = 0 with φ' < 0: speed too small
  undershoot,  // φ' returns to 0 while φ > 0: speed too large
  focus,       // origin is a spiral (c < 2√f'(0)): no monotone front
};

struct ShotResult {
  ShotOutcome outcome = ShotOutcome::overshoot;
  double psi_at_zero = 0.0;  // φ' when φ reached 0 (overshoot/connects)
  double phi_turn = 0.0;     // φ where φ' vanished (undershoot)
  long steps = 0;
};

struct ShootingOptions {
  double phase_tol = 1e-8;   // tolerance on φ and on the φ' sign test
  double manifold_offset = 1e-6;
  long step_budget = 2'000'000;
};

// Integrates dψ/dφ = -c - f(φ)/ψ from the unstable manifold of (1,0).
ShotResult shoot(const ReactionTerm& f, double c, const ShootingOptions& opt = {});

// True iff the trajectory is a decreasing connection from 1 to 0.
// Throws Inconclusive when the step budget runs out.
bool front_exists(const ReactionTerm& f, double c, const ShootingOptions& opt = {});

// 2√f'(0) for reactions passing the sampled KPP test with f'(0) > 0.
double kpp_min_speed(const ReactionTerm& f);

struct MinSpeedOptions {
  double speed_tol = 1e-9;
  ShootingOptions shooting{};
  double profile_dz = 1e-3;
};

// Bisection on the shooting outcome over [0, 2√(sup f(s)/s) + 1].
FrontSolution min_speed(const ReactionTerm& f, const MinSpeedOptions& opt = {});

// Profile at a given speed, integrated on a uniform z-grid.
FrontSolution front_profile(const ReactionTerm& f, double c, double dz = 1e-3);

// The KPP front: speed 2√f'(0) with its profile.
FrontSolution kpp_front(const ReactionTerm& f, double dz = 1e-3);

// sup |φ'' + cφ' + f(φ)| on interior samples (centered differences).
double profile_residual(const ReactionTerm& f, double c, const std::vector<double>& z,
                        const std::vector<double>& phi);

enum class TerraceVerdict {
  terrace_expected,  // c1 >= c2: no single front from 1 to 0
  single_front,      // c1 < c2
  degenerate,        // a sub-front has no positive speed
};

std::string to_string(TerraceVerdict v);

struct TerraceSpeeds {
  double c1 = 0.0;  // front β -> 0
  double c2 = 0.0;  // front 1 -> β
  TerraceVerdict verdict = TerraceVerdict::degenerate;
  std::string notes;
};

TerraceSpeeds terrace_speeds(const ReactionTerm& f, const MinSpeedOptions& opt = {});

}  // namespace rds
