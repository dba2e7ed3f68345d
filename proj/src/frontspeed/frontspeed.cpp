#include "rds/frontspeed.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace rds {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kClip = 1e-3;

double unstable_eigenvalue_at_one(const ReactionTerm& f, double c) {
  const double fp1 = f.derivative(1.0);
  if (!(fp1 < 0.0)) throw DomainError("front shooting needs f'(1) < 0 (state 1 must be stable)");
  return 0.5 * (-c + std::sqrt(c * c - 4.0 * fp1));
}

bool reaches_minimal_side(ShotOutcome o) {
  return o == ShotOutcome::connects || o == ShotOutcome::undershoot;
}

}  // namespace

ShotResult shoot(const ReactionTerm& f, double c, const ShootingOptions& opt) {
  if (!(c >= 0.0)) throw DomainError("front speed must be nonnegative");
  ShotResult r;
  const double fp0 = f.derivative(0.0);
  if (fp0 > 0.0 && c < 2.0 * std::sqrt(fp0)) {
    r.outcome = ShotOutcome::focus;
    return r;
  }

  using State = std::array<double, 1>;
  const double delta = opt.manifold_offset;
  const double mu = unstable_eigenvalue_at_one(f, c);
  State psi{-mu * delta};
  double phi = 1.0 - delta;

  auto rhs = [&](const State& y, State& dy, double p) { dy[0] = -c - f(p) / y[0]; };
  auto stepper = odeint::make_controlled(1e-13, 1e-11, odeint::runge_kutta_dopri5<State>());

  double dphi = -1e-4;
  while (r.steps < opt.step_budget) {
    if (phi <= 1e-15) break;
    double trial = std::max(dphi, -phi);
    const auto res = stepper.try_step(rhs, psi, phi, trial);
    dphi = trial;
    if (res == odeint::fail) {
      if (std::abs(dphi) < 1e-14) {
        // Step collapse: φ' is turning through zero.
        r.phi_turn = phi;
        r.outcome = phi <= opt.phase_tol ? ShotOutcome::connects : ShotOutcome::undershoot;
        return r;
      }
      continue;
    }
    ++r.steps;
    if (!std::isfinite(psi[0]) || psi[0] >= 0.0) {
      r.phi_turn = phi;
      r.outcome = phi <= opt.phase_tol ? ShotOutcome::connects : ShotOutcome::undershoot;
      return r;
    }
  }
  if (r.steps >= opt.step_budget) throw Inconclusive("front shooting exceeded its step budget");
  r.psi_at_zero = psi[0];
  r.outcome = psi[0] >= -opt.phase_tol ? ShotOutcome::connects : ShotOutcome::overshoot;
  return r;
}

bool front_exists(const ReactionTerm& f, double c, const ShootingOptions& opt) {
  return shoot(f, c, opt).outcome == ShotOutcome::connects;
}

double kpp_min_speed(const ReactionTerm& f) {
  if (!f.is_kpp()) throw DomainError("kpp_min_speed: reaction '" + f.describe() + "' is not of KPP type");
  const double fp0 = f.f_prime_at_zero();
  if (!(fp0 > 0.0)) throw DomainError("kpp_min_speed: f'(0) must be positive");
  return 2.0 * std::sqrt(fp0);
}

double profile_residual(const ReactionTerm& f, double c, const std::vector<double>& z,
                        const std::vector<double>& phi) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
    const double dz = z[i + 1] - z[i];
    const double d2 = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (dz * dz);
    const double d1 = (phi[i + 1] - phi[i - 1]) / (2.0 * dz);
    worst = std::max(worst, std::abs(d2 + c * d1 + f(phi[i])));
  }
  return worst;
}

FrontSolution front_profile(const ReactionTerm& f, double c, double dz) {
  // Classical RK4 on (φ, φ') with uniform z steps, started on the linearised
  // unstable manifold of (1,0) inside the clip band.
  const double delta = 0.5 * kClip;
  const double mu = unstable_eigenvalue_at_one(f, c);
  double phi = 1.0 - delta;
  double psi = -mu * delta;
  auto acc = [&](double p, double q) { return -c * q - f(p); };

  FrontSolution sol;
  sol.speed = c;
  sol.z.push_back(0.0);
  sol.phi.push_back(phi);
  const long budget = static_cast<long>(5e7);
  for (long i = 1; i <= budget; ++i) {
    const double k1p = psi, k1q = acc(phi, psi);
    const double k2p = psi + 0.5 * dz * k1q, k2q = acc(phi + 0.5 * dz * k1p, psi + 0.5 * dz * k1q);
    const double k3p = psi + 0.5 * dz * k2q, k3q = acc(phi + 0.5 * dz * k2p, psi + 0.5 * dz * k2q);
    const double k4p = psi + dz * k3q, k4q = acc(phi + dz * k3p, psi + dz * k3q);
    phi += dz / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    psi += dz / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    if (!(psi < 0.0) || !(phi > 0.0)) {
      throw Inconclusive("front profile at c=" + std::to_string(c) + " is not monotone above the clip level");
    }
    sol.z.push_back(i * dz);
    sol.phi.push_back(phi);
    if (phi <= kClip) break;
  }
  if (sol.phi.back() > kClip) throw Inconclusive("front profile did not reach the clip level");
  sol.residual = profile_residual(f, c, sol.z, sol.phi);
  return sol;
}

FrontSolution min_speed(const ReactionTerm& f, const MinSpeedOptions& opt) {
  double lo = 0.0;
  double hi = 2.0 * std::sqrt(f.sup_growth_ratio()) + 1.0;
  // Any front satisfies c ∫ φ'^2 dz = ∫_0^1 f, so c > 0 needs a positive integral.
  if (!(tail_integral(f, 0.0) > 1e-12) || reaches_minimal_side(shoot(f, lo, opt.shooting).outcome)) {
    throw DomainError("no positive front speed for reaction '" + f.describe() + "'");
  }
  if (!reaches_minimal_side(shoot(f, hi, opt.shooting).outcome)) {
    throw DomainError("no front speed in the bracket for reaction '" + f.describe() + "'");
  }
  while (hi - lo > opt.speed_tol) {
    const double mid = 0.5 * (lo + hi);
    (reaches_minimal_side(shoot(f, mid, opt.shooting).outcome) ? hi : lo) = mid;
  }
  FrontSolution sol = front_profile(f, hi, opt.profile_dz);
  sol.method = FrontMethod::shooting_bisection;
  return sol;
}

FrontSolution kpp_front(const ReactionTerm& f, double dz) {
  FrontSolution sol = front_profile(f, kpp_min_speed(f), dz);
  sol.method = FrontMethod::closed_form_kpp;
  return sol;
}

std::string to_string(TerraceVerdict v) {
  switch (v) {
    case TerraceVerdict::terrace_expected: return "no single front from 1 to 0; terrace expected";
    case TerraceVerdict::single_front: return "single front from 1 to 0";
    case TerraceVerdict::degenerate: return "degenerate";
  }
  return "unknown";
}

TerraceSpeeds terrace_speeds(const ReactionTerm& f, const MinSpeedOptions& opt) {
  if (f.kind() != ReactionKind::tristable || f.is_restricted()) {
    throw DomainError("terrace_speeds needs an unrestricted tristable reaction");
  }
  const double alpha = f.param("alpha"), beta = f.param("beta"), gamma = f.param("gamma");
  // Sampled sign pattern: f<0 on (0,α)∪(β,γ), f>0 on (α,β)∪(γ,1).
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    if (s == alpha || s == beta || s == gamma) continue;
    const bool negative = s < alpha || (s > beta && s < gamma);
    if (negative ? !(f(s) < 0.0) : !(f(s) > 0.0)) throw DomainError("reaction fails the tristable sign pattern");
  }

  TerraceSpeeds out;
  const double lower_integral = tail_integral(f, 0.0) - tail_integral(f, beta);
  const double upper_integral = tail_integral(f, beta);
  if (!(lower_integral > 1e-10) || !(upper_integral > 1e-10)) {
    out.notes = "a sub-interval integral is not positive; its front has no positive speed";
    return out;
  }
  try {
    out.c1 = min_speed(f.restricted(0.0, beta), opt).speed;
    out.c2 = min_speed(f.restricted(beta, 1.0), opt).speed;
  } catch (const DomainError& e) {
    out.notes = e.what();
    return out;
  }
  out.verdict = out.c1 >= out.c2 ? TerraceVerdict::terrace_expected : TerraceVerdict::single_front;
  return out;
}

}  // namespace rds
