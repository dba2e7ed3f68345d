#pragma once

// Reaction terms f on [0,1] for u_t = Δu + f(u), their classification, and the
// sampled check of the invasion property.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rds/common.hpp"

namespace rds {

enum class ReactionKind {
  zero,              // f ≡ 0, pure diffusion
  kpp_logistic,      // r s(1-s)
  monostable_power,  // r s^p (1-s)
  ignition,          // r (s-α)(1-s) on (α,1], 0 on [0,α]
  bistable,          // r s(1-s)(s-α)
  tristable,         // -r s(s-α)(s-β)(s-γ)(s-1)
  tabulated,         // monotone cubic through user knots
};

std::string to_string(ReactionKind kind);
ReactionKind reaction_kind_from_string(const std::string& name);

struct TabulatedCurve;

class ReactionTerm {
 public:
  static ReactionTerm zero();
  static ReactionTerm kpp_logistic(double rate = 1.0);
  static ReactionTerm monostable_power(double p, double rate = 1.0);
  static ReactionTerm ignition(double alpha, double rate = 1.0);
  static ReactionTerm bistable(double alpha, double rate = 1.0);
  static ReactionTerm tristable(double alpha, double beta, double gamma_zero, double rate = 1.0);
  static ReactionTerm tabulated(std::vector<double> knots, std::vector<double> values);

  // Build from a kind name plus named parameters (config files, CLI specs).
  static ReactionTerm from_params(const std::string& kind, const std::map<std::string, double>& params);
  // "bistable,alpha=0.25" style spec.
  static ReactionTerm parse(const std::string& spec);

  // f restricted to [lo,hi] and rescaled to a reaction on [0,1]:
  // g(v) = f(lo + (hi-lo) v) / (hi-lo). Fronts of g and of f on [lo,hi]
  // share the same speed.
  ReactionTerm restricted(double lo, double hi) const;

  // Throws DomainError when s is outside [0,1] by more than 1e-12.
  double eval(double s) const;
  double derivative(double s) const;
  // Unchecked evaluation used inside solver kernels (s may leave [0,1] by
  // rounding).
  double operator()(double s) const noexcept;

  ReactionKind kind() const noexcept { return kind_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  double param(const std::string& key) const;
  double f_prime_at_zero() const { return derivative(0.0); }
  bool is_restricted() const noexcept { return lo_ != 0.0 || hi_ != 1.0; }

  // Canonical text: kind plus sorted parameters.
  std::string describe() const;

  // sup_{s in (0,1]} f(s)/s on a sampled grid.
  double sup_growth_ratio() const;
  // Minimum of f'(s) on a sampled grid (monotone-scheme time step bound).
  double min_derivative() const;

  // Sampled Fisher-KPP test: f > 0 on (0,1) and f(s)/s nonincreasing.
  bool is_kpp(double step = 1e-3) const;

 private:
  double base_eval(double s) const noexcept;
  double base_derivative(double s) const;

  ReactionKind kind_ = ReactionKind::zero;
  std::map<std::string, double> params_;
  double rate_ = 1.0;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;  // kind-specific shape constants
  double lo_ = 0.0, hi_ = 1.0;
  std::shared_ptr<const TabulatedCurve> table_;
};

// ∫_t^1 f(s) ds by adaptive Gauss-Kronrod, absolute error <= 1e-10.
double tail_integral(const ReactionTerm& f, double t);

struct InvasionVerdict {
  bool holds = false;
  std::optional<double> theta;  // smallest sampled θ with f > 0 on [θ,1)
  bool hair_trigger = false;
  bool indeterminate = false;   // a sign change hides inside one sample step
  std::string notes;
};

// Sampled check of f > 0 on [θ,1) plus ∫_t^1 f > 0 for all t in [0,1).
// `dimension` only enters the hair-trigger test f(s)/s^{1+2/N}.
InvasionVerdict check_invasion(const ReactionTerm& f, int dimension = 1, double step = 1e-3);

}  // namespace rds
