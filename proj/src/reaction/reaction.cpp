#include "rds/reaction.hpp"

#include <algorithm>
#include <cmath>
// pchip.hpp in Boost 1.74 calls unqualified isnan.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <sstream>

namespace rds {

struct TabulatedCurve {
  std::vector<double> knots;
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

namespace {

constexpr double kDomainTol = 1e-12;

double required(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError("reaction parameter '" + key + "' is required");
  return it->second;
}

double optional_param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

void check_unit_interval_param(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw DomainError(std::string("reaction parameter ") + name + " must lie in (0,1)");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_string(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::zero: return "zero";
    case ReactionKind::kpp_logistic: return "kpp_logistic";
    case ReactionKind::monostable_power: return "monostable_power";
    case ReactionKind::ignition: return "ignition";
    case ReactionKind::bistable: return "bistable";
    case ReactionKind::tristable: return "tristable";
    case ReactionKind::tabulated: return "tabulated";
  }
  return "unknown";
}

ReactionKind reaction_kind_from_string(const std::string& name) {
  for (auto k : {ReactionKind::zero, ReactionKind::kpp_logistic, ReactionKind::monostable_power,
                 ReactionKind::ignition, ReactionKind::bistable, ReactionKind::tristable,
                 ReactionKind::tabulated}) {
    if (to_string(k) == name) return k;
  }
  if (name == "logistic" || name == "kpp") return ReactionKind::kpp_logistic;
  throw ConfigError("unknown reaction kind '" + name + "'");
}

ReactionTerm ReactionTerm::zero() {
  ReactionTerm f;
  f.kind_ = ReactionKind::zero;
  return f;
}

ReactionTerm ReactionTerm::kpp_logistic(double rate) {
  if (!(rate > 0.0)) throw DomainError("logistic rate must be positive");
  ReactionTerm f;
  f.kind_ = ReactionKind::kpp_logistic;
  f.rate_ = rate;
  f.params_ = {{"rate", rate}};
  return f;
}

ReactionTerm ReactionTerm::monostable_power(double p, double rate) {
  if (!(p >= 1.0)) throw DomainError("monostable power p must be >= 1");
  ReactionTerm f;
  f.kind_ = ReactionKind::monostable_power;
  f.rate_ = rate;
  f.a_ = p;
  f.params_ = {{"p", p}, {"rate", rate}};
  return f;
}

ReactionTerm ReactionTerm::ignition(double alpha, double rate) {
  check_unit_interval_param(alpha, "alpha");
  ReactionTerm f;
  f.kind_ = ReactionKind::ignition;
  f.rate_ = rate;
  f.a_ = alpha;
  f.params_ = {{"alpha", alpha}, {"rate", rate}};
  return f;
}

ReactionTerm ReactionTerm::bistable(double alpha, double rate) {
  check_unit_interval_param(alpha, "alpha");
  ReactionTerm f;
  f.kind_ = ReactionKind::bistable;
  f.rate_ = rate;
  f.a_ = alpha;
  f.params_ = {{"alpha", alpha}, {"rate", rate}};
  return f;
}

ReactionTerm ReactionTerm::tristable(double alpha, double beta, double gamma_zero, double rate) {
  if (!(0.0 < alpha && alpha < beta && beta < gamma_zero && gamma_zero < 1.0)) {
    throw DomainError("tristable zeros must satisfy 0 < alpha < beta < gamma < 1");
  }
  ReactionTerm f;
  f.kind_ = ReactionKind::tristable;
  f.rate_ = rate;
  f.a_ = alpha;
  f.b_ = beta;
  f.c_ = gamma_zero;
  f.params_ = {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma_zero}, {"rate", rate}};
  return f;
}

ReactionTerm ReactionTerm::tabulated(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 4 || knots.size() != values.size()) {
    throw DomainError("tabulated reaction needs >= 4 matching knots and values");
  }
  if (std::abs(knots.front()) > kDomainTol || std::abs(knots.back() - 1.0) > kDomainTol) {
    throw DomainError("tabulated reaction knots must span exactly [0,1]");
  }
  if (!std::is_sorted(knots.begin(), knots.end()) ||
      std::adjacent_find(knots.begin(), knots.end()) != knots.end()) {
    throw DomainError("tabulated reaction knots must be strictly increasing");
  }
  values.front() = 0.0;
  values.back() = 0.0;
  ReactionTerm f;
  f.kind_ = ReactionKind::tabulated;
  f.params_ = {{"knots", static_cast<double>(knots.size())}};
  auto kn = knots;
  f.table_ = std::make_shared<const TabulatedCurve>(
      TabulatedCurve{std::move(kn), boost::math::interpolators::pchip<std::vector<double>>(
                                        std::move(knots), std::move(values))});
  return f;
}

ReactionTerm ReactionTerm::from_params(const std::string& kind, const std::map<std::string, double>& p) {
  static const std::map<std::string, std::vector<std::string>> allowed = {
      {"zero", {}},
      {"kpp_logistic", {"rate"}},
      {"monostable_power", {"p", "rate"}},
      {"ignition", {"alpha", "rate"}},
      {"bistable", {"alpha", "rate"}},
      {"tristable", {"alpha", "beta", "gamma", "rate"}},
  };
  const auto k = reaction_kind_from_string(kind);
  const auto& keys = allowed.at(to_string(k));
  for (const auto& [key, _] : p) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown parameter '" + key + "' for reaction kind '" + to_string(k) + "'");
    }
  }
  const double rate = optional_param(p, "rate", 1.0);
  switch (k) {
    case ReactionKind::zero: return zero();
    case ReactionKind::kpp_logistic: return kpp_logistic(rate);
    case ReactionKind::monostable_power: return monostable_power(required(p, "p"), rate);
    case ReactionKind::ignition: return ignition(required(p, "alpha"), rate);
    case ReactionKind::bistable: return bistable(required(p, "alpha"), rate);
    case ReactionKind::tristable:
      return tristable(required(p, "alpha"), required(p, "beta"), required(p, "gamma"), rate);
    case ReactionKind::tabulated: break;
  }
  throw ConfigError("tabulated reactions are built from knot arrays, not scalar parameters");
}

ReactionTerm ReactionTerm::parse(const std::string& spec) {
  std::stringstream ss(spec);
  std::string item;
  std::string kind;
  std::map<std::string, double> params;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!kind.empty()) throw ConfigError("reaction spec has two kind names: '" + spec + "'");
      kind = item;
      continue;
    }
    const auto key = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    if (key == "kind") {
      kind = value;
      continue;
    }
    try {
      params[key] = std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError("reaction parameter '" + key + "' is not a number: '" + value + "'");
    }
  }
  if (kind.empty()) throw ConfigError("reaction spec names no kind: '" + spec + "'");
  return from_params(kind, params);
}

ReactionTerm ReactionTerm::restricted(double lo, double hi) const {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw DomainError("restriction window must satisfy 0 <= lo < hi <= 1");
  ReactionTerm g = *this;
  const double width = hi_ - lo_;
  g.lo_ = lo_ + width * lo;
  g.hi_ = lo_ + width * hi;
  return g;
}

double ReactionTerm::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) throw DomainError("reaction has no parameter '" + key + "'");
  return it->second;
}

double ReactionTerm::base_eval(double s) const noexcept {
  switch (kind_) {
    case ReactionKind::zero: return 0.0;
    case ReactionKind::kpp_logistic: return rate_ * s * (1.0 - s);
    case ReactionKind::monostable_power: return s > 0.0 ? rate_ * std::pow(s, a_) * (1.0 - s) : 0.0;
    case ReactionKind::ignition: return s > a_ ? rate_ * (s - a_) * (1.0 - s) : 0.0;
    case ReactionKind::bistable: return rate_ * s * (1.0 - s) * (s - a_);
    case ReactionKind::tristable: return -rate_ * s * (s - a_) * (s - b_) * (s - c_) * (s - 1.0);
    case ReactionKind::tabulated: return table_->spline(std::clamp(s, 0.0, 1.0));
  }
  return 0.0;
}

double ReactionTerm::base_derivative(double s) const {
  switch (kind_) {
    case ReactionKind::zero: return 0.0;
    case ReactionKind::kpp_logistic: return rate_ * (1.0 - 2.0 * s);
    case ReactionKind::monostable_power:
      if (s <= 0.0) return a_ == 1.0 ? rate_ : 0.0;
      return rate_ * (a_ * std::pow(s, a_ - 1.0) * (1.0 - s) - std::pow(s, a_));
    case ReactionKind::ignition: return s > a_ ? rate_ * ((1.0 - s) - (s - a_)) : 0.0;
    case ReactionKind::bistable:
      // d/ds [s(1-s)(s-α)] = -3s² + 2(1+α)s - α
      return rate_ * (-3.0 * s * s + 2.0 * (1.0 + a_) * s - a_);
    case ReactionKind::tristable: {
      const double roots[5] = {0.0, a_, b_, c_, 1.0};
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) {
        double prod = 1.0;
        for (int j = 0; j < 5; ++j)
          if (j != i) prod *= s - roots[j];
        sum += prod;
      }
      return -rate_ * sum;
    }
    case ReactionKind::tabulated: return table_->spline.prime(std::clamp(s, 0.0, 1.0));
  }
  return 0.0;
}

double ReactionTerm::operator()(double s) const noexcept {
  if (!is_restricted()) return base_eval(s);
  const double w = hi_ - lo_;
  return base_eval(lo_ + w * s) / w;
}

double ReactionTerm::eval(double s) const {
  if (!(s >= -kDomainTol && s <= 1.0 + kDomainTol)) {
    throw DomainError("reaction evaluated outside [0,1] at s=" + std::to_string(s));
  }
  s = std::clamp(s, 0.0, 1.0);
  if (s == 0.0 || s == 1.0) return 0.0;
  return (*this)(s);
}

double ReactionTerm::derivative(double s) const {
  if (!(s >= -kDomainTol && s <= 1.0 + kDomainTol)) {
    throw DomainError("reaction derivative outside [0,1] at s=" + std::to_string(s));
  }
  s = std::clamp(s, 0.0, 1.0);
  return base_derivative(lo_ + (hi_ - lo_) * s);
}

std::string ReactionTerm::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  for (const auto& [k, v] : params_) os << ',' << k << '=' << v;
  if (is_restricted()) os << ",window=[" << lo_ << ',' << hi_ << ']';
  return os.str();
}

double ReactionTerm::sup_growth_ratio() const {
  double best = std::max(0.0, derivative(0.0));
  constexpr int n = 4000;
  for (int i = 1; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    best = std::max(best, (*this)(s) / s);
  }
  return best;
}

double ReactionTerm::min_derivative() const {
  double lo = kInf;
  constexpr int n = 2000;
  for (int i = 0; i <= n; ++i) lo = std::min(lo, derivative(static_cast<double>(i) / n));
  return lo;
}

bool ReactionTerm::is_kpp(double step) const {
  if (kind_ == ReactionKind::zero) return false;
  const int n = static_cast<int>(std::round(1.0 / step));
  double prev_ratio = kInf;
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    const double v = (*this)(s);
    if (!(v > 0.0)) return false;
    const double ratio = v / s;
    if (ratio > prev_ratio * (1.0 + 1e-12)) return false;
    prev_ratio = ratio;
  }
  return true;
}

double tail_integral(const ReactionTerm& f, double t) {
  if (!(t >= -kDomainTol && t < 1.0)) throw DomainError("tail_integral needs t in [0,1)");
  t = std::max(t, 0.0);
  // Split at kinks (ignition threshold, tabulated knots) so each piece is smooth.
  std::vector<double> cuts{t};
  if (f.kind() == ReactionKind::ignition && !f.is_restricted()) {
    const double a = f.param("alpha");
    if (a > t) cuts.push_back(a);
  }
  cuts.push_back(1.0);
  auto integrand = [&f](double s) { return f(s); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 15,
                                                                           1e-14, &err);
  }
  return total;
}

InvasionVerdict check_invasion(const ReactionTerm& f, int dimension, double step) {
  InvasionVerdict v;
  const int n = static_cast<int>(std::round(1.0 / step));
  std::vector<double> s(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    s[i] = static_cast<double>(i) / n;
    fs[i] = f(s[i]);
  }
  fs[0] = fs[n] = 0.0;

  // Two sign changes hidden between neighbouring samples.
  for (int i = 1; i + 1 < n; ++i) {
    const double mid = f(0.5 * (s[i] + s[i + 1]));
    if ((fs[i] > 0 && fs[i + 1] > 0 && mid < 0) || (fs[i] < 0 && fs[i + 1] < 0 && mid > 0)) {
      v.indeterminate = true;
      v.notes = "sign change within one sample step near s=" + std::to_string(s[i]);
      return v;
    }
  }

  // θ: smallest sampled value with f > 0 on the samples of [θ,1).
  int k = n - 1;
  while (k >= 1 && fs[k] > 0.0) --k;
  if (k < n - 1) v.theta = s[k + 1];

  // ∫_t^1 f > 0 on every sampled t, accumulated from the right.
  bool integral_ok = true;
  double acc = 0.0;
  auto integrand = [&f](double x) { return f(x); };
  for (int i = n - 1; i >= 0; --i) {
    double lo = s[i], hi = s[i + 1];
    double piece = 0.0;
    if (f.kind() == ReactionKind::ignition && !f.is_restricted()) {
      const double a = f.param("alpha");
      if (lo < a && a < hi) {
        piece += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, a);
        lo = a;
      }
    }
    piece += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, hi);
    acc += piece;
    if (!(acc > 1e-10)) {
      integral_ok = false;
      v.notes = "tail integral not positive at t=" + std::to_string(s[i]);
      break;
    }
  }

  v.holds = v.theta.has_value() && integral_ok;
  if (!v.theta) v.notes = "f is not positive on any sampled [theta,1)";

  bool positive = true;
  for (int i = 1; i < n; ++i) positive = positive && fs[i] > 0.0;
  if (positive) {
    // liminf f(s)/s^{1+2/N} on s = 2^-k: the ratio must not keep decaying.
    const double q = 1.0 + 2.0 / dimension;
    auto ratio = [&](int kk) {
      const double x = std::ldexp(1.0, -kk);
      return f(x) / std::pow(x, q);
    };
    const double r30 = ratio(30), r40 = ratio(40);
    v.hair_trigger = r40 > 0.0 && r40 >= 0.5 * r30;
  }
  return v;
}

}  // namespace rds
