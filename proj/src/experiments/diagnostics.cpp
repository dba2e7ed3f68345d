#include <cmath>
#include <sstream>

#include "rds/experiments.hpp"
#include "rds/geometry.hpp"

namespace rds {

namespace {

double num_param(const Diagnostic& d, const std::string& key, double fallback) {
  const auto it = d.params.find(key);
  if (it == d.params.end()) return fallback;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  throw ConfigError("diagnostic " + d.kind + ": " + key + " must be a number");
}

std::string str_param(const Diagnostic& d, const std::string& key, const std::string& fallback) {
  const auto it = d.params.find(key);
  if (it == d.params.end()) return fallback;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  throw ConfigError("diagnostic " + d.kind + ": " + key + " must be a string");
}

std::vector<double> list_param(const Diagnostic& d, const std::string& key, std::vector<double> fallback) {
  const auto it = d.params.find(key);
  if (it == d.params.end()) return fallback;
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const auto* v = std::get_if<double>(&it->second)) return {*v};
  throw ConfigError("diagnostic " + d.kind + ": " + key + " must be a list of numbers");
}

RayMode ray_mode(const Diagnostic& d) {
  const auto m = str_param(d, "mode", "furthest");
  if (m == "furthest") return RayMode::furthest;
  if (m == "first_exit") return RayMode::first_exit;
  throw ConfigError("ray mode must be furthest or first_exit, got " + m);
}

HausdorffMode hausdorff_mode(const Diagnostic& d) {
  const auto m = str_param(d, "mode", "U_dilated");
  if (m == "U_dilated") return HausdorffMode::U_dilated;
  if (m == "W_local") return HausdorffMode::W_local;
  throw ConfigError("hausdorff mode must be U_dilated or W_local, got " + m);
}

unsigned face_bits(const std::vector<std::string>& faces) {
  unsigned bits = 0;
  for (const auto& f : faces) {
    if (f == "left") bits |= face_left;
    if (f == "right") bits |= face_right;
    if (f == "bottom") bits |= face_bottom;
    if (f == "top") bits |= face_top;
  }
  return bits;
}

// Prefixes every line with the hash column.
void append_tagged(std::string& out, const std::string& text, const std::string& hash) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const bool header = out.empty();
    out += (header ? "config_hash," : hash + ",") + line + '\n';
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

DiagnosticRecorder::DiagnosticRecorder(const ExperimentConfig& c)
    : config_(c), hash_(config_hash(c)), support_(c.make_support()) {
  const bool plane = c.grid.mode == GridMode::plane;
  for (const auto& d : c.diagnostics) {
    if ((d.kind == "sigma2" || d.kind == "planarity" || d.kind == "hausdorff") && !plane)
      throw ConfigError("diagnostic " + d.kind + " needs a plane grid");
    if (d.kind == "ray") (void)ray_mode(d);
    if (d.kind == "hausdorff" && std::isnan(c_star_)) {
      const auto f = c.make_reaction();
      c_star_ = f.is_kpp() ? kpp_min_speed(f) : min_speed(f).speed;
      if (hausdorff_mode(d) == HausdorffMode::W_local) W_ = envelope_W(direction_sets(support_), c_star_);
    }
  }
}

void DiagnosticRecorder::observe(const Snapshot& s) {
  const Field& f = s.field;
  const bool plane = f.grid.mode == GridMode::plane;
  for (std::size_t k = 0; k < config_.diagnostics.size(); ++k) {
    const auto& d = config_.diagnostics[k];
    const std::string name = "diag_" + std::to_string(k) + "_" + d.kind + ".csv";
    std::string& out = files_[name];
    const bool header = out.empty();
    const double lambda = num_param(d, "lambda", 0.5);
    std::ostringstream os;
    if (d.kind == "ray") {
      bool first = header;
      for (double deg : list_param(d, "directions_deg", {plane ? 90.0 : 0.0})) {
        const double a = deg * kPi / 180.0;
        const Vec2 e{std::cos(a), std::sin(a)};
        write_ray_csv(os, f.t, e, ray_position(f, e, lambda, ray_mode(d)), first);
        first = false;
      }
    } else if (d.kind == "graph") {
      auto g = graph_profile(f, lambda);
      if (d.params.count("x_prime")) g = {g[column_of(f, num_param(d, "x_prime", 0.0))]};
      write_graph_csv(os, f.t, g, header);
    } else if (d.kind == "sigma2") {
      write_sigma_csv(os, f.t, sup_abs(sigma_k_field(f, 2)), header);
    } else if (d.kind == "planarity") {
      const double xp = num_param(d, "x_prime", 0.0);
      const auto pos = graph_position(f, lambda, column_of(f, xp));
      const Vec2 center{xp, pos.value};
      write_defect_csv(os, f.t, center, planarity_defect(f, center, num_param(d, "radius", 5.0), num_param(d, "g_min", 1e-4)),
                       header);
    } else if (d.kind == "hausdorff") {
      HausdorffOptions opt;
      opt.mode = hausdorff_mode(d);
      opt.lambda = lambda;
      opt.c_star = c_star_;
      opt.R = num_param(d, "R", 4.0);
      opt.W = W_;
      // Faces nobody watches are taken as symmetry planes.
      opt.mirror_faces = face_all & ~face_bits(config_.sentinel_faces);
      if (header) os << "t,mode,distance,note\n";
      std::string note;
      double v = kNaN;
      try {
        v = f.t > 0.0 ? scaled_hausdorff(f, support_, opt) : kNaN;
      } catch (const Inconclusive& e) {
        note = e.what();
      }
      os << fmt(f.t) << ',' << str_param(d, "mode", "U_dilated") << ',' << fmt(v) << ",\"" << note << "\"\n";
    }
    append_tagged(out, os.str(), hash_);
  }
}

}  // namespace rds
