#include "rds/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

namespace rds {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

// Positions of keys in the raw text, by JSON pointer. nlohmann does not keep
// them, and the text has already parsed, so this scanner can trust its input.
class Locator {
 public:
  explicit Locator(const std::string& s) : s_(s) {
    skip();
    value("");
  }

  std::pair<int, int> at(const std::string& pointer) const {
    auto it = pos_.find(pointer);
    std::size_t p = it == pos_.end() ? 0 : it->second;
    int line = 1, col = 1;
    for (std::size_t k = 0; k < p && k < s_.size(); ++k) {
      if (s_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  std::string string() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }
  void value(const std::string& path) {
    skip();
    if (i_ >= s_.size()) return;
    if (!pos_.count(path)) pos_[path] = i_;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip();
      while (i_ < s_.size() && s_[i_] != '}') {
        const std::size_t key_at = i_;
        const std::string child = path + "/" + escape(string());
        pos_[child] = key_at;
        skip();
        ++i_;  // ':'
        value(child);
        skip();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(path + "/" + std::to_string(k));
        skip();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '"') {
      string();
    } else {
      while (i_ < s_.size() && !std::strchr(",]} \t\r\n", s_[i_])) ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  std::map<std::string, std::size_t> pos_;
};

class Reader {
 public:
  explicit Reader(const Locator& loc) : loc_(loc) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    const auto [line, col] = loc_.at(pointer);
    throw ConfigError(msg, line, col);
  }

  void allow(const json& obj, const std::string& ptr, const std::vector<std::string>& keys) const {
    if (!obj.is_object()) fail(ptr, (ptr.empty() ? std::string("config") : ptr) + " must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
      std::string msg = "unknown key \"" + k + "\"" + (ptr.empty() ? "" : " in " + ptr);
      if (auto s = suggest(k, keys)) msg += "; did you mean \"" + *s + "\"?";
      fail(ptr + "/" + k, msg);
    }
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, ptr + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ptr, ptr + " must be finite");
    return d;
  }
  double positive(const json& v, const std::string& ptr) const {
    const double d = number(v, ptr);
    if (!(d > 0.0)) fail(ptr, ptr + " must be positive");
    return d;
  }
  std::string str(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, ptr + " must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(ptr, ptr + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], ptr + "/" + std::to_string(k)));
    return out;
  }

  SpecEntry spec(const json& v, const std::string& ptr) const {
    SpecEntry e;
    if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          e.kind = item;
          continue;
        }
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        double d = 0.0;
        const auto r = std::from_chars(val.data(), val.data() + val.size(), d);
        if (r.ec == std::errc() && r.ptr == val.data() + val.size())
          e.params[key] = d;
        else
          e.params[key] = val;
      }
    } else if (v.is_object()) {
      for (const auto& [k, x] : v.items()) {
        if (k == "kind") {
          e.kind = str(x, ptr + "/kind");
        } else if (x.is_number()) {
          e.params[k] = number(x, ptr + "/" + k);
        } else if (x.is_string()) {
          e.params[k] = x.get<std::string>();
        } else {
          fail(ptr + "/" + k, ptr + "/" + k + " must be a number or a string");
        }
      }
    } else {
      fail(ptr, ptr + " must be a spec string or an object");
    }
    if (e.kind.empty()) fail(ptr, ptr + " names no kind");
    return e;
  }

 private:
  const Locator& loc_;
};

const std::vector<std::string> kTop = {"scenario",   "support",     "reaction", "grid", "time", "boundary",
                                       "diagnostics", "tolerances", "seed",     "output"};
const std::vector<std::string> kFaces = {"left", "right", "bottom", "top"};
const std::vector<std::string> kTolerances = {"speed", "lag", "defect", "hausdorff", "flatten", "plateau"};

const std::map<std::string, std::vector<std::string>> kDiagnosticKeys = {
    {"ray", {"kind", "lambda", "directions_deg", "mode"}},
    {"graph", {"kind", "lambda", "x_prime"}},
    {"sigma2", {"kind"}},
    {"planarity", {"kind", "lambda", "x_prime", "radius", "g_min"}},
    {"hausdorff", {"kind", "lambda", "mode", "R"}},
};

json spec_json(const SpecEntry& e) {
  json j = json::object();
  j["kind"] = e.kind;
  for (const auto& [k, v] : e.params) {
    if (std::holds_alternative<double>(v))
      j[k] = std::get<double>(v);
    else
      j[k] = std::get<std::string>(v);
  }
  return j;
}

}  // namespace

std::string SpecEntry::canonical() const {
  std::string out = kind;
  for (const auto& [k, v] : params)
    out += "," + k + "=" + (std::holds_alternative<double>(v) ? num(std::get<double>(v)) : std::get<std::string>(v));
  return out;
}

std::optional<std::string> suggest(const std::string& word, const std::vector<std::string>& candidates) {
  auto distance = [](const std::string& a, const std::string& b) {
    // Optimal string alignment: transpositions count once.
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
      for (std::size_t j = 1; j <= b.size(); ++j) {
        d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
        if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
          d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    return d[a.size()][b.size()];
  };
  std::optional<std::string> best;
  std::size_t best_d = 3;
  for (const auto& c : candidates) {
    const auto dd = distance(word, c);
    if (dd < best_d) {
      best_d = dd;
      best = c;
    }
  }
  return best;
}

SupportSpec ExperimentConfig::make_support() const {
  if (support.kind == "empty") return SupportSpec::empty(grid.mode == GridMode::plane ? 2 : 1);
  std::map<std::string, std::string> p;
  for (const auto& [k, v] : support.params)
    p[k] = std::holds_alternative<double>(v) ? num(std::get<double>(v)) : std::get<std::string>(v);
  return SupportSpec::from_params(support.kind, p);
}

ReactionTerm ExperimentConfig::make_reaction() const {
  std::map<std::string, double> p;
  for (const auto& [k, v] : reaction.params) {
    if (!std::holds_alternative<double>(v)) throw ConfigError("reaction parameter '" + k + "' must be a number");
    p[k] = std::get<double>(v);
  }
  return ReactionTerm::from_params(reaction.kind, p);
}

Grid ExperimentConfig::make_grid() const {
  switch (grid.mode) {
    case GridMode::line: return Grid::line(grid.window.xmin, grid.window.xmax, grid.h);
    case GridMode::radial: return Grid::radial(grid.radial_dim, grid.window.xmax, grid.h);
    case GridMode::plane: break;
  }
  return Grid::plane(grid.window, grid.h);
}

std::vector<double> ExperimentConfig::snapshot_times() const {
  if (!snapshots.empty()) return snapshots;
  std::vector<double> out;
  if (snapshot_every > 0.0) {
    const auto n = static_cast<std::size_t>(std::floor(t_final / snapshot_every + 1e-9));
    for (std::size_t k = 1; k <= n; ++k) out.push_back(static_cast<double>(k) * snapshot_every);
  }
  return out;
}

RunConfig ExperimentConfig::to_run_config() const {
  RunConfig rc;
  rc.support = make_support();
  rc.reaction = make_reaction();
  rc.grid = make_grid();
  rc.dt = dt;
  rc.sigma_cfl = sigma_cfl;
  rc.t_final = t_final;
  rc.snapshot_times = snapshot_times();
  rc.eps_b = eps_b;
  rc.sentinel_faces = 0;
  for (const auto& f : sentinel_faces) {
    const auto k = std::find(kFaces.begin(), kFaces.end(), f) - kFaces.begin();
    rc.sentinel_faces |= 1u << k;
  }
  rc.provenance = scenario + " " + config_hash(*this);
  return rc;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    throw ConfigError("malformed config: " + (colon == std::string::npos ? what : what.substr(colon + 2)), line, col);
  }
  const Locator loc(text);
  const Reader r(loc);
  r.allow(root, "", kTop);

  ExperimentConfig c;
  if (!root.contains("scenario")) r.fail("", "missing key \"scenario\"");
  c.scenario = r.str(root["scenario"], "/scenario");
  if (!root.contains("support")) r.fail("", "missing key \"support\"");
  c.support = r.spec(root["support"], "/support");
  if (root.contains("reaction")) c.reaction = r.spec(root["reaction"], "/reaction");

  if (root.contains("grid")) {
    const json& g = root["grid"];
    r.allow(g, "/grid", {"mode", "dim", "window", "xmin", "xmax", "rmax", "h"});
    if (g.contains("mode")) {
      const std::string m = r.str(g["mode"], "/grid/mode");
      if (m == "plane") c.grid.mode = GridMode::plane;
      else if (m == "line") c.grid.mode = GridMode::line;
      else if (m == "radial") c.grid.mode = GridMode::radial;
      else r.fail("/grid/mode", "grid mode must be plane, line or radial, not \"" + m + "\"");
    }
    if (g.contains("h")) c.grid.h = r.positive(g["h"], "/grid/h");
    if (g.contains("dim")) {
      const double d = r.number(g["dim"], "/grid/dim");
      if (c.grid.mode != GridMode::radial || d != std::floor(d) || d < 1 || d > 4)
        r.fail("/grid/dim", "grid dim applies to radial grids and must be 1..4");
      c.grid.radial_dim = static_cast<int>(d);
    }
    if (g.contains("window")) {
      if (c.grid.mode != GridMode::plane) r.fail("/grid/window", "window applies to plane grids");
      const auto w = r.numbers(g["window"], "/grid/window");
      if (w.size() != 4 || !(w[0] < w[1]) || !(w[2] < w[3]))
        r.fail("/grid/window", "window must be [xmin, xmax, ymin, ymax] with min < max");
      c.grid.window = {w[0], w[1], w[2], w[3]};
    }
    if (g.contains("xmin") || g.contains("xmax")) {
      if (c.grid.mode != GridMode::line) r.fail("/grid", "xmin/xmax apply to line grids");
      if (g.contains("xmin")) c.grid.window.xmin = r.number(g["xmin"], "/grid/xmin");
      if (g.contains("xmax")) c.grid.window.xmax = r.number(g["xmax"], "/grid/xmax");
      if (!(c.grid.window.xmin < c.grid.window.xmax)) r.fail("/grid", "xmin must be below xmax");
    }
    if (g.contains("rmax")) {
      if (c.grid.mode != GridMode::radial) r.fail("/grid/rmax", "rmax applies to radial grids");
      c.grid.window.xmin = 0.0;
      c.grid.window.xmax = r.positive(g["rmax"], "/grid/rmax");
    }
  }
  if (c.grid.mode == GridMode::radial) c.grid.window.xmin = 0.0;

  if (root.contains("time")) {
    const json& t = root["time"];
    r.allow(t, "/time", {"T", "dt", "sigma_cfl", "snapshots", "snapshot_every"});
    if (t.contains("T")) c.t_final = r.positive(t["T"], "/time/T");
    if (t.contains("dt")) {
      c.dt = r.number(t["dt"], "/time/dt");
      if (c.dt < 0.0) r.fail("/time/dt", "dt must be positive, or 0 for automatic");
    }
    if (t.contains("sigma_cfl")) {
      c.sigma_cfl = r.positive(t["sigma_cfl"], "/time/sigma_cfl");
      if (c.sigma_cfl > 1.0) r.fail("/time/sigma_cfl", "sigma_cfl must not exceed 1");
    }
    if (t.contains("snapshots")) {
      c.snapshots = r.numbers(t["snapshots"], "/time/snapshots");
      for (std::size_t k = 0; k < c.snapshots.size(); ++k)
        if (c.snapshots[k] < 0.0 || c.snapshots[k] > c.t_final)
          r.fail("/time/snapshots/" + std::to_string(k), "snapshot time outside [0, T]");
    }
    if (t.contains("snapshot_every")) {
      c.snapshot_every = r.number(t["snapshot_every"], "/time/snapshot_every");
      if (c.snapshot_every < 0.0) r.fail("/time/snapshot_every", "snapshot_every must be positive, or 0 for none");
    }
  }

  if (root.contains("boundary")) {
    const json& b = root["boundary"];
    r.allow(b, "/boundary", {"eps_b", "sentinel_faces"});
    if (b.contains("eps_b")) c.eps_b = r.positive(b["eps_b"], "/boundary/eps_b");
    if (b.contains("sentinel_faces")) {
      const json& f = b["sentinel_faces"];
      if (!f.is_array()) r.fail("/boundary/sentinel_faces", "sentinel_faces must be an array of face names");
      c.sentinel_faces.clear();
      for (std::size_t k = 0; k < f.size(); ++k) {
        const std::string ptr = "/boundary/sentinel_faces/" + std::to_string(k);
        const std::string name = r.str(f[k], ptr);
        if (std::find(kFaces.begin(), kFaces.end(), name) == kFaces.end()) {
          std::string msg = "unknown face \"" + name + "\"";
          if (auto s = suggest(name, kFaces)) msg += "; did you mean \"" + *s + "\"?";
          r.fail(ptr, msg);
        }
        c.sentinel_faces.push_back(name);
      }
      std::sort(c.sentinel_faces.begin(), c.sentinel_faces.end(), [](const auto& a, const auto& b) {
        return std::find(kFaces.begin(), kFaces.end(), a) < std::find(kFaces.begin(), kFaces.end(), b);
      });
      c.sentinel_faces.erase(std::unique(c.sentinel_faces.begin(), c.sentinel_faces.end()), c.sentinel_faces.end());
    }
  }

  if (root.contains("diagnostics")) {
    const json& d = root["diagnostics"];
    if (!d.is_array()) r.fail("/diagnostics", "diagnostics must be an array");
    for (std::size_t k = 0; k < d.size(); ++k) {
      const std::string ptr = "/diagnostics/" + std::to_string(k);
      if (!d[k].is_object() || !d[k].contains("kind")) r.fail(ptr, "each diagnostic needs a kind");
      Diagnostic diag;
      diag.kind = r.str(d[k]["kind"], ptr + "/kind");
      auto it = kDiagnosticKeys.find(diag.kind);
      if (it == kDiagnosticKeys.end()) {
        std::vector<std::string> kinds;
        for (const auto& [name, keys] : kDiagnosticKeys) kinds.push_back(name);
        std::string msg = "unknown diagnostic \"" + diag.kind + "\"";
        if (auto s = suggest(diag.kind, kinds)) msg += "; did you mean \"" + *s + "\"?";
        r.fail(ptr + "/kind", msg);
      }
      r.allow(d[k], ptr, it->second);
      for (const auto& [key, v] : d[k].items()) {
        if (key == "kind") continue;
        const std::string kp = ptr + "/" + key;
        if (v.is_array()) diag.params[key] = r.numbers(v, kp);
        else if (v.is_string()) diag.params[key] = v.get<std::string>();
        else diag.params[key] = r.number(v, kp);
      }
      if (auto l = diag.params.find("lambda"); l != diag.params.end()) {
        const auto* lv = std::get_if<double>(&l->second);
        if (!lv || !(*lv > 0.0 && *lv < 1.0)) r.fail(ptr + "/lambda", "lambda must be a number in (0, 1)");
      }
      if (auto m = diag.params.find("mode"); m != diag.params.end()) {
        const std::vector<std::string> modes =
            diag.kind == "ray" ? std::vector<std::string>{"furthest", "first_exit"}
                               : std::vector<std::string>{"U_dilated", "W_local"};
        const auto* mv = std::get_if<std::string>(&m->second);
        if (!mv || std::find(modes.begin(), modes.end(), *mv) == modes.end()) {
          std::string msg = "mode must be one of " + modes[0] + ", " + modes[1];
          if (mv)
            if (auto s = suggest(*mv, modes)) msg += "; did you mean \"" + *s + "\"?";
          r.fail(ptr + "/mode", msg);
        }
      }
      c.diagnostics.push_back(std::move(diag));
    }
  }

  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    r.allow(t, "/tolerances", kTolerances);
    for (const auto& [k, v] : t.items()) c.tolerances[k] = r.positive(v, "/tolerances/" + k);
  }
  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_unsigned()) r.fail("/seed", "seed must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("output")) c.output = r.str(root["output"], "/output");

  // Semantic checks that need the assembled objects.
  try {
    (void)c.make_support();
  } catch (const Error& e) {
    r.fail("/support", std::string("bad support: ") + e.what());
  }
  try {
    (void)c.make_reaction();
  } catch (const Error& e) {
    r.fail("/reaction", std::string("bad reaction: ") + e.what());
  }
  Grid g;
  try {
    g = c.make_grid();
  } catch (const Error& e) {
    r.fail("/grid", std::string("bad grid: ") + e.what());
  }
  if (c.dt > 0.0) {
    const double bound = cfl_bound(g, 1.0);
    if (c.dt > bound)
      r.fail("/time/dt", "dt = " + num(c.dt) + " exceeds the CFL bound h^2/(2*" + num(g.dim_factor()) +
                             ") = " + num(bound));
  }
  try {
    (void)resolve_dt(c.to_run_config());
  } catch (const Error& e) {
    r.fail(root.contains("time") && root["time"].contains("dt") ? "/time/dt" : "/reaction", e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string to_json(const ExperimentConfig& c, int indent) {
  json j;
  j["scenario"] = c.scenario;
  j["support"] = spec_json(c.support);
  j["reaction"] = spec_json(c.reaction);
  json g;
  g["mode"] = to_string(c.grid.mode);
  g["h"] = c.grid.h;
  switch (c.grid.mode) {
    case GridMode::plane:
      g["window"] = {c.grid.window.xmin, c.grid.window.xmax, c.grid.window.ymin, c.grid.window.ymax};
      break;
    case GridMode::line:
      g["xmin"] = c.grid.window.xmin;
      g["xmax"] = c.grid.window.xmax;
      break;
    case GridMode::radial:
      g["dim"] = c.grid.radial_dim;
      g["rmax"] = c.grid.window.xmax;
      break;
  }
  j["grid"] = g;
  j["time"] = {{"T", c.t_final}, {"dt", c.dt}, {"sigma_cfl", c.sigma_cfl}, {"snapshots", c.snapshots},
               {"snapshot_every", c.snapshot_every}};
  j["boundary"] = {{"eps_b", c.eps_b}, {"sentinel_faces", c.sentinel_faces}};
  j["diagnostics"] = json::array();
  for (const auto& d : c.diagnostics) {
    json dj;
    dj["kind"] = d.kind;
    for (const auto& [k, v] : d.params) std::visit([&](const auto& x) { dj[k] = x; }, v);
    j["diagnostics"].push_back(dj);
  }
  j["tolerances"] = json::object();
  for (const auto& [k, v] : c.tolerances) j["tolerances"][k] = v;
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j.dump(indent);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& c) {
  // The output directory says where results go, not what they are.
  ExperimentConfig k = c;
  k.output.clear();
  return fnv1a_hex(to_json(k, -1));
}

void render_preview(const Field& f, const std::string& path) {
  if (f.grid.mode != GridMode::plane) throw DomainError("preview needs a plane field");
  std::string buf = "P5\n" + std::to_string(f.grid.nx) + " " + std::to_string(f.grid.ny) + "\n255\n";
  buf.reserve(buf.size() + f.u.size());
  for (double v : f.u) {
    const double c = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    buf.push_back(static_cast<char>(static_cast<unsigned char>(c)));
  }
  write_file_atomic(path, buf);
}

}  // namespace rds
