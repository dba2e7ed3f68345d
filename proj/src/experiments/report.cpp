#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <map>
#include <sstream>

#include "rds/experiments.hpp"

namespace rds {

std::string to_string(Basis b) {
  switch (b) {
    case Basis::theory:
      return "theory";
    case Basis::derived:
      return "derived";
    case Basis::property:
      return "property";
  }
  return "?";
}

bool ExperimentReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Fields of one CSV record; quotes may wrap commas, doubled quotes escape.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw FormatError("unterminated quote in: " + line);
  return out;
}

double parse_num(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("not a number: '" + s + "'");
}

}  // namespace

std::string format_report(const ExperimentReport& r, bool with_runtime) {
  std::ostringstream os;
  os << "scenario " << r.scenario << "  config " << r.config_hash;
  if (with_runtime) os << "  runtime " << num(r.runtime_s) << " s";
  os << '\n';
  for (const auto& c : r.checks) {
    os << (c.pass ? "  PASS " : "  FAIL ");
    if (c.criterion > 0) os << "[" << c.criterion << "] ";
    os << c.name << ": " << num(c.measured) << " target " << c.target << " (" << to_string(c.basis) << ")";
    if (!c.note.empty()) os << "  " << c.note;
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
  os << (r.passed() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string checks_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "scenario,config_hash,criterion,name,measured,target,tolerance,basis,pass,note\n";
  for (const auto& c : r.checks)
    os << r.scenario << ',' << r.config_hash << ',' << c.criterion << ',' << csv_field(c.name) << ','
       << num(c.measured) << ',' << csv_field(c.target) << ',' << num(c.tolerance) << ',' << to_string(c.basis)
       << ',' << (c.pass ? 1 : 0) << ',' << csv_field(c.note) << '\n';
  return os.str();
}

void write_report(const ExperimentReport& r, const std::string& dir, bool with_runtime) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  write_file_atomic((d / "report.txt").string(), format_report(r, with_runtime));
  write_file_atomic((d / "checks.csv").string(), checks_csv(r));
  for (const auto& [name, text] : r.series) write_file_atomic((d / name).string(), text);
}

ExperimentReport parse_checks_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "scenario,config_hash,criterion,name,measured,target,tolerance,basis,pass,note")
    throw FormatError("not a checks table");
  ExperimentReport r;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 10) throw FormatError("expected 10 fields, got " + std::to_string(f.size()) + ": " + line);
    if (first) {
      r.scenario = f[0];
      r.config_hash = f[1];
      first = false;
    } else if (f[0] != r.scenario || f[1] != r.config_hash) {
      throw FormatError("rows from more than one run in one checks table");
    }
    Check c;
    c.criterion = static_cast<int>(parse_num(f[2]));
    c.name = f[3];
    c.measured = parse_num(f[4]);
    c.target = f[5];
    c.tolerance = parse_num(f[6]);
    if (f[7] == "theory") c.basis = Basis::theory;
    else if (f[7] == "derived") c.basis = Basis::derived;
    else if (f[7] == "property") c.basis = Basis::property;
    else throw FormatError("unknown basis '" + f[7] + "'");
    if (f[8] != "0" && f[8] != "1") throw FormatError("pass must be 0 or 1");
    c.pass = f[8] == "1";
    c.note = f[9];
    r.add(c);
  }
  return r;
}

std::vector<CriterionVerdict> summarize(const std::vector<ExperimentReport>& reports) {
  std::map<int, CriterionVerdict> m;
  for (const auto& r : reports)
    for (const auto& c : r.checks) {
      auto& v = m[c.criterion];
      v.criterion = c.criterion;
      ++v.checks;
      if (!c.pass && v.pass) {
        v.pass = false;
        v.scenario = r.scenario;
        v.first_failure = c;
      }
    }
  std::vector<CriterionVerdict> out;
  for (auto& [k, v] : m) out.push_back(v);
  return out;
}

std::string format_summary(const std::vector<CriterionVerdict>& v) {
  std::map<int, const CriterionVerdict*> m;
  for (const auto& x : v) m[x.criterion] = &x;
  std::ostringstream os;
  char buf[64];
  for (int k = 1; k <= 14; ++k) {
    std::snprintf(buf, sizeof buf, "criterion %2d  ", k);
    os << buf;
    const auto it = m.find(k);
    if (it == m.end()) {
      os << "SKIP  not run\n";
      continue;
    }
    const auto& x = *it->second;
    if (x.pass) {
      os << "PASS  " << x.checks << " checks\n";
    } else {
      const Check& c = x.first_failure;
      os << "FAIL  " << x.scenario << ": " << c.name << " = " << num(c.measured) << ", target " << c.target;
      if (!c.note.empty()) os << "; " << c.note;
      os << '\n';
    }
  }
  if (const auto it = m.find(0); it != m.end()) {
    const auto& x = *it->second;
    os << "supplementary " << (x.pass ? "PASS  " : "FAIL  ") << x.checks << " checks";
    if (!x.pass) os << "; first failure " << x.scenario << ": " << x.first_failure.name << " = "
                    << num(x.first_failure.measured) << ", target " << x.first_failure.target;
    os << '\n';
  }
  return os.str();
}

bool criteria_passed(const std::vector<CriterionVerdict>& v) {
  for (const auto& x : v)
    if (x.criterion > 0 && !x.pass) return false;
  return true;
}

}  // namespace rds
