// rds: command-line front end.
//
//   rds simulate --config run.json [--out DIR]
//   rds speed    --reaction bistable,alpha=0.25
//   rds geometry --support subgraph,tag=linear_cone --cstar 2 [--rho 1] [--out DIR]
//   rds verify   --suite quick [--jobs N] [--out DIR]
//   rds lag      --dir DIR [--lambda 0.5] [--x-prime 0] [--k-pred 3] [--cstar C]
//   rds report   --dir DIR
//
// RDS_THREADS sets the OpenMP thread count. RDS_DETERMINISTIC=1 leaves wall
// clock times out of every artifact so repeated runs compare byte for byte.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rds/config.hpp"
#include "rds/experiments.hpp"

namespace fs = std::filesystem;
using namespace rds;

namespace {

bool deterministic() {
  const char* v = std::getenv("RDS_DETERMINISTIC");
  return v && *v && std::string(v) != "0";
}

void apply_thread_env() {
  const char* v = std::getenv("RDS_THREADS");
  if (!v || !*v) return;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError(std::string("RDS_THREADS must be a positive integer, got ") + v);
  omp_set_num_threads(static_cast<int>(n));
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// ---- simulate ----

int cmd_simulate(const std::string& config_path, std::string out) {
  const auto c = load_config(config_path);
  if (out.empty()) out = c.output;
  fs::create_directories(out);
  const auto hash = config_hash(c);
  DiagnosticRecorder diagnostics(c);

  std::ostringstream manifest;
  manifest << "time,file,contaminated,boundary_deviation,config_hash\n";
  std::size_t k = 0;
  Field last;
  const auto result = run(
      c.to_run_config(),
      [&](const Snapshot& s) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%05zu.rdf", k++);
        write_snapshot(s.field, (fs::path(out) / name).string());
        manifest << fmt(s.field.t) << ',' << name << ',' << (s.contaminated ? 1 : 0) << ','
                 << fmt(s.boundary_deviation) << ',' << hash << '\n';
        diagnostics.observe(s);
        last = s.field;
      },
      false);

  write_file_atomic((fs::path(out) / "manifest.csv").string(), manifest.str());
  write_file_atomic((fs::path(out) / "config.json").string(), to_json(c) + "\n");
  for (const auto& [name, text] : diagnostics.files()) write_file_atomic((fs::path(out) / name).string(), text);
  if (last.grid.mode == GridMode::plane) render_preview(last, (fs::path(out) / "preview.pgm").string());

  std::printf("%s: %zu snapshots, %zu steps, dt %s, config %s%s\n", out.c_str(), k, result.steps,
              fmt(result.dt).c_str(), hash.c_str(),
              result.contaminated ? ", CONTAMINATED (boundary moved beyond eps_b)" : "");
  return 0;
}

// ---- speed ----

int cmd_speed(const std::string& spec) {
  const auto f = ReactionTerm::parse(spec);
  const bool tristable = f.kind() == ReactionKind::tristable;
  double c = kNaN, residual = kNaN;
  std::string method = "none", note;
  try {
    const auto sol = f.is_kpp() ? kpp_front(f) : min_speed(f);
    c = sol.speed;
    residual = sol.residual;
    method = sol.method == FrontMethod::closed_form_kpp ? "closed_form_kpp" : "shooting_bisection";
  } catch (const Error& e) {
    note = e.what();
  }
  std::cout << "reaction,c_star,method,residual";
  if (tristable) std::cout << ",c1,c2,terrace";
  std::cout << ",note\n";
  std::string tail;
  if (tristable) {
    const auto t = terrace_speeds(f);
    // With a terrace the shooting speed belongs to the upper sub-front only.
    if (t.verdict == TerraceVerdict::terrace_expected) {
      c = residual = kNaN;
      method = "none";
    }
    tail = "," + fmt(t.c1) + "," + fmt(t.c2) + "," + to_string(t.verdict);
    if (note.empty()) note = t.notes;
  }
  std::replace(note.begin(), note.end(), '"', '\'');
  std::cout << '"' << f.describe() << "\"," << fmt(c) << ',' << method << ',' << fmt(residual) << tail << ",\""
            << note << "\"\n";
  return 0;
}

// ---- geometry ----

int cmd_geometry(const std::string& spec, double c_star, double rho, const std::string& out) {
  if (!(c_star > 0.0)) throw ConfigError("--cstar must be positive");
  const auto u = SupportSpec::parse(spec);
  const auto dirs = direction_sets(u);

  std::ostringstream dcsv;
  dcsv << "angle_deg,margin,class\n";
  for (const auto& s : dirs.samples)
    dcsv << fmt(s.angle * 180.0 / kPi) << ',' << fmt(s.margin) << ',' << to_string(s.cls) << '\n';

  // 𝒲 is star-shaped about the origin: its boundary is w(e) e.
  std::ostringstream wcsv;
  wcsv << "angle_deg,w,x,y\n";
  for (int a = 0; a < 360; ++a) {
    const double th = a * kPi / 180.0;
    const Vec2 e{std::cos(th), std::sin(th)};
    const double w = predicted_speed(e, dirs, c_star).value;
    wcsv << a << ',' << fmt(w) << ',' << fmt(std::isfinite(w) ? w * e.x : w) << ','
         << fmt(std::isfinite(w) ? w * e.y : w) << '\n';
  }

  std::ostringstream v;
  v << "support: " << u.describe() << '\n' << "c_star: " << fmt(c_star) << '\n';
  const auto hu = check_hypothesis_U(u, rho);
  v << "hyp_U: " << (hu.holds ? "holds" : "fails") << "  rho " << fmt(rho) << ", missing directions "
    << hu.missing_dirs.size() << (hu.uncertain ? ", some only uncertain" : "") << ", resolution limited "
    << hu.resolution_limited << '\n';
  const auto ri = rho_interior(u, rho);
  v << "dUrho: " << (ri.empty ? "U_rho empty" : std::isfinite(ri.hausdorff_estimate) ? "finite" : "infinite")
    << "  d_H(U, U_rho) " << fmt(ri.hausdorff_estimate) << (ri.exact ? ", exact" : "");
  if (!ri.notes.empty()) v << ", " << ri.notes;
  v << '\n';
  const auto bc = ballcone_profile(u, {1.0, 2.0, 4.0, 8.0, 16.0});
  v << "ballcone: " << (bc.plausible ? "plausible" : "not supported") << "  nonincreasing "
    << (bc.nonincreasing ? "yes" : "no") << ", profile";
  for (const auto& p : bc.profile)
    v << ' ' << fmt(p.R) << ':' << fmt(p.sup_opening) << (p.lower_bound_only ? "(lb)" : "");
  v << '\n';

  if (out.empty()) {
    std::cout << "# directions.csv\n" << dcsv.str() << "\n# W_boundary.csv\n" << wcsv.str() << "\n# verdicts\n"
              << v.str();
  } else {
    fs::create_directories(out);
    write_file_atomic((fs::path(out) / "directions.csv").string(), dcsv.str());
    write_file_atomic((fs::path(out) / "W_boundary.csv").string(), wcsv.str());
    write_file_atomic((fs::path(out) / "verdicts.txt").string(), v.str());
    std::cout << v.str();
  }
  return 0;
}

// ---- verify ----

int cmd_verify(const std::string& suite_name, int jobs, const std::string& out) {
  const auto reports = run_suite(suite(suite_name), jobs);
  const bool with_runtime = !deterministic();
  for (const auto& r : reports) {
    std::cout << format_report(r, with_runtime);
    write_report(r, (fs::path(out) / r.scenario).string(), with_runtime);
  }
  const auto v = summarize(reports);
  std::cout << '\n' << format_summary(v);
  return criteria_passed(v) ? 0 : 1;
}

// ---- lag ----

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  return f;
}

int cmd_lag(const std::string& dir, double lambda, double x_prime, double k_pred, double c_override) {
  const auto c = parse_config(slurp(fs::path(dir) / "config.json"));
  const auto hash = config_hash(c);
  std::istringstream manifest(slurp(fs::path(dir) / "manifest.csv"));
  std::string line;
  std::getline(manifest, line);
  std::vector<Snapshot> snaps;
  while (std::getline(manifest, line)) {
    const auto f = split(line);
    if (f.size() < 5) throw FormatError("bad manifest row: " + line);
    if (f[4] != hash) throw FormatError("manifest row from config " + f[4] + ", directory holds " + hash);
    Snapshot s;
    s.field = read_snapshot((fs::path(dir) / f[1]).string());
    s.contaminated = f[2] == "1";
    snaps.push_back(std::move(s));
  }

  double c_star = c_override;
  std::string source = "given";
  if (std::isnan(c_star)) {
    const auto f = c.make_reaction();
    if (f.is_kpp()) {
      // The discrete front speed of the scheme, not its continuum limit.
      c_star = discrete_kpp_speed(f.f_prime_at_zero(), c.grid.h, resolve_dt(c.to_run_config()));
      source = "discrete scheme";
    } else {
      c_star = min_speed(f).speed;
      source = "travelling wave";
    }
  }
  const auto fit = lag_fit(snaps, lambda, x_prime, c_star, k_pred);

  std::ostringstream csv;
  csv << "config_hash,t,lag\n";
  for (const auto& [t, l] : fit.samples) csv << hash << ',' << fmt(t) << ',' << fmt(l) << '\n';
  write_file_atomic((fs::path(dir) / "lag.csv").string(), csv.str());

  std::cout << "c_star " << fmt(c_star) << " (" << source << ")\n"
            << "k_hat " << fmt(fit.k_hat) << "  k_pred " << fmt(k_pred) << '\n'
            << "intercept " << fmt(fit.intercept) << "  rms " << fmt(fit.residual_rms)
            << (fit.residual_warning ? "  (poor log fit)" : "") << '\n'
            << "window [" << fmt(fit.t_from) << ", " << fmt(fit.t_to) << "], " << fit.samples.size() << " samples\n";
  return 0;
}

// ---- report ----

int cmd_report(const std::string& dir) {
  std::vector<ExperimentReport> reports;
  std::map<std::string, std::string> hash_of;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "checks.csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no checks.csv under " + dir);

  for (const auto& p : files) {
    auto r = parse_checks_csv(slurp(p));
    const auto [it, fresh] = hash_of.emplace(r.scenario, r.config_hash);
    if (!fresh && it->second != r.config_hash)
      throw Error("refusing to aggregate scenario " + r.scenario + ": config hashes " + it->second + " and " +
                  r.config_hash + " differ");
    reports.push_back(std::move(r));
  }

  std::printf("%-24s %-16s %4s  %-4s  %-44s %12s  %s\n", "scenario", "config", "crit", "pass", "check", "measured",
              "target");
  for (const auto& r : reports)
    for (const auto& c : r.checks)
      std::printf("%-24s %-16s %4d  %-4s  %-44s %12s  %s\n", r.scenario.c_str(), r.config_hash.c_str(), c.criterion,
                  c.pass ? "PASS" : "FAIL", c.name.substr(0, 44).c_str(), fmt(c.measured).c_str(),
                  c.target.c_str());
  const auto v = summarize(reports);
  std::cout << '\n' << format_summary(v);
  return criteria_passed(v) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reaction-diffusion spreading experiments"};
  app.require_subcommand(1);

  std::string config, sim_out, geo_out, verify_out = "verify_out", spec, dir, suite_name = "acceptance";
  double c_star = kNaN, rho = 1.0, lambda = 0.5, x_prime = 0.0, k_pred = 3.0;
  int jobs = 1;

  auto* sim = app.add_subcommand("simulate", "run one config, write snapshots, manifest and diagnostics");
  sim->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "output directory (default: the config's output)");

  auto* speed = app.add_subcommand("speed", "minimal front speed of a reaction, as CSV");
  speed->add_option("--reaction", spec, "reaction spec, e.g. bistable,alpha=0.25")->required();

  auto* geo = app.add_subcommand("geometry", "direction sets, spreading set boundary and hypothesis verdicts");
  geo->add_option("--support", spec, "support spec, e.g. subgraph,tag=linear_cone")->required();
  geo->add_option("--cstar", c_star, "minimal speed c*")->required();
  geo->add_option("--rho", rho, "interior radius for the hypothesis checks");
  geo->add_option("--out", geo_out, "write CSVs and verdicts here instead of stdout");

  auto* verify = app.add_subcommand("verify", "run a scenario suite and write reports");
  verify->add_option("--suite", suite_name, "acceptance, quick, slow or a scenario name");
  verify->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);
  verify->add_option("--out", verify_out, "report directory")->capture_default_str();

  auto* lag = app.add_subcommand("lag", "fit the logarithmic lag of a simulate output");
  lag->add_option("--dir", dir, "simulate output directory")->required()->check(CLI::ExistingDirectory);
  lag->add_option("--lambda", lambda, "level")->check(CLI::Range(0.0, 1.0));
  lag->add_option("--x-prime", x_prime, "column x' (plane grids)");
  lag->add_option("--k-pred", k_pred, "predicted coefficient, reported alongside");
  lag->add_option("--cstar", c_star, "speed used in c t - X (default: the scheme's own front speed)");

  auto* report = app.add_subcommand("report", "aggregate checks.csv files into one table");
  report->add_option("--dir", dir, "directory searched recursively")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_env();
    if (*sim) return cmd_simulate(config, sim_out);
    if (*speed) return cmd_speed(spec);
    if (*geo) return cmd_geometry(spec, c_star, rho, geo_out);
    if (*verify) return cmd_verify(suite_name, jobs, verify_out);
    if (*lag) return cmd_lag(dir, lambda, x_prime, k_pred, c_star);
    if (*report) return cmd_report(dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rds: %s\n", e.what());
    return 2;
  }
  return 2;
}
