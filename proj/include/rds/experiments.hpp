#pragma once

// Measurements on solver output and the verdicts built from them: spreading
// speeds, Hausdorff convergence, logarithmic lags, flattening, symmetry and
// terraces.

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rds/config.hpp"
#include "rds/frontspeed.hpp"
#include "rds/levelsets.hpp"

namespace rds {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double slope = kNaN;
  double intercept = kNaN;
  double rms = kNaN;  // residual root mean square
  std::size_t n = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// ---- spreading speeds ----

struct RaySample {
  double t = 0.0;
  RayPosition ray;
  bool contaminated = false;
};

struct SpeedFit {
  double w_hat = kNaN;
  bool window_limited = false;
  double intercept = kNaN;
  double residual_rms = kNaN;
  std::size_t samples = 0;
  double t_from = 0.0, t_to = 0.0;
};

// Slope of R_λ(t) on [T/2, T]. Needs 8 samples; throws Inconclusive for a
// contaminated sample in the fit window.
SpeedFit fit_speed(const std::vector<RaySample>& samples);
SpeedFit estimate_speed(const std::vector<Snapshot>& snaps, Vec2 e, double lambda,
                        RayMode mode = RayMode::furthest);

// ---- logarithmic lag ----

struct PositionSample {
  double t = 0.0;
  double X = 0.0;
  bool valid = true;
  bool contaminated = false;
};

struct LagFit {
  double lambda = 0.5;
  double c_star = 2.0;  // speed used in lag = c t − X
  std::vector<std::pair<double, double>> samples;  // (t, lag) in the fit window
  double k_hat = kNaN;  // lag ≈ (k/c) ln t + b
  double intercept = kNaN;
  double residual_rms = kNaN;
  double k_pred = kNaN;
  double t_from = 0.0, t_to = 0.0;
  bool residual_warning = false;  // rms above 0.2
};

// Fit on [fit_from·T, T]. Requires a decade of samples overall.
LagFit fit_lag(const std::vector<PositionSample>& s, double c_star, double k_pred, double fit_from = 0.2);
// X_λ at column x' (plane) or along the single row (line, radial).
PositionSample front_position(const Snapshot& s, double lambda, double x_prime = 0.0);
LagFit lag_fit(const std::vector<Snapshot>& snaps, double lambda, double x_prime, double c_star, double k_pred);

// ---- Hausdorff convergence ----

enum class HausdorffMode { W_local, U_dilated };

struct HausdorffOptions {
  HausdorffMode mode = HausdorffMode::U_dilated;
  double lambda = 0.5;
  double c_star = 2.0;
  double R = 4.0;              // W_local radius, in scaled units
  SupportSpec W = SupportSpec::empty();  // spreading set, W_local only
  unsigned mirror_faces = 0;   // faces that are symmetry planes
};

// Distance at one snapshot, in scaled units. W_local throws Inconclusive when
// either set reaches a face that is not a mirror (the window guard).
double scaled_hausdorff(const Field& f, const SupportSpec& u, const HausdorffOptions& opt);

struct Trend {
  double slope = kNaN;       // least squares over the last half
  double final_value = kNaN;
  bool decreasing = false;   // slope < 0
  double nonincreasing_fraction = 0.0;
};

Trend last_half_trend(const std::vector<std::pair<double, double>>& series);

struct HausdorffSeries {
  std::vector<std::pair<double, double>> points;
  Trend trend;
};

HausdorffSeries hausdorff_convergence(const std::vector<Snapshot>& snaps, const SupportSpec& u,
                                      const HausdorffOptions& opt);

// ---- flattening and symmetry ----

// max |∂_{x'}X_λ| over valid columns with |x'| <= radius.
double max_graph_slope(const Field& f, double lambda, double radius);

struct FlatteningSeries {
  std::map<double, std::vector<std::pair<double, double>>> by_lambda;
  std::map<double, Trend> trend;
};

FlatteningSeries flattening_series(const std::vector<Snapshot>& snaps, const std::vector<double>& lambdas,
                                   double radius);

// A half-domain field on x' >= 0 unfolded into the full symmetric field.
Field unfold_left(const Field& f);

struct SymmetryPoint {
  double t = 0.0;
  double sup_sigma2 = 0.0;
  PlanarityDefect defect;
  Vec2 center;
};

// σ₂ over the whole field and the planarity defect in a window centred on the
// level set X_λ at x'.
SymmetryPoint symmetry_probe(const Field& f, double lambda, double x_prime, double radius);
std::vector<SymmetryPoint> symmetry_report(const std::vector<Snapshot>& snaps, double lambda, double x_prime,
                                           double radius);

struct PlanarBaseline {
  double sup_sigma2 = 0.0;  // measured on the planted profile
  double floor = 0.0;       // (h²/4) e_x² e_y² sup|ψ''ψ''''|
  Vec2 e;
};

// The KPP front profile of f planted as ψ(x·e − z0) on a plane grid. The
// default orientation is the diagonal, where the stencil error peaks.
PlanarBaseline planar_sigma2_baseline(const ReactionTerm& f, double h, Vec2 e = {0.7071067811865476, 0.7071067811865476});

// ---- terraces ----

struct TerraceResult {
  double c_low = kNaN;   // speed of the (1+β)/2 level set
  double c_high = kNaN;  // speed of the β/2 level set
  double plateau_deviation = kNaN;  // max |u − β| on the middle third at T
  bool terrace = false;
  std::string verdict;
};

TerraceResult terrace_detect(const std::vector<Snapshot>& snaps, double beta, double speed_tolerance = 0.1);

// ---- configured diagnostics ----

// Evaluates the diagnostics listed in a config on every snapshot it is shown
// and accumulates one CSV per diagnostic, config_hash in the first column.
// Throws ConfigError for diagnostics the grid cannot support.
class DiagnosticRecorder {
 public:
  explicit DiagnosticRecorder(const ExperimentConfig& c);
  void observe(const Snapshot& s);
  // "diag_<k>_<kind>.csv" -> CSV text
  const std::map<std::string, std::string>& files() const { return files_; }

 private:
  ExperimentConfig config_;
  std::string hash_;
  SupportSpec support_ = SupportSpec::empty();
  SupportSpec W_ = SupportSpec::empty();
  double c_star_ = kNaN;
  std::map<std::string, std::string> files_;
};

// ---- reports ----

enum class Basis { theory, derived, property };
std::string to_string(Basis b);

struct Check {
  int criterion = 0;  // acceptance criterion, 0 for supplementary checks
  std::string name;
  double measured = kNaN;
  std::string target;  // human-readable band, e.g. "[1.90, 2.02]"
  double tolerance = kNaN;
  Basis basis = Basis::theory;
  bool pass = false;
  std::string note;
};

struct ExperimentReport {
  std::string scenario;
  std::string config_hash;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> series;  // file name -> CSV text
  double runtime_s = 0.0;

  bool passed() const;
  void add(Check c) { checks.push_back(std::move(c)); }
};

std::string format_report(const ExperimentReport& r, bool with_runtime = true);
std::string checks_csv(const ExperimentReport& r);
// report.txt, checks.csv and each series into dir, each by atomic rename.
void write_report(const ExperimentReport& r, const std::string& dir, bool with_runtime = true);
// Inverse of checks_csv (series and warnings are not stored there). Throws
// FormatError on a malformed table or on rows from two scenarios.
ExperimentReport parse_checks_csv(const std::string& text);

// Verdict per criterion across reports; criterion 0 collects the
// supplementary checks.
struct CriterionVerdict {
  int criterion = 0;
  bool pass = true;
  std::size_t checks = 0;
  std::string scenario;  // of the first failing check
  Check first_failure;
};

std::vector<CriterionVerdict> summarize(const std::vector<ExperimentReport>& reports);
// One line per criterion 1..14 (SKIP when absent) plus the supplementary line.
std::string format_summary(const std::vector<CriterionVerdict>& v);
// True when every numbered criterion present passed.
bool criteria_passed(const std::vector<CriterionVerdict>& v);

// ---- Freidlin–Gärtner verification ----

struct FanOptions {
  std::vector<Vec2> directions;
  double lambda = 0.5;
  double tolerance = 0.08;
  int criterion = 0;
  double rho = 1.0;  // Hypothesis (U) radius
  DirectionOptions dirs;
  Exec exec = Exec::parallel;
};

// Runs cfg, fits w(e) on every fan direction and compares with the
// variational prediction; also checks u(T, T x) on points well inside and
// well outside the spreading set. `extra` sees every snapshot.
ExperimentReport verify_fg(const ExperimentConfig& cfg, const FanOptions& opt,
                           const std::function<void(const Snapshot&)>& extra = {});

// ---- scenarios ----

struct ScenarioInfo {
  std::string name;
  std::vector<int> criteria;
  bool slow = false;
  std::string summary;
};

const std::vector<ScenarioInfo>& scenario_catalog();
// acceptance (everything), quick (not slow), slow, or a single scenario name.
std::vector<std::string> suite(const std::string& name);

struct ScenarioOptions {
  Exec exec = Exec::parallel;
};

ExperimentReport run_scenario(const std::string& name, const ScenarioOptions& opt = {});
// Runs scenarios with up to `jobs` at once, in catalog order in the result.
std::vector<ExperimentReport> run_suite(const std::vector<std::string>& names, int jobs = 1,
                                        const ScenarioOptions& opt = {});

}  // namespace rds
