#pragma once

// Experiment configuration: JSON in, validated RunConfig out, plus the
// canonical form whose hash tags every artifact.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rds/solver.hpp"

namespace rds {

// A support or reaction as written: kind plus parameters. Numbers stay
// numbers; the subgraph tag is the only string parameter.
struct SpecEntry {
  std::string kind;
  std::map<std::string, std::variant<double, std::string>> params;

  // "kind,k=v,..." with keys sorted.
  std::string canonical() const;
};

struct GridConfig {
  GridMode mode = GridMode::plane;
  int radial_dim = 2;
  Window window{-10.0, 10.0, -10.0, 10.0};  // line: xmin/xmax; radial: xmax = rmax
  double h = 0.1;
};

struct Diagnostic {
  std::string kind;  // ray, graph, sigma2, planarity, hausdorff
  std::map<std::string, std::variant<double, std::string, std::vector<double>>> params;
};

struct ExperimentConfig {
  std::string scenario;
  SpecEntry support;
  SpecEntry reaction{"kpp_logistic", {{"rate", 1.0}}};
  GridConfig grid;
  double t_final = 10.0;
  double dt = 0.0;
  double sigma_cfl = 0.9;
  std::vector<double> snapshots;  // explicit times; empty means `every`
  double snapshot_every = 0.0;    // 0: final time only
  double eps_b = 1e-4;
  std::vector<std::string> sentinel_faces{"left", "right", "bottom", "top"};
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 1;
  std::string output = "out";

  SupportSpec make_support() const;
  ReactionTerm make_reaction() const;
  Grid make_grid() const;
  std::vector<double> snapshot_times() const;
  RunConfig to_run_config() const;
};

// Throws ConfigError carrying the 1-based line and column of the offending
// token. Unknown keys are errors and suggest the nearest known key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON: sorted keys, every default spelled out.
std::string to_json(const ExperimentConfig& c, int indent = 2);
// FNV-1a 64 of the compact canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);
std::string fnv1a_hex(const std::string& bytes);

// Closest candidate within edit distance 2, if any.
std::optional<std::string> suggest(const std::string& word, const std::vector<std::string>& candidates);

// P5 graymap, u = 0 black, u = 1 white, first grid row on top. Throws
// DomainError for fields that are not planar.
void render_preview(const Field& f, const std::string& path);

}  // namespace rds
