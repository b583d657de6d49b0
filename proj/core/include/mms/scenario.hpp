#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mms/space.hpp"

namespace mms {

// Scenario-driven runner: JSON config in, report JSON + CSV tables out.
// The JSON schema mirrors these structs field by field; see README.

struct SpaceSpec {
  std::string generator;  // "interval(L,n)" or "circle(L,n)"
  std::string file;       // alternative: path to an "mms v1" space file
  bool present() const { return !generator.empty() || !file.empty(); }
};

struct WarpConfig {
  std::string gen;             // "axis": w_d = w_m = arclength position on Y
  std::vector<double> wd, wm;  // inline fields, used when gen is empty
  std::string file;            // or CSV rows "index,wd,wm"
};

struct Toggles {
  bool doubling = false;
  bool poincare = false;
  bool cubes = false;
  bool calculus = false;
  bool sandwich = false;  // sandwich ratio + splitting-lemma ratio on the product
  bool smoothing = false;
  bool cutoffs = false;
  bool any() const {
    return doubling || poincare || cubes || calculus || sandwich || smoothing ||
           cutoffs;
  }
};

struct Tolerances {
  double relative = 0.05;  // continuum comparisons
  double identity = 1e-9;  // algebraic identities
  int boundary_hops = 3;   // interior = farther than this many hops from boundary
};

struct ScenarioParams {
  std::vector<int> k_list{4, 8, 16, 32};        // cube scales
  std::vector<std::array<int, 3>> schedule;     // cutoff rows (n, m, k)
  std::vector<double> radii;                    // doubling; empty -> default grid
  double lambda = 1.0;                          // Poincare dilation
  int poincare_center = -1;                     // -1 -> midpoint index
  double poincare_radius = -1.0;                // <=0 -> diameter/2
  int cutoff_x0 = 0;
  int cutoff_t0 = 0;
  int corpus_fields = 4;    // seeded tensor sums in the ratio corpora
  int calculus_pairs = 50;  // seeded field pairs per identity suite
  std::vector<std::string> named;  // named product fields (default: all)
  // Extra oracle checks for the unit cone (circle warped by w = t over
  // [0,1]): apex/rim distances vs the flat-disk formulas, total mass vs pi,
  // and the unit-gradient field t*cos(theta).
  bool cone_checks = false;
  Tolerances tol;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::string output_dir;  // empty -> no files written (report kept in memory)
  SpaceSpec x, y;
  std::string product = "none";  // "none", "cartesian" or "warped"
  WarpConfig warp;
  Toggles analyses;
  ScenarioParams params;
  std::string origin;  // source path; resolves relative file references
  std::vector<std::string> parse_notes;  // unknown-key diagnostics, surfaced by validate()

  static ScenarioConfig load_file(const std::string& path);
  static ScenarioConfig parse(const std::string& text, const std::string& origin);
};

// Config diagnostics without running anything; empty means valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

struct RunSummary {
  bool checks_pass = false;  // every enabled invariant check passed
  bool had_errors = false;   // some analysis failed and was isolated
  std::vector<std::string> failed_checks;
  std::vector<std::string> errors;  // "analysis: kind: message"
  std::string report_text;          // the persisted report.json bytes
  int exit_code() const { return checks_pass && !had_errors ? 0 : 1; }
};

// Executes enabled analyses in dependency order, isolating per-analysis
// errors; persists report.json and the CSV tables under output_dir.
// Config-level problems (missing files, bad specs) throw Error before any
// analysis runs.
RunSummary run_scenario(const ScenarioConfig& cfg);

}  // namespace mms
