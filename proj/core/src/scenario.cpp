#include "mms/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "mms/analysis.hpp"
#include "mms/calculus.hpp"
#include "mms/corpus.hpp"
#include "mms/cubes.hpp"
#include "mms/error.hpp"
#include "mms/products.hpp"
#include "mms/rng.hpp"
#include "mms/tensorize.hpp"

namespace mms {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ------------------------------------------------------------- config parse

void expect_keys(const json& obj, const char* where,
                 std::initializer_list<const char*> allowed,
                 std::vector<std::string>& notes) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      notes.push_back(std::string("unknown key \"") + it.key() + "\" in " + where);
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return it->get<T>();
}

SpaceSpec parse_space(const json& obj, const char* where,
                      std::vector<std::string>& notes) {
  expect_keys(obj, where, {"generator", "file"}, notes);
  SpaceSpec s;
  s.generator = get_or<std::string>(obj, "generator", "");
  s.file = get_or<std::string>(obj, "file", "");
  return s;
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("config parse: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::config, "config must be a JSON object");

  ScenarioConfig cfg;
  cfg.origin = origin;
  std::vector<std::string> notes;  // surfaced through validate()
  try {
    expect_keys(root, "config",
                {"name", "seed", "output_dir", "space_x", "space_y", "product",
                 "warp", "analyses", "params"},
                notes);
    cfg.name = get_or<std::string>(root, "name", "scenario");
    cfg.seed = get_or<std::uint64_t>(root, "seed", 1);
    cfg.output_dir = get_or<std::string>(root, "output_dir", "");
    if (root.contains("space_x")) cfg.x = parse_space(root["space_x"], "space_x", notes);
    if (root.contains("space_y")) cfg.y = parse_space(root["space_y"], "space_y", notes);
    cfg.product = get_or<std::string>(root, "product", "none");
    if (root.contains("warp")) {
      const json& w = root["warp"];
      expect_keys(w, "warp", {"gen", "wd", "wm", "file"}, notes);
      cfg.warp.gen = get_or<std::string>(w, "gen", "");
      cfg.warp.wd = get_or<std::vector<double>>(w, "wd", {});
      cfg.warp.wm = get_or<std::vector<double>>(w, "wm", {});
      cfg.warp.file = get_or<std::string>(w, "file", "");
    }
    if (root.contains("analyses")) {
      const json& a = root["analyses"];
      expect_keys(a, "analyses",
                  {"doubling", "poincare", "cubes", "calculus", "sandwich",
                   "smoothing", "cutoffs"},
                  notes);
      cfg.analyses.doubling = get_or<bool>(a, "doubling", false);
      cfg.analyses.poincare = get_or<bool>(a, "poincare", false);
      cfg.analyses.cubes = get_or<bool>(a, "cubes", false);
      cfg.analyses.calculus = get_or<bool>(a, "calculus", false);
      cfg.analyses.sandwich = get_or<bool>(a, "sandwich", false);
      cfg.analyses.smoothing = get_or<bool>(a, "smoothing", false);
      cfg.analyses.cutoffs = get_or<bool>(a, "cutoffs", false);
    }
    if (root.contains("params")) {
      const json& p = root["params"];
      expect_keys(p, "params",
                  {"k_list", "schedule", "radii", "lambda", "poincare_center",
                   "poincare_radius", "cutoff_x0", "cutoff_t0", "corpus_fields",
                   "calculus_pairs", "named_fields", "cone_checks", "tolerances"},
                  notes);
      cfg.params.k_list = get_or<std::vector<int>>(p, "k_list", cfg.params.k_list);
      if (p.contains("schedule")) {
        cfg.params.schedule.clear();
        for (const json& row : p["schedule"]) {
          auto v = row.get<std::vector<int>>();
          if (v.size() != 3)
            fail(ErrorKind::config, "schedule rows must be [n, m, k] triples");
          cfg.params.schedule.push_back({v[0], v[1], v[2]});
        }
      }
      cfg.params.radii = get_or<std::vector<double>>(p, "radii", {});
      cfg.params.lambda = get_or<double>(p, "lambda", 1.0);
      cfg.params.poincare_center = get_or<int>(p, "poincare_center", -1);
      cfg.params.poincare_radius = get_or<double>(p, "poincare_radius", -1.0);
      cfg.params.cutoff_x0 = get_or<int>(p, "cutoff_x0", 0);
      cfg.params.cutoff_t0 = get_or<int>(p, "cutoff_t0", 0);
      cfg.params.corpus_fields = get_or<int>(p, "corpus_fields", 4);
      cfg.params.calculus_pairs = get_or<int>(p, "calculus_pairs", 50);
      cfg.params.named = get_or<std::vector<std::string>>(p, "named_fields",
                                                          named_field_names());
      cfg.params.cone_checks = get_or<bool>(p, "cone_checks", false);
      if (p.contains("tolerances")) {
        const json& t = p["tolerances"];
        expect_keys(t, "tolerances", {"relative", "identity", "boundary_hops"}, notes);
        cfg.params.tol.relative = get_or<double>(t, "relative", 0.05);
        cfg.params.tol.identity = get_or<double>(t, "identity", 1e-9);
        cfg.params.tol.boundary_hops = get_or<int>(t, "boundary_hops", 3);
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("config field: ") + e.what());
  }
  cfg.parse_notes = std::move(notes);
  return cfg;
}

ScenarioConfig ScenarioConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

namespace {

std::string resolve(const ScenarioConfig& cfg, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || cfg.origin.empty()) return path;
  return (fs::path(cfg.origin).parent_path() / p).string();
}

void validate_space(const ScenarioConfig& cfg, const SpaceSpec& s, const char* label,
                    std::vector<std::string>& out) {
  if (!s.generator.empty() && !s.file.empty())
    out.push_back(std::string(label) + ": give either a generator or a file, not both");
  if (!s.generator.empty()) {
    try {
      make_space(s.generator);
    } catch (const Error& e) {
      out.push_back(std::string(label) + ": " + e.what());
    }
  }
  if (!s.file.empty() && !fs::exists(resolve(cfg, s.file)))
    out.push_back(std::string(label) + ": file not found: " + resolve(cfg, s.file));
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> out = cfg.parse_notes;
  if (!cfg.x.present()) out.push_back("space_x is required");
  validate_space(cfg, cfg.x, "space_x", out);
  if (cfg.y.present()) validate_space(cfg, cfg.y, "space_y", out);

  if (cfg.product != "none" && cfg.product != "cartesian" && cfg.product != "warped")
    out.push_back("product must be \"none\", \"cartesian\" or \"warped\"");
  const bool has_product = cfg.product == "cartesian" || cfg.product == "warped";
  if (has_product && !cfg.y.present())
    out.push_back("a product needs space_y");
  if (cfg.product == "warped") {
    const bool inline_warp = !cfg.warp.wd.empty() || !cfg.warp.wm.empty();
    const int sources = (cfg.warp.gen.empty() ? 0 : 1) + (inline_warp ? 1 : 0) +
                        (cfg.warp.file.empty() ? 0 : 1);
    if (sources == 0) out.push_back("warped product needs a warp (gen, inline or file)");
    if (sources > 1) out.push_back("warp: give exactly one of gen, inline fields, file");
    if (!cfg.warp.gen.empty() && cfg.warp.gen != "axis")
      out.push_back("warp.gen must be \"axis\"");
    if (inline_warp && cfg.warp.wd.size() != cfg.warp.wm.size())
      out.push_back("warp.wd and warp.wm must have equal lengths");
    if (!cfg.warp.file.empty() && !fs::exists(resolve(cfg, cfg.warp.file)))
      out.push_back("warp.file not found: " + resolve(cfg, cfg.warp.file));
  }

  if ((cfg.analyses.sandwich || cfg.analyses.smoothing) && cfg.product != "cartesian")
    out.push_back("sandwich/smoothing need product = \"cartesian\"");
  if (cfg.analyses.cutoffs && cfg.product != "warped")
    out.push_back("cutoffs need product = \"warped\"");

  if ((cfg.analyses.cubes || cfg.analyses.smoothing) && cfg.params.k_list.empty())
    out.push_back("params.k_list must be nonempty");
  for (std::size_t i = 1; i < cfg.params.k_list.size(); ++i)
    if (cfg.params.k_list[i] <= cfg.params.k_list[i - 1]) {
      out.push_back("params.k_list must be strictly increasing");
      break;
    }
  for (int k : cfg.params.k_list)
    if (k < 1) out.push_back("params.k_list entries must be >= 1");

  if (cfg.analyses.cutoffs && cfg.params.schedule.empty())
    out.push_back("params.schedule must be nonempty for cutoffs");
  for (const auto& row : cfg.params.schedule)
    if (row[0] <= 1 || row[1] < 1 || row[2] < 1)
      out.push_back("schedule rows need n > 1, m >= 1, k >= 1");

  if (cfg.analyses.sandwich && cfg.params.corpus_fields < 0)
    out.push_back("params.corpus_fields must be >= 0");
  if (cfg.analyses.calculus && cfg.params.calculus_pairs < 1)
    out.push_back("params.calculus_pairs must be >= 1");
  for (const auto& n : cfg.params.named)
    if (!is_named_field(n)) out.push_back("unknown named field \"" + n + "\"");
  if (cfg.params.lambda < 1.0) out.push_back("params.lambda must be >= 1");
  if (cfg.params.tol.relative <= 0 || cfg.params.tol.identity <= 0)
    out.push_back("tolerances must be positive");
  if (cfg.params.tol.boundary_hops < 0)
    out.push_back("tolerances.boundary_hops must be >= 0");
  return out;
}

// ----------------------------------------------------------------- run

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
  }
};

json echo_config(const ScenarioConfig& cfg) {
  json e;
  e["name"] = cfg.name;
  e["seed"] = cfg.seed;
  e["output_dir"] = cfg.output_dir;
  e["space_x"] = {{"generator", cfg.x.generator}, {"file", cfg.x.file}};
  e["space_y"] = {{"generator", cfg.y.generator}, {"file", cfg.y.file}};
  e["product"] = cfg.product;
  e["warp"] = {{"gen", cfg.warp.gen},
               {"wd", cfg.warp.wd},
               {"wm", cfg.warp.wm},
               {"file", cfg.warp.file}};
  e["analyses"] = {{"doubling", cfg.analyses.doubling},
                   {"poincare", cfg.analyses.poincare},
                   {"cubes", cfg.analyses.cubes},
                   {"calculus", cfg.analyses.calculus},
                   {"sandwich", cfg.analyses.sandwich},
                   {"smoothing", cfg.analyses.smoothing},
                   {"cutoffs", cfg.analyses.cutoffs}};
  json sched = json::array();
  for (const auto& row : cfg.params.schedule) sched.push_back({row[0], row[1], row[2]});
  e["params"] = {{"k_list", cfg.params.k_list},
                 {"schedule", sched},
                 {"radii", cfg.params.radii},
                 {"lambda", cfg.params.lambda},
                 {"poincare_center", cfg.params.poincare_center},
                 {"poincare_radius", cfg.params.poincare_radius},
                 {"cutoff_x0", cfg.params.cutoff_x0},
                 {"cutoff_t0", cfg.params.cutoff_t0},
                 {"corpus_fields", cfg.params.corpus_fields},
                 {"calculus_pairs", cfg.params.calculus_pairs},
                 {"named_fields", cfg.params.named},
                 {"cone_checks", cfg.params.cone_checks},
                 {"tolerances",
                  {{"relative", cfg.params.tol.relative},
                   {"identity", cfg.params.tol.identity},
                   {"boundary_hops", cfg.params.tol.boundary_hops}}}};
  return e;
}

FiniteSpace build_space(const ScenarioConfig& cfg, const SpaceSpec& spec) {
  if (!spec.generator.empty()) return make_space(spec.generator);
  return FiniteSpace::load_file(resolve(cfg, spec.file));
}

WarpSpec build_warp(const ScenarioConfig& cfg, const FiniteSpace& y) {
  if (cfg.warp.gen == "axis") {
    std::vector<double> pos = axis_positions(y);
    return WarpSpec::make(y, pos, pos);
  }
  if (!cfg.warp.file.empty()) {
    std::ifstream in(resolve(cfg, cfg.warp.file));
    if (!in) fail(ErrorKind::io, "cannot open warp file: " + resolve(cfg, cfg.warp.file));
    std::vector<double> wd(y.size(), -1.0), wm(y.size(), -1.0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      int idx;
      double a, b;
      if (std::sscanf(line.c_str(), "%d ,%lf ,%lf", &idx, &a, &b) != 3)
        fail(ErrorKind::io, "warp file line " + std::to_string(lineno) +
                                ": expected index,wd,wm");
      if (idx < 0 || idx >= y.size())
        fail(ErrorKind::io, "warp file line " + std::to_string(lineno) +
                                ": index out of range");
      wd[idx] = a;
      wm[idx] = b;
    }
    for (int i = 0; i < y.size(); ++i)
      if (wd[i] < 0.0 || wm[i] < 0.0)
        fail(ErrorKind::io, "warp file misses point " + std::to_string(i));
    return WarpSpec::make(y, std::move(wd), std::move(wm));
  }
  if (static_cast<int>(cfg.warp.wd.size()) != y.size())
    fail(ErrorKind::config, "inline warp length != |Y|");
  return WarpSpec::make(y, cfg.warp.wd, cfg.warp.wm);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// state threaded through the analyses
struct RunState {
  const ScenarioConfig& cfg;
  json results = json::object();
  json constants = json::object();
  json checks = json::array();
  json timings = json::object();
  RunSummary summary;
  std::vector<std::pair<std::string, std::string>> csv_files;  // name -> content

  explicit RunState(const ScenarioConfig& c) : cfg(c) {}

  void check(const std::string& name, bool pass) {
    checks.push_back({{"name", name}, {"pass", pass}});
    if (!pass) summary.failed_checks.push_back(name);
  }

  template <class Fn>
  void analysis(const std::string& name, bool enabled, Fn&& fn) {
    if (!enabled) return;
    Timer timer;
    try {
      fn();
    } catch (const Error& e) {
      results[name]["error"] = {{"kind", to_string(e.kind())},
                                {"message", e.what()}};
      summary.errors.push_back(name + ": " + to_string(e.kind()) + ": " + e.what());
      summary.had_errors = true;
    }
    timings[name + "_ms"] = timer.ms();
  }
};

// --------------------------------------------------------------- analyses

void run_doubling(RunState& st, const FiniteSpace& space, const std::string& label) {
  const std::vector<double> radii =
      st.cfg.params.radii.empty() ? default_radii(space) : st.cfg.params.radii;
  RemarkCheck rc = verify_doubling_remark(space, radii);
  json r;
  r["radii"] = rc.report.radii;
  r["D"] = rc.report.measure_constant;
  r["C"] = rc.report.metric_constant;
  r["slack"] = rc.slack;
  r["measure_witness"] = {{"center", rc.report.measure_witness.center},
                          {"radius", rc.report.measure_witness.radius}};
  r["metric_witness"] = {{"center", rc.report.metric_witness.center},
                         {"radius", rc.report.metric_witness.radius}};
  r["warnings"] = rc.report.warnings;
  st.results["doubling"][label] = r;
  st.constants["D_" + label] = rc.report.measure_constant;
  st.constants["C_" + label] = rc.report.metric_constant;
  st.check("doubling_remark_" + label, rc.ok);
}

void run_poincare(RunState& st, const FiniteSpace& x) {
  const int center =
      st.cfg.params.poincare_center >= 0 ? st.cfg.params.poincare_center : x.size() / 2;
  const double radius = st.cfg.params.poincare_radius > 0.0
                            ? st.cfg.params.poincare_radius
                            : x.diameter() / 2.0;
  PoincareReport rep =
      poincare_constant(x, center, radius, st.cfg.params.lambda);
  PoincareCheck chk = poincare_check(x, rep.extremal, local_lip(x, rep.extremal),
                                     center, radius, rep.lambda, rep.c_p);
  st.results["poincare"] = {{"center", rep.center},
                            {"radius", rep.radius},
                            {"lambda", rep.lambda},
                            {"c_p", rep.c_p},
                            {"c_p_surrogate", rep.c_p_surrogate},
                            {"iterations", rep.iterations},
                            {"extremal_residual", chk.residual}};
  st.constants["C_P"] = rep.c_p;
  st.check("poincare_extremal_reproduces",
           std::abs(chk.residual) <=
               st.cfg.params.tol.identity * std::max(chk.lhs, 1e-30));
}

void run_cubes(RunState& st, const FiniteSpace& space, const std::string& label) {
  const double metric_c =
      metric_doubling(space, default_radii(space)).metric_constant;
  json per_k = json::array();
  bool all_ok = true;
  double c1 = 0.0;
  for (int k : st.cfg.params.k_list) {
    CubePartition part = build_cubes(space, k);
    PartitionOfUnity pou = partition_of_unity(space, part);
    PartitionChecks pc = verify_partition(space, part, pou, metric_c);
    all_ok = all_ok && pc.all();
    c1 = std::max(c1, pou.c1);
    per_k.push_back({{"k", k},
                     {"cubes", part.centers.size()},
                     {"max_neighbors", pc.max_neighbors},
                     {"c1", pou.c1},
                     {"inner_ball_deviation", pou.inner_ball_deviation},
                     {"cover_min", pou.cover_min},
                     {"chi_sum_deviation", pc.chi_sum_deviation},
                     {"invariants_ok", pc.all()}});
  }
  st.results["cubes"][label] = {{"metric_c", metric_c}, {"per_k", per_k}, {"c1", c1}};
  st.constants["c1"] = c1;
  st.check("cube_invariants_" + label, all_ok);
  st.check("cube_c1_uniform_" + label, c1 <= 6.0);
}

// exact pointwise inequality suites on one space
void run_calculus(RunState& st, const FiniteSpace& space, const std::string& label,
                  Rng& rng) {
  const double idt = st.cfg.params.tol.identity;
  const double h = space.resolution();
  int fails = 0;
  double worst_product_slack = -std::numeric_limits<double>::infinity();
  double worst_lemma_slack = -std::numeric_limits<double>::infinity();

  for (int pair = 0; pair < st.cfg.params.calculus_pairs; ++pair) {
    const std::vector<double> f = random_field(space, rng);
    const std::vector<double> g = random_field(space, rng);
    const std::vector<double> lf = local_lip(space, f);
    const std::vector<double> lg = local_lip(space, g);
    const int n = space.size();

    // product rule with the second-order edge slack lf*lg*h
    {
      std::vector<double> fg(n);
      for (int i = 0; i < n; ++i) fg[i] = f[i] * g[i];
      const std::vector<double> lfg = local_lip(space, fg);
      for (int i = 0; i < n; ++i) {
        const double rhs =
            std::abs(f[i]) * lg[i] + std::abs(g[i]) * lf[i] + lf[i] * lg[i] * h;
        worst_product_slack = std::max(worst_product_slack, lfg[i] - rhs);
        if (lfg[i] > rhs * (1.0 + idt) + idt) ++fails;
      }
    }
    // sublinearity, exactly
    {
      const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
      std::vector<double> mix(n);
      for (int i = 0; i < n; ++i) mix[i] = a * f[i] + b * g[i];
      const std::vector<double> lm = local_lip(space, mix);
      for (int i = 0; i < n; ++i) {
        const double rhs = std::abs(a) * lf[i] + std::abs(b) * lg[i];
        if (lm[i] > rhs * (1.0 + idt) + idt) ++fails;
      }
    }
    // averaged sublinearity: weighted average of fields vs average of lips
    {
      const std::vector<double> e = random_field(space, rng);
      const std::vector<double> le = local_lip(space, e);
      double w1 = rng.uniform(0.1, 1.0), w2 = rng.uniform(0.1, 1.0),
             w3 = rng.uniform(0.1, 1.0);
      const double wsum = w1 + w2 + w3;
      w1 /= wsum;
      w2 /= wsum;
      w3 /= wsum;
      std::vector<double> avg(n);
      for (int i = 0; i < n; ++i) avg[i] = w1 * f[i] + w2 * g[i] + w3 * e[i];
      const std::vector<double> la = local_lip(space, avg);
      for (int i = 0; i < n; ++i) {
        const double rhs = w1 * lf[i] + w2 * lg[i] + w3 * le[i];
        if (la[i] > rhs * (1.0 + idt) + idt) ++fails;
      }
    }
    // truncation never increases lip
    {
      const double bound = rng.uniform(0.2, 1.0) * std::max(linf_norm(f), 1e-12);
      const std::vector<double> lt = local_lip(space, truncate(f, bound));
      for (int i = 0; i < n; ++i)
        if (lt[i] > lf[i] * (1.0 + idt) + idt) ++fails;
    }
    // lower-semicontinuity surrogate: f_eps = f + eps*g converges to f and
    // lip(f) <= lim lip(f_eps); quantitatively lip(f) <= lip(f_eps) + eps*lip(g)
    {
      const double eps = 0x1p-20;
      std::vector<double> fe(n);
      for (int i = 0; i < n; ++i) fe[i] = f[i] + eps * g[i];
      const std::vector<double> lfe = local_lip(space, fe);
      for (int i = 0; i < n; ++i)
        if (lf[i] > lfe[i] + eps * lg[i] + idt) ++fails;
    }
    // metric/measure comparison: d' = d/L and m' = C*m give lip' = L*lip
    {
      const double L = rng.uniform(0.5, 3.0), C = rng.uniform(0.5, 2.0);
      const FiniteSpace scaled = rescale_space(space, L, C);
      const std::vector<double> l2 = local_lip(scaled, f);
      for (int i = 0; i < n; ++i) {
        worst_lemma_slack = std::max(worst_lemma_slack, l2[i] - L * lf[i]);
        if (l2[i] > L * lf[i] * (1.0 + idt) + idt) ++fails;
      }
      if (std::abs(scaled.total_mass() - C * space.total_mass()) >
          idt * space.total_mass())
        ++fails;
    }
  }

  // upper-gradient inequality for g = local_lip over a random curve family
  UpperGradientReport ug;
  {
    std::vector<Curve> curves;
    for (int c = 0; c < 20; ++c) {
      std::vector<int> pts{static_cast<int>(rng.index(space.size()))};
      const int steps = 5 + static_cast<int>(rng.index(25));
      for (int s = 0; s < steps; ++s) {
        const int at = pts.back();
        const int deg = space.degree(at);
        if (deg == 0) break;
        pts.push_back(space.neighbors_begin(at)[rng.index(deg)].to);
      }
      curves.push_back(Curve::through(std::move(pts)));
    }
    const std::vector<double> f = random_field(space, rng);
    ug = upper_gradient_violations(
        space, GradientPair::make(space, f, local_lip(space, f)),
        CurveFamily::make(space, std::move(curves)));
    if (!ug.per_curve_ok) ++fails;
  }

  st.results["calculus"][label] = {
      {"pairs", st.cfg.params.calculus_pairs},
      {"pointwise_failures", fails},
      {"worst_product_rule_slack", worst_product_slack},
      {"worst_rescale_slack", worst_lemma_slack},
      {"upper_gradient_family_lhs", ug.lhs},
      {"upper_gradient_family_rhs", ug.rhs},
      {"upper_gradient_violations", ug.violating_curves.size()}};
  st.check("calculus_identities_" + label, fails == 0);
}

void run_sandwich(RunState& st, const ProductSpace& product, Rng& rng) {
  const RatioOptions opt{st.cfg.params.tol.boundary_hops, 0.6};
  const double rel = st.cfg.params.tol.relative;

  // corpus: named fields plus seeded trig tensor sums
  std::vector<std::pair<std::string, std::vector<double>>> corpus;
  for (const auto& name : st.cfg.params.named)
    corpus.emplace_back(name, named_field(product, name));
  std::vector<std::pair<std::string, TensorSumField>> tensor_corpus;
  for (int i = 0; i < st.cfg.params.corpus_fields; ++i) {
    TensorSumField tf =
        trig_tensor_sum(product.factor_x(), product.factor_y(), rng);
    corpus.emplace_back("tensor" + std::to_string(i), tf.evaluate(product));
    tensor_corpus.emplace_back("tensor" + std::to_string(i), std::move(tf));
  }

  json per_field = json::object();
  double min_rho = std::numeric_limits<double>::infinity(), max_rho = 0.0;
  double smooth_max = 0.0;
  std::vector<long long> histogram(30, 0);
  bool any = false;
  for (const auto& [name, f] : corpus) {
    SandwichReport rep = sandwich_report(product, f, opt);
    per_field[name] = {{"min_rho", rep.min_rho},
                       {"max_rho", rep.max_rho},
                       {"interior_count", rep.interior_count}};
    if (rep.interior_count == 0) continue;
    any = true;
    min_rho = std::min(min_rho, rep.min_rho);
    max_rho = std::max(max_rho, rep.max_rho);
    for (int b = 0; b < 30; ++b) histogram[b] += rep.histogram[b];
    if (name == "sum" || name == "product" || name == "sincos")
      smooth_max = std::max(smooth_max, rep.max_rho);
  }

  // splitting lemma over the tensor-sum hypothesis class (+ sincos if named)
  json lemma = json::object();
  double lemma_max = 0.0;
  int lemma_over = 0;
  for (const auto& name : st.cfg.params.named) {
    if (name == "crease") continue;  // |x-t| is not a tensor sum
    LemmaReport lr = lemma_lip_check(product, named_field(product, name), opt, rel);
    lemma[name] = {{"max_r", lr.max_r}, {"over_4", lr.over_4}};
    lemma_max = std::max(lemma_max, lr.max_r);
    lemma_over += lr.over_4;
    if (name == "sincos")
      st.check("lemma_sincos_sharp", lr.max_r <= 1.0 + rel);
  }
  for (const auto& [name, tf] : tensor_corpus) {
    LemmaReport lr = lemma_lip_check(product, tf, opt, rel);
    lemma[name] = {{"max_r", lr.max_r}, {"over_4", lr.over_4}};
    lemma_max = std::max(lemma_max, lr.max_r);
    lemma_over += lr.over_4;
  }

  st.results["sandwich"] = {{"per_field", per_field},
                            {"min_rho", any ? min_rho : 0.0},
                            {"max_rho", max_rho},
                            {"histogram", histogram},
                            {"lemma", lemma},
                            {"lemma_max_r", lemma_max}};
  st.constants["C0"] = max_rho;
  st.check("sandwich_lower", any && min_rho >= 1.0 - rel);
  st.check("sandwich_upper", any && max_rho <= 2.0 + rel);
  if (smooth_max > 0.0) st.check("sandwich_smooth_fields", smooth_max <= 1.0 + rel);
  st.check("lemma_factor4", lemma_over == 0);

  std::string hist_csv = "rho_bucket_low,count\n";
  for (int b = 0; b < 30; ++b)
    hist_csv += fmt(0.1 * b) + "," + std::to_string(histogram[b]) + "\n";
  st.csv_files.emplace_back("sandwich_hist.csv", hist_csv);
}

void run_smoothing(RunState& st, const ProductSpace& product, Rng& rng) {
  json fields = json::array();
  bool slopes_ok = true, x_energy_ok = true;
  double k_y_energy = 0.0, k_l2 = 0.0;
  for (int i = 0; i < std::max(1, st.cfg.params.corpus_fields); ++i) {
    TensorSumField tf =
        cascade_tensor_sum(product.factor_x(), product.factor_y(), rng);
    ConvergenceTable table =
        convergence_experiment(product, tf.evaluate(product), st.cfg.params.k_list);

    json rows = json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"k", r.k},
                      {"l2_error", r.l2_error},
                      {"x_energy", r.x_energy},
                      {"y_energy", r.y_energy},
                      {"ref_x_energy", r.ref_x_energy},
                      {"ref_y_energy", r.ref_y_energy},
                      {"norm_ratio", r.norm_ratio},
                      {"max_terms", r.max_terms}});
      if (r.k >= 8 && r.x_energy > 1.2 * r.ref_x_energy) x_energy_ok = false;
      if (r.ref_y_energy > 0.0)
        k_y_energy = std::max(k_y_energy, r.y_energy / r.ref_y_energy);
      k_l2 = std::max(k_l2, r.norm_ratio);
    }
    fields.push_back({{"field", "cascade" + std::to_string(i)},
                      {"slope", table.slope},
                      {"rows", rows}});
    if (!(table.slope >= -1.3 && table.slope <= -0.7)) slopes_ok = false;

    std::ostringstream csv;
    save_csv(csv, table);
    st.csv_files.emplace_back("smoothing_" + std::to_string(i) + ".csv", csv.str());
    if (i == 0) {
      std::string plot = "x,y\n";
      for (const auto& r : table.rows)
        plot += std::to_string(r.k) + "," + fmt(r.l2_error) + "\n";
      st.csv_files.emplace_back("plot_smoothing.csv", plot);
    }
  }
  st.results["smoothing"] = {{"fields", fields},
                             {"K_y_energy", k_y_energy},
                             {"K_l2", k_l2}};
  st.constants["K"] = k_y_energy;
  st.check("smoothing_slope_window", slopes_ok);
  st.check("smoothing_x_energy_bounded", x_energy_ok);
  st.check("smoothing_y_energy_uniform", k_y_energy <= 4.0);
}

void run_cutoffs(RunState& st, const ProductSpace& product) {
  const std::vector<double> py = axis_positions(product.factor_y());
  const std::vector<double> f =
      product.make_field([&](int, int y) { return py[y]; });
  CutoffTable table =
      cutoff_convergence(product, f, st.cfg.params.cutoff_x0,
                         st.cfg.params.cutoff_t0, st.cfg.params.schedule);

  json rows = json::array();
  bool eta_rows_ok = true;
  std::string csv =
      "n,m,k,l2_error,bl_error,x_deficit,x_tail,t_deficit,t_psi_tail,t_eta_term,"
      "eta_bound,zeros_in_ball\n";
  std::string plot = "x,y\n";
  for (const auto& r : table.rows) {
    rows.push_back({{"n", r.n},
                    {"m", r.m},
                    {"k", r.k},
                    {"l2_error", r.l2_error},
                    {"bl_error", r.bl_error},
                    {"x_deficit", r.x_deficit},
                    {"x_tail", r.x_tail},
                    {"t_deficit", r.t_deficit},
                    {"t_psi_tail", r.t_psi_tail},
                    {"t_eta_term", r.t_eta_term},
                    {"eta_bound", r.eta_bound},
                    {"zeros_in_ball", r.zeros_in_ball},
                    {"eta_ok", r.eta_ok}});
    eta_rows_ok = eta_rows_ok && r.eta_ok;
    csv += std::to_string(r.n) + "," + std::to_string(r.m) + "," +
           std::to_string(r.k) + "," + fmt(r.l2_error) + "," + fmt(r.bl_error) +
           "," + fmt(r.x_deficit) + "," + fmt(r.x_tail) + "," + fmt(r.t_deficit) +
           "," + fmt(r.t_psi_tail) + "," + fmt(r.t_eta_term) + "," +
           fmt(r.eta_bound) + "," + std::to_string(r.zeros_in_ball) + "\n";
    plot += std::to_string(r.n) + "," + fmt(r.t_eta_term) + "\n";
  }
  st.csv_files.emplace_back("cutoffs.csv", csv);
  st.csv_files.emplace_back("plot_cutoffs.csv", plot);

  st.results["cutoffs"] = {{"rows", rows},
                           {"decay_constant", table.decay_constant},
                           {"eta_fit_c", table.eta_fit_c},
                           {"eta_fit_residual", table.eta_fit_residual},
                           {"eta_monotone", table.eta_monotone}};
  st.check("cutoff_eta_monotone", table.eta_monotone);
  st.check("cutoff_eta_fit", table.eta_fit_residual <= 0.20);
  st.check("cutoff_eta_bound", eta_rows_ok);
}

// oracle checks for the unit cone: distances vs the flat disk, mass vs pi,
// and the unit-gradient field t*cos(theta)
void run_cone_checks(RunState& st, const ProductSpace& product) {
  const FiniteSpace& X = product.factor_x();
  const FiniteSpace& Y = product.factor_y();
  const std::vector<double> px = axis_positions(X);
  const std::vector<double> py = axis_positions(Y);
  const double rel = st.cfg.params.tol.relative;
  const int apex_t = static_cast<int>(
      std::min_element(py.begin(), py.end()) - py.begin());
  const int rim_t = static_cast<int>(
      std::max_element(py.begin(), py.end()) - py.begin());
  const double rim = py[rim_t];

  json r;
  r["total_mass"] = product.total_mass();
  const double disk_area = 3.14159265358979323846 * rim * rim;
  const bool mass_ok =
      std::abs(product.total_mass() - disk_area) <= 0.01 * disk_area;
  r["disk_area"] = disk_area;
  st.check("cone_mass", mass_ok);

  // apex-to-rim = rim radius at every angle (radial geodesic)
  const std::vector<double> from_apex =
      product.distance_row(product.node(0, apex_t));
  double worst_apex = 0.0;
  for (int i = 0; i < X.size(); ++i)
    worst_apex = std::max(
        worst_apex, std::abs(from_apex[product.node(i, rim_t)] - rim) / rim);
  r["apex_rim_worst_rel_err"] = worst_apex;
  st.check("cone_apex_rim", worst_apex <= 0.02);

  // rim chords at 16 grid-realizable angle gaps vs 2 sin(gap/2)
  const std::vector<double> from_rim =
      product.distance_row(product.node(0, rim_t));
  const double circumference = px.back() + px[1];  // closing edge = first edge
  double worst_chord = 0.0;
  json chords = json::array();
  for (int j = 1; j <= 16; ++j) {
    const int i = static_cast<int>(std::lround(static_cast<double>(j) * X.size() / 32.0));
    const double gap = px[i] * (6.28318530717958647692 / circumference);
    const double truth = 2.0 * rim * std::sin(gap / 2.0);
    const double got = from_rim[product.node(i, rim_t)];
    const double err = std::abs(got - truth) / truth;
    worst_chord = std::max(worst_chord, err);
    chords.push_back({{"angle", gap}, {"distance", got}, {"chord", truth}});
  }
  r["chords"] = chords;
  r["chord_worst_rel_err"] = worst_chord;
  st.check("cone_rim_chords", worst_chord <= 0.02);

  // f = t cos(theta): the warped gradient is 1 away from the apex
  const std::vector<double> f = product.make_field([&](int x, int y) {
    return py[y] * std::cos(px[x] * (6.28318530717958647692 / circumference));
  });
  const std::vector<double> bl = bl_gradient(product, f);
  const std::vector<char> iy =
      interior_mask(Y, st.cfg.params.tol.boundary_hops);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int x = 0; x < X.size(); ++x)
    for (int y = 0; y < Y.size(); ++y) {
      if (py[y] < 0.2 * rim || !iy[y]) continue;
      const double v = bl[product.node(x, y)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  r["bl_unit_field_min"] = lo;
  r["bl_unit_field_max"] = hi;
  st.check("cone_bl_unit_field", lo >= 1.0 - rel && hi <= 1.0 + rel);
  st.results["cone"] = r;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg) {
  {
    std::vector<std::string> diag = validate(cfg);
    if (!diag.empty()) {
      std::string all = "invalid config";
      for (const auto& d : diag) all += "; " + d;
      fail(ErrorKind::config, all);
    }
  }

  RunState st(cfg);

  // spaces and product are config-level: errors here abort the run
  FiniteSpace x = build_space(cfg, cfg.x);
  std::optional<FiniteSpace> y;
  if (cfg.y.present()) y = build_space(cfg, cfg.y);
  std::optional<ProductSpace> product;
  if (cfg.product == "cartesian")
    product = ProductSpace::cartesian(x, *y);
  else if (cfg.product == "warped")
    product = ProductSpace::warped(x, *y, build_warp(cfg, *y));

  json spaces;
  spaces["x"] = {{"name", x.name()},
                 {"points", x.size()},
                 {"resolution", x.resolution()},
                 {"diameter", x.diameter()},
                 {"total_mass", x.total_mass()}};
  if (y)
    spaces["y"] = {{"name", y->name()},
                   {"points", y->size()},
                   {"resolution", y->resolution()},
                   {"diameter", y->diameter()},
                   {"total_mass", y->total_mass()}};
  if (product)
    spaces["product"] = {{"kind", cfg.product},
                         {"nodes", product->size()},
                         {"total_mass", product->total_mass()}};
  st.results["spaces"] = spaces;

  // independent generators per analysis: toggling one analysis cannot
  // change another's corpus
  Rng rng_calculus(cfg.seed + 11);
  Rng rng_sandwich(cfg.seed + 21);
  Rng rng_smoothing(cfg.seed + 31);

  st.analysis("doubling", cfg.analyses.doubling, [&] {
    run_doubling(st, x, "x");
    if (y) run_doubling(st, *y, "y");
  });
  st.analysis("poincare", cfg.analyses.poincare, [&] { run_poincare(st, x); });
  st.analysis("cubes", cfg.analyses.cubes, [&] {
    if (y)
      run_cubes(st, *y, "y");
    else
      run_cubes(st, x, "x");
  });
  st.analysis("calculus", cfg.analyses.calculus, [&] {
    run_calculus(st, x, "x", rng_calculus);
    if (y) run_calculus(st, *y, "y", rng_calculus);
  });
  st.analysis("sandwich", cfg.analyses.sandwich,
              [&] { run_sandwich(st, *product, rng_sandwich); });
  st.analysis("smoothing", cfg.analyses.smoothing,
              [&] { run_smoothing(st, *product, rng_smoothing); });
  st.analysis("cutoffs", cfg.analyses.cutoffs, [&] {
    run_cutoffs(st, *product);
    if (cfg.params.cone_checks) run_cone_checks(st, *product);
  });

  st.summary.checks_pass = st.summary.failed_checks.empty();

  json report;
  report["scenario"] = echo_config(cfg);
  report["results"] = st.results;
  report["checks"] = st.checks;
  report["constants"] = st.constants;
  report["summary"] = {{"pass", st.summary.checks_pass && !st.summary.had_errors},
                       {"failed_checks", st.summary.failed_checks},
                       {"errors", st.summary.errors}};
  report["timings"] = st.timings;
  st.summary.report_text = report.dump(2) + "\n";

  if (!cfg.output_dir.empty()) {
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output dir " + dir.string());
    write_text(dir / "report.json", st.summary.report_text);
    for (const auto& [name, content] : st.csv_files) write_text(dir / name, content);
  }
  return st.summary;
}

}  // namespace mms
