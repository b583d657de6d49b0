#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mms/error.hpp"
#include "mms/scenario.hpp"
#include "mms/space.hpp"

using namespace mms;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string strip_timings(const std::string& report_text) {
  json j = json::parse(report_text);
  j.erase("timings");
  return j.dump(2);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool any_contains(const std::vector<std::string>& diags, const std::string& needle) {
  for (const auto& d : diags)
    if (d.find(needle) != std::string::npos) return true;
  return false;
}

ScenarioConfig det_config() {
  ScenarioConfig cfg;
  cfg.name = "det";
  cfg.seed = 7;
  cfg.x.generator = "interval(1,60)";
  cfg.y.generator = "interval(1,60)";
  cfg.product = "cartesian";
  cfg.analyses.sandwich = true;
  cfg.analyses.smoothing = true;
  cfg.params.k_list = {4, 8};
  cfg.params.corpus_fields = 2;
  return cfg;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("parsing fills defaults and accepts a full config") {
    ScenarioConfig minimal =
        ScenarioConfig::parse(R"js({"space_x":{"generator":"interval(1,40)"}})js", "mem");
    CHECK(minimal.seed == 1);
    CHECK(minimal.product == "none");
    CHECK(minimal.params.k_list == std::vector<int>{4, 8, 16, 32});
    CHECK(minimal.params.corpus_fields == 4);
    CHECK(minimal.params.tol.relative == 0.05);
    CHECK(minimal.params.tol.boundary_hops == 3);
    CHECK_FALSE(minimal.analyses.any());
    CHECK(validate(minimal).empty());

    ScenarioConfig full = ScenarioConfig::parse(R"js({
      "name": "full", "seed": 42,
      "space_x": {"generator": "interval(1,50)"},
      "space_y": {"generator": "interval(1,50)"},
      "product": "cartesian",
      "analyses": {"sandwich": true, "smoothing": false},
      "params": {"k_list": [4, 8], "corpus_fields": 2, "named_fields": ["sum"],
                 "tolerances": {"relative": 0.1}}
    })js", "mem");
    CHECK(full.name == "full");
    CHECK(full.seed == 42);
    CHECK(full.analyses.sandwich);
    CHECK_FALSE(full.analyses.smoothing);
    CHECK(full.params.k_list == std::vector<int>{4, 8});
    CHECK(full.params.named == std::vector<std::string>{"sum"});
    CHECK(full.params.tol.relative == 0.1);
    CHECK(validate(full).empty());
  }

  TEST_CASE("malformed configs fail at parse time") {
    CHECK_THROWS_AS(ScenarioConfig::parse("{nope", "mem"), Error);
    CHECK_THROWS_AS(ScenarioConfig::parse(
                        R"js({"space_x":{"generator":"interval(1,9)"},
                            "params":{"schedule":[[1,2]]}})js",
                        "mem"),
                    Error);
  }

  TEST_CASE("validate reports unknown keys and semantic conflicts") {
    ScenarioConfig typo = ScenarioConfig::parse(
        R"js({"space_x":{"generator":"interval(1,40)"},"sandwch":true})js", "mem");
    CHECK(any_contains(validate(typo), "sandwch"));

    ScenarioConfig empty;
    CHECK(any_contains(validate(empty), "space_x"));

    ScenarioConfig badgen;
    badgen.x.generator = "interval(1)";
    CHECK_FALSE(validate(badgen).empty());

    ScenarioConfig missing_file;
    missing_file.x.file = "/nonexistent/zz.mms";
    CHECK(any_contains(validate(missing_file), "file not found"));

    ScenarioConfig nocart;
    nocart.x.generator = "interval(1,40)";
    nocart.analyses.sandwich = true;
    CHECK_FALSE(validate(nocart).empty());

    ScenarioConfig nowarp = det_config();
    nowarp.analyses.cutoffs = true;
    CHECK_FALSE(validate(nowarp).empty());

    ScenarioConfig shrink = det_config();
    shrink.params.k_list = {8, 4};
    CHECK_FALSE(validate(shrink).empty());

    ScenarioConfig badname = det_config();
    badname.params.named = {"ripple"};
    CHECK_FALSE(validate(badname).empty());

    ScenarioConfig badlambda = det_config();
    badlambda.params.lambda = 0.5;
    CHECK_FALSE(validate(badlambda).empty());
  }

  TEST_CASE("run_scenario rejects invalid configs before any analysis") {
    ScenarioConfig cfg;  // no space at all
    try {
      run_scenario(cfg);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }

  TEST_CASE("all analyses off: echo-only report, exit code 0") {
    ScenarioConfig cfg;
    cfg.x.generator = "interval(1,30)";
    RunSummary sum = run_scenario(cfg);
    CHECK(sum.exit_code() == 0);
    CHECK(sum.checks_pass);
    CHECK_FALSE(sum.had_errors);
    json j = json::parse(sum.report_text);
    CHECK(j["scenario"]["space_x"]["generator"] == "interval(1,30)");
    CHECK(j["results"].contains("spaces"));
    CHECK(j["summary"]["pass"] == true);
  }

  TEST_CASE("an analysis error is isolated; the rest of the run survives") {
    ScenarioConfig cfg;
    cfg.x.generator = "interval(1,40)";  // k=16 of the default list is unresolvable
    cfg.analyses.doubling = true;
    cfg.analyses.cubes = true;
    RunSummary sum = run_scenario(cfg);
    CHECK(sum.had_errors);
    CHECK(sum.exit_code() == 1);
    REQUIRE(sum.errors.size() == 1);
    CHECK(sum.errors[0].find("cubes") != std::string::npos);
    CHECK(sum.errors[0].find("scale-unresolvable") != std::string::npos);
    json j = json::parse(sum.report_text);
    CHECK(j["results"]["cubes"]["error"]["kind"] == "scale-unresolvable");
    CHECK(j["results"]["doubling"].contains("x"));
    bool saw_remark = false;
    for (const auto& c : j["checks"])
      if (c["name"] == "doubling_remark_x") {
        saw_remark = true;
        CHECK(c["pass"] == true);
      }
    CHECK(saw_remark);
    CHECK(j["summary"]["pass"] == false);
  }

  TEST_CASE("reports are deterministic outside the timing section") {
    RunSummary a = run_scenario(det_config());
    RunSummary b = run_scenario(det_config());
    CHECK(strip_timings(a.report_text) == strip_timings(b.report_text));

    ScenarioConfig reseeded = det_config();
    reseeded.seed = 8;
    RunSummary c = run_scenario(reseeded);
    CHECK(strip_timings(a.report_text) != strip_timings(c.report_text));
  }

  TEST_CASE("output directory receives the report and the CSV tables") {
    fs::path dir = fs::temp_directory_path() / "mms_scenario_out";
    fs::remove_all(dir);
    ScenarioConfig cfg = det_config();
    cfg.output_dir = dir.string();
    RunSummary sum = run_scenario(cfg);
    REQUIRE(fs::exists(dir / "report.json"));
    CHECK(slurp(dir / "report.json") == sum.report_text);
    REQUIRE(fs::exists(dir / "sandwich_hist.csv"));
    std::istringstream hist(slurp(dir / "sandwich_hist.csv"));
    std::string line;
    REQUIRE(std::getline(hist, line));
    CHECK(line == "rho_bucket_low,count");
    REQUIRE(fs::exists(dir / "smoothing_0.csv"));
    std::istringstream sm(slurp(dir / "smoothing_0.csv"));
    REQUIRE(std::getline(sm, line));
    CHECK(line == "k,l2_error,x_energy,y_energy,ref_x_energy,ref_y_energy");
    CHECK(fs::exists(dir / "plot_smoothing.csv"));
    fs::remove_all(dir);
  }
}
