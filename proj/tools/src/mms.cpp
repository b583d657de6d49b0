// Scenario runner and space utilities.
//
// Exit codes: 0 = all enabled checks pass, 1 = an invariant check failed or
// an analysis errored, 2 = config or IO problem.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mms/error.hpp"
#include "mms/scenario.hpp"
#include "mms/space.hpp"

namespace {

int exit_code_for(const mms::Error& e) {
  switch (e.kind()) {
    case mms::ErrorKind::config:
    case mms::ErrorKind::io:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobolev tensorization experiments on finite metric measure spaces"};
  app.require_subcommand(1);

  std::string run_config, run_output;
  bool run_quiet = false;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and emit its report");
  run->add_option("config", run_config, "scenario JSON file")->required();
  run->add_option("-o,--output", run_output, "override the config's output_dir");
  run->add_flag("-q,--quiet", run_quiet, "do not print the report to stdout");

  std::string val_config;
  CLI::App* val =
      app.add_subcommand("validate", "Check a scenario config without running it");
  val->add_option("config", val_config, "scenario JSON file")->required();

  CLI::App* space = app.add_subcommand("space", "Space file utilities");
  space->require_subcommand(1);
  std::string info_file;
  CLI::App* info = space->add_subcommand("info", "Print a space file summary");
  info->add_option("file", info_file, "space file")->required();
  std::string gen_spec, gen_out;
  CLI::App* gen = space->add_subcommand("gen", "Generate a space and save it");
  gen->add_option("spec", gen_spec, "generator, e.g. \"interval(1,200)\"")->required();
  gen->add_option("-o,--output", gen_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints usage or help
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      mms::ScenarioConfig cfg = mms::ScenarioConfig::load_file(run_config);
      if (!run_output.empty()) cfg.output_dir = run_output;
      mms::RunSummary summary = mms::run_scenario(cfg);
      if (!run_quiet) std::cout << summary.report_text;
      for (const auto& e : summary.errors) std::cerr << "analysis error: " << e << "\n";
      for (const auto& c : summary.failed_checks)
        std::cerr << "failed check: " << c << "\n";
      return summary.exit_code();
    }
    if (val->parsed()) {
      mms::ScenarioConfig cfg = mms::ScenarioConfig::load_file(val_config);
      std::vector<std::string> diag = mms::validate(cfg);
      for (const auto& d : diag) std::cout << d << "\n";
      return diag.empty() ? 0 : 2;
    }
    if (info->parsed()) {
      mms::FiniteSpace s = mms::FiniteSpace::load_file(info_file);
      std::cout << "points " << s.size() << "\n"
                << "edges " << s.edges().size() << "\n"
                << "resolution " << s.resolution() << "\n"
                << "diameter " << s.diameter() << "\n"
                << "total_mass " << s.total_mass() << "\n";
      return 0;
    }
    if (gen->parsed()) {
      mms::FiniteSpace s = mms::make_space(gen_spec);
      std::ofstream out(gen_out, std::ios::binary);
      if (!out) mms::fail(mms::ErrorKind::io, "cannot write " + gen_out);
      s.save(out);
      return 0;
    }
  } catch (const mms::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
