#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "locklab/cases.hpp"
#include "locklab/config.hpp"
#include "locklab/runner.hpp"
#include "locklab/verify.hpp"

namespace {

int cmd_run(const std::string& target, const std::string& mode, const std::string& out_dir,
            double mu0_scale) {
  locklab::RunConfig cfg;
  if (const locklab::CaseLibraryEntry* entry = locklab::find_case(target)) {
    cfg = entry->config;
  } else if (std::filesystem::exists(target)) {
    std::ifstream in(target, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = locklab::parse_config(ss.str(), target);
  } else {
    std::cerr << "error: '" << target
              << "' is neither a library case nor a config file (see list-cases)\n";
    return 1;
  }
  if (mode == "guarded") cfg.mode = locklab::EvalMode::Guarded;
  else if (mode == "unguarded") cfg.mode = locklab::EvalMode::Unguarded;
  else if (!mode.empty()) {
    std::cerr << "error: --mode must be guarded or unguarded\n";
    return 1;
  }
  cfg.solver.locking_mode = cfg.mode;
  cfg.validate();
  const locklab::RunOutcome outcome = locklab::run_config(cfg, out_dir, mu0_scale);
  std::cout << outcome.summary << "\n";
  return 0;
}

int cmd_verify() {
  const auto checks = locklab::run_acceptance_checks();
  bool all_pass = true;
  for (const locklab::CheckResult& c : checks) {
    all_pass = all_pass && c.pass;
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.label
              << "\n       expected: " << c.expected << "\n       got:      " << c.got
              << "\n       tolerance: " << c.tolerance << "\n";
  }
  std::cout << (all_pass ? "verification passed" : "verification FAILED") << " ("
            << checks.size() << " checks)\n";
  return all_pass ? 0 : 2;
}

int cmd_list_cases() {
  for (const locklab::CaseLibraryEntry& e : locklab::case_library())
    std::printf("%-8s %s\n", e.name.c_str(), e.description.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locklab: strain-locking hyperelasticity toolkit"};
  app.require_subcommand(1);

  std::string target, mode, out_dir = ".";
  double mu0_scale = 1.0;
  CLI::App* run = app.add_subcommand("run", "run a library case or a config file");
  run->add_option("target", target, "case name (see list-cases) or config path")
      ->required();
  run->add_option("--mode", mode, "locking mode override: guarded | unguarded");
  run->add_option("--out", out_dir, "output directory (default: current)");
  run->add_option("--mu0", mu0_scale, "rescale emitted stresses to this modulus");

  CLI::App* verify = app.add_subcommand("verify", "run the built-in acceptance checks");
  CLI::App* list = app.add_subcommand("list-cases", "list the bundled cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(target, mode, out_dir, mu0_scale);
    if (verify->parsed()) return cmd_verify();
    if (list->parsed()) return cmd_list_cases();
  } catch (const locklab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const locklab::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
