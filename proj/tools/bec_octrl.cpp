// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "becoct/becoct.h"

namespace {

int exit_code(becoct_status s) {
  switch (s) {
    case BECOCT_OK: return 0;
    case BECOCT_SOLVER_ERROR: return 3;
    case BECOCT_LINE_SEARCH_FAILED: return 4;
    default: return 2;  // configuration, argument and file errors
  }
}

void print_line(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

int report_failure(becoct_status s) {
  std::fprintf(stderr, "bec-octrl: %s\n", becoct_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and optimal control of condensate dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(becoct_version()));

  std::string config, outdir = ".";
  bool check = false, quiet = false;
  int iters = -1;

  auto* sim = app.add_subcommand("simulate", "propagate the initial state and write density maps");
  sim->add_option("config", config, "run configuration (JSON)")->required();
  sim->add_option("--out", outdir, "output directory");
  sim->add_flag("--quiet", quiet, "suppress progress lines");

  auto* opt = app.add_subcommand("optimize", "optimize the control and write the trace");
  opt->add_option("config", config, "run configuration (JSON)")->required();
  opt->add_option("--out", outdir, "output directory");
  opt->add_flag("--check", check, "compare finite-difference and adjoint directional derivatives");
  opt->add_option("--iters", iters, "number of optimizer iterations")->check(CLI::NonNegativeNumber);
  opt->add_flag("--quiet", quiet, "suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  becoct_run* run = nullptr;
  becoct_status s = becoct_run_from_file(config.c_str(), &run);
  if (s != BECOCT_OK) return report_failure(s);
  if (!quiet) becoct_run_set_progress(run, print_line, nullptr);

  if (sim->parsed())
    s = becoct_simulate(run, outdir.c_str());
  else
    s = becoct_optimize(run, outdir.c_str(), iters, check ? 1 : 0);

  if (s == BECOCT_OK || s == BECOCT_LINE_SEARCH_FAILED) std::printf("%s", becoct_run_summary(run));
  if (s == BECOCT_OK && check) {
    double direct = 0.0, adjoint = 0.0;
    if (becoct_run_check(run, &direct, &adjoint) == BECOCT_OK)
      std::printf("Direct:  %.8g\nAdjoint: %.8g\n", direct, adjoint);
  }
  int rc = 0;
  if (s != BECOCT_OK) rc = report_failure(s);
  becoct_run_free(run);
  return rc;
}
