#include "kmsh/tools/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  kmsh::cli::JobSpec spec;
  CLI::App app{"kmsh: parabolic flat bundles, filtered local systems and model harmonic metrics"};
  app.require_subcommand(1, 1);

  std::string grid, eps;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-i,--input", spec.inputs, "input JSON file (repeatable)");
    sub->add_option("-o,--output", spec.output, "report base path: writes .json, .txt and .csv");
    sub->add_option("--format", spec.format, "stdout format")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--seed", spec.seed, "seed for randomized scans (default 0)");
    sub->add_option("--tol", spec.tol, "tolerance for monotonicity checks");
  };

  auto* charnum = app.add_subcommand("charnum", "characteristic numbers of a bundle.json or localsys.json");
  auto* perturb = app.add_subcommand("perturb", "perturbation scheme (II) of a bundle.json");
  auto* corr = app.add_subcommand("corr", "transport between filtered local systems and flat tables");
  auto* flow = app.add_subcommand("flow", "heat flow from the perturbed rank 2 model");
  auto* scan = app.add_subcommand("scan", "model-family scans");
  auto* verify = app.add_subcommand("verify", "seeded property suites");
  for (auto* sub : {charnum, perturb, corr, flow, scan, verify}) common(sub);

  perturb->add_option("--m", spec.m, "lattice denominator")->check(CLI::PositiveNumber);
  for (auto* sub : {flow, scan}) {
    sub->add_option("--grid", grid, "grid size NxM (radial x angular)");
    sub->add_option("--eps", eps, "comma-separated eps values");
  }
  flow->add_option("--dt", spec.dt, "time step")->check(CLI::PositiveNumber);
  flow->add_option("--steps", spec.steps, "number of steps")->check(CLI::PositiveNumber);
  scan->add_option("--kind", spec.kind, "scan kind")->check(CLI::IsMember({"inequality", "uniform", "sweep", "scalars"}));
  scan->add_option("--samples", spec.samples, "sample count");

  try {
    app.parse(argc, argv);
    spec.command = app.get_subcommands().front()->get_name();
    if (!grid.empty()) spec.grid = kmsh::cli::parse_grid(grid);
    if (!eps.empty()) spec.eps = kmsh::cli::parse_list(eps);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kmsh::cli::validation_failure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kmsh::cli::validation_failure;
  }
  return kmsh::cli::execute(spec, std::cout, std::cerr);
}
