#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omdp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"online MDP experiments: average-reward policy iteration, "
               "regret accounting and environment tooling"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, validate_path, grid_out;
  std::vector<std::string> overrides;
  int replicates = 1;
  omdp::GridWorldSpec grid;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config JSON path")->required();
  run->add_option("--set", overrides, "override config keys, e.g. algorithm.kappa=0.5");
  run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  run->add_option("--replicates", replicates, "independent replicate runs");

  auto* bound = app.add_subcommand("bound", "estimate constants and print the regret bound");
  bound->add_option("--config", config_path, "config JSON path")->required();
  bound->add_option("--set", overrides, "override config keys");

  auto* plot = app.add_subcommand("plot", "render SVG plots for a finished run");
  plot->add_option("run_dir", run_dir, "run output directory")->required();

  auto* validate = app.add_subcommand("validate", "validate a config or data file");
  validate->add_option("path", validate_path, "JSON file to check")->required();

  auto* gridworld = app.add_subcommand("gridworld", "export grid dynamics as an MDP file");
  gridworld->add_option("--width", grid.width, "grid width");
  gridworld->add_option("--height", grid.height, "grid height");
  gridworld->add_option("--slip", grid.slip, "probability of moving the other way");
  gridworld->add_option("--super", grid.super, "super-grid edge length");
  gridworld->add_option("--seed", grid.seed, "seed stored in the spec");
  gridworld->add_flag("--no-teleport,!--teleport", [&](std::int64_t count) {
    grid.teleport_on_goal = count == 0;
  }, "keep the goal absorbing instead of teleporting to the start");
  gridworld->add_option("--out", grid_out, "output MDP JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are invalid input
  }

  if (run->parsed()) return omdp::cli::cmd_run(config_path, overrides, out_dir, replicates);
  if (bound->parsed()) return omdp::cli::cmd_bound(config_path, overrides);
  if (plot->parsed()) return omdp::cli::cmd_plot(run_dir);
  if (validate->parsed()) return omdp::cli::cmd_validate(validate_path);
  if (gridworld->parsed()) return omdp::cli::cmd_gridworld(grid, grid_out);
  return 2;
}
