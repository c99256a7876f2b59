#include <CLI11.hpp>
#include <iostream>

#include "fusedleo/app.hpp"
#include "fusedleo/errors.hpp"

namespace {

using fusedleo::CommandOptions;

struct RawOptions {
  std::string scenario;
  std::string out;
  std::vector<std::string> sweep;
  std::optional<std::uint64_t> seed;
  std::string order;
  std::string mode;
  std::string schedule;
};

CommandOptions resolve(const RawOptions& raw) {
  CommandOptions opt;
  opt.scenario_path = raw.scenario;
  opt.out_dir = raw.out;
  for (const auto& s : raw.sweep) opt.sweep.push_back(fusedleo::parse_sweep(s));
  opt.seed = raw.seed;
  if (!raw.order.empty()) opt.order = fusedleo::parse_cell_order(raw.order);
  if (!raw.mode.empty()) opt.mode = fusedleo::parse_scheduler_mode(raw.mode);
  opt.schedule_path = raw.schedule;
  return opt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fused LEO ranging: schedules, feasibility checks and cost model"};
  app.require_subcommand(1);
  RawOptions raw;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", raw.scenario, "scenario INI file")->required();
    sub->add_option("--out", raw.out, "output directory (overrides [output] dir)");
  };

  using Command = int (*)(const CommandOptions&, std::ostream&);
  std::vector<std::pair<CLI::App*, Command>> commands;

  auto* cost = app.add_subcommand("cost", "evaluate the closed-form cost model");
  common(cost);
  cost->add_option("--sweep", raw.sweep, "key=a,b,c; repeatable, expands to the cross product");
  commands.emplace_back(cost, fusedleo::cmd_cost);

  auto* schedule = app.add_subcommand("schedule", "build and verify a ranging schedule");
  common(schedule);
  schedule->add_option("--seed", raw.seed, "scheduler RNG seed");
  schedule->add_option("--order", raw.order, "cell order: id, random or geo");
  schedule->add_option("--mode", raw.mode, "greedy or randomized");
  commands.emplace_back(schedule, fusedleo::cmd_schedule);

  auto* check = app.add_subcommand("check", "verify a schedule file against every constraint");
  common(check);
  check->add_option("--schedule", raw.schedule, "schedule.json or schedule.bin")->required();
  commands.emplace_back(check, fusedleo::cmd_check);

  auto* par = app.add_subcommand("par", "estimate the peak-to-average subscriber ratio");
  common(par);
  par->add_option("--seed", raw.seed, "orbit sampling seed");
  commands.emplace_back(par, fusedleo::cmd_par);

  auto* grid = app.add_subcommand("grid", "write the cell grid as CSV");
  common(grid);
  commands.emplace_back(grid, fusedleo::cmd_grid);

  auto* states = app.add_subcommand("states", "write SV positions at the scheduling epoch");
  common(states);
  commands.emplace_back(states, fusedleo::cmd_states);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fusedleo::kExitParse;
  }

  try {
    const CommandOptions opt = resolve(raw);
    for (const auto& [sub, run] : commands)
      if (sub->parsed()) return run(opt, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fusedleo::exit_code_for(e);
  }
  return fusedleo::kExitFailure;
}
