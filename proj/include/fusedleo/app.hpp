#pragma once

#include <boost/property_tree/ptree.hpp>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fusedleo/constellation.hpp"
#include "fusedleo/cost_model.hpp"
#include "fusedleo/geo_cells.hpp"
#include "fusedleo/population.hpp"
#include "fusedleo/schedule.hpp"
#include "fusedleo/scheduler.hpp"

namespace fusedleo {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // unexpected internal error
  kExitParse = 2,    // malformed input or invalid parameters
  kExitGeometry = 3, // visibility or geometry
  kExitInfeasible = 4,
  kExitIo = 5,
};

/// Exit status for an exception escaping a command.
int exit_code_for(const std::exception& e);

// Cost-model inputs a scenario may override. Unset values take the baseline
// parameter set, except n_sats which defaults to the constellation size.
struct CostOverrides {
  double n_cells = 850'000;
  std::optional<double> n_sats;
  double n_adj = 6;
  CostParams base;  // par, channel rate, steering and uplink constants
};

struct PopulationSource {
  std::string raster;            // global density raster; empty = synthetic
  std::string reference_raster;  // region for the threshold; optional
  SynthSpec synth;
};

struct Scenario {
  GridParams grid;
  ConstellationConfig constellation;
  VisibilityOptions visibility;
  TimingParams timing;
  CostOverrides cost;
  ParParams population;
  PopulationSource population_source;
  SchedulerConfig scheduler;
  std::string output_dir = "out";

  CostParams cost_params() const;
};

/// INI text with sections [grid], [constellation], [shell_1].., [timing],
/// [cost], [population], [scheduler], [output]. Relative raster paths resolve
/// against `base_dir`. Throws ParseError naming the offending key.
boost::property_tree::ptree read_scenario_tree(std::istream& in);
boost::property_tree::ptree load_scenario_tree(const std::string& path);
Scenario scenario_from_tree(const boost::property_tree::ptree& tree, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// One --sweep axis: `key=a,b,c` with key `section.name` or a bare name that
/// is unique across sections.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
SweepAxis parse_sweep(const std::string& text);

/// Every combination of sweep values applied to `base`, in row-major order
/// (last axis fastest).
std::vector<boost::property_tree::ptree> expand_sweep(const boost::property_tree::ptree& base,
                                                      const std::vector<SweepAxis>& axes);

struct CommandOptions {
  std::string scenario_path;
  std::string out_dir;  // overrides [output] dir when non-empty
  std::vector<SweepAxis> sweep;
  std::optional<std::uint64_t> seed;
  std::optional<CellOrder> order;
  std::optional<SchedulerMode> mode;
  std::string schedule_path;  // for check
};

// Commands write their files under the output directory, print a short
// summary to `log`, and return an exit status. Exceptions propagate; the
// caller maps them with exit_code_for.
int cmd_cost(const CommandOptions& opt, std::ostream& log);
int cmd_schedule(const CommandOptions& opt, std::ostream& log);
int cmd_check(const CommandOptions& opt, std::ostream& log);
int cmd_par(const CommandOptions& opt, std::ostream& log);
int cmd_grid(const CommandOptions& opt, std::ostream& log);
int cmd_states(const CommandOptions& opt, std::ostream& log);

/// Reads a schedule in either the JSON or the packed binary format.
GnssSchedule load_schedule(const std::string& path);

}  // namespace fusedleo
