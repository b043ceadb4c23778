#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "star/dem_io.hpp"
#include "star/engine.hpp"

namespace star {

/// Where the mission map comes from: a builtin name or a DEM file.
struct TerrainSource {
  std::string builtin;
  std::filesystem::path dem;
  DemFormat format = DemFormat::kAsciiGrid;
  double pgm_scale = 1.0;
  std::optional<double> cell_size;
  double eye_height = 1.5;
  std::filesystem::path traversability;
};

TerrainGrid load_terrain(const TerrainSource& source);

/// A base mission plus the sweep axes varied across the batch.
struct ExperimentSpec {
  TerrainSource terrain;
  MissionConfig base;
  std::vector<PolicyKind> policies{PolicyKind::kStar};
  std::vector<int> agent_counts{2};
  std::vector<Comms> comms{Comms::full()};
  std::vector<Placement> placements{Placement::kUniform};
  int runs = 1;
  std::filesystem::path out_dir = "star_out";

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Strict INI-style config: [terrain] [agents] [targets] [policy] [noise] [run]
/// sections of key = value lines, '#' comments. Sweep axes take
/// comma-separated lists. Unknown or duplicate keys and sections are errors.
/// Relative paths resolve against `base_dir`.
ExperimentSpec parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentSpec parse_config_file(const std::filesystem::path& path);

/// One combination of the sweep axes.
struct SweepCell {
  PolicyKind policy = PolicyKind::kStar;
  int agents = 1;
  Comms comms;
  Placement placement = Placement::kUniform;

  std::string label() const;
};

std::vector<SweepCell> sweep_cells(const ExperimentSpec& spec);

/// Mission seed of run `run` in every sweep cell.
std::uint64_t mission_seed(std::uint64_t seed_base, int run);

inline constexpr const char* kAggregateCsvHeader =
    "policy,agents,comms,placement,step,runs,mean_recovery,mean_penalty";

struct AggregateRow {
  std::string policy;
  int agents = 0;
  std::string comms;
  std::string placement;
  int step = 0;
  int runs = 0;
  double mean_recovery = 0.0;
  double mean_penalty = 0.0;
};

/// Mean recovery and penalty curves over runs, steps 1..budget.
std::vector<AggregateRow> aggregate_curves(const SweepCell& cell,
                                           const std::vector<RunRecord>& records, int targets,
                                           int budget);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
/// Throws ParseError on a schema mismatch.
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

struct BatchOptions {
  bool write_jsonl = false;
};

/// Runs every sweep cell x run, writing <out>/runs/<cell>_run<r>.csv and
/// <out>/aggregate.csv. Returns 0 on success, 1 on a config error, 2 on a
/// runtime error.
int run_batch(const ExperimentSpec& spec, std::ostream& log, const BatchOptions& options = {});

/// Per sweep cell: final mean F/K, final mean penalty, decisions to 50%
/// recovery; then pairwise policy deltas within matching (agents, comms,
/// placement) groups.
std::string summarize(const std::vector<AggregateRow>& rows);
std::string summarize_files(const std::vector<std::filesystem::path>& aggregate_files);

}  // namespace star
