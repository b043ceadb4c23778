// star: batch experiments, summaries and map export for the stealthy
// active-search simulator.
//
//   star run --config exp.ini [--seed N] [--policy star,guts] [--runs N]
//            [--comms full,none] [--placement adversarial] [--out DIR] [--jsonl]
//   star summarize out/aggregate.csv [more.csv ...]
//   star dem --builtin corridor16 --out corridor16.asc [--traversability mask.txt]
//
// Exit codes: 0 success, 1 config error, 2 runtime error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "star/dem_io.hpp"
#include "star/errors.hpp"
#include "star/experiment.hpp"
#include "star/maps.hpp"

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stealthy terrain-aware multi-agent active search"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a batch experiment from a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> budget;
  std::string policy, comms, placement, out_dir;
  bool jsonl = false;
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--seed", seed, "Seed base (overrides run.seed)");
  run->add_option("--policy", policy, "Comma-separated policies: star,guts,rsi,coverage,random");
  run->add_option("--runs", runs, "Runs per sweep cell");
  run->add_option("--budget", budget, "Decision budget per mission");
  run->add_option("--comms", comms, "Comma-separated comms modes: full,none,drop:<p>");
  run->add_option("--placement", placement, "Comma-separated placements: uniform,adversarial");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--jsonl", jsonl, "Also write line-delimited JSON run records");

  auto* summarize = app.add_subcommand("summarize", "Summarize aggregate CSV files");
  std::vector<std::string> aggregates;
  summarize->add_option("files", aggregates, "aggregate.csv files")->required();

  auto* dem = app.add_subcommand("dem", "Write a builtin map as an ascii DEM");
  std::string builtin_name, dem_out, mask_out;
  dem->add_option("--builtin", builtin_name, "flat<N>, corridor16, pit8, random<N>:<seed>")
      ->required();
  dem->add_option("--out", dem_out, "Output DEM path")->required();
  dem->add_option("--traversability", mask_out, "Optional 0/1 traversability output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      star::ExperimentSpec spec = star::parse_config_file(config_path);
      if (seed) spec.base.seed = *seed;
      if (runs) spec.runs = *runs;
      if (budget) spec.base.budget = *budget;
      if (!out_dir.empty()) spec.out_dir = out_dir;
      if (!policy.empty()) {
        spec.policies = parse_list<star::PolicyKind>(policy, [](const std::string& s) {
          try {
            return star::parse_policy(s);
          } catch (const star::DomainError& e) {
            throw star::ConfigError(e.what());
          }
        });
      }
      if (!comms.empty()) spec.comms = parse_list<star::Comms>(comms, star::Comms::parse);
      if (!placement.empty()) {
        spec.placements = parse_list<star::Placement>(placement, star::parse_placement);
      }
      star::BatchOptions options;
      options.write_jsonl = jsonl;
      return star::run_batch(spec, std::cerr, options);
    }
    if (*summarize) {
      std::vector<std::filesystem::path> paths(aggregates.begin(), aggregates.end());
      std::cout << star::summarize_files(paths);
      return 0;
    }
    if (*dem) {
      const auto grid = star::maps::builtin(builtin_name);
      std::ofstream out(dem_out);
      star::write_dem_ascii(out, grid);
      if (!mask_out.empty()) {
        std::ofstream mask(mask_out);
        star::write_traversability(mask, grid);
      }
      return out ? 0 : 2;
    }
  } catch (const star::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const star::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
