#include "star/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "star/errors.hpp"
#include "star/maps.hpp"
#include "star/record_io.hpp"

namespace star {
namespace {

namespace fs = std::filesystem;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"terrain",
       {"builtin", "dem", "format", "pgm_scale", "cell_size", "eye_height", "traversability",
        "range_min", "range_max"}},
      {"agents", {"count", "start_row", "start_col", "comms"}},
      {"targets", {"count", "placement", "found_threshold"}},
      {"policy",
       {"name", "gamma", "lambda", "eps", "hyper_a", "hyper_b", "risk_weight",
        "candidate_stride", "em_max_iter", "em_tol"}},
      {"noise", {"base_sigma", "distance_scale"}},
      {"run", {"seed", "budget", "runs", "out"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

class Reader {
 public:
  explicit Reader(std::map<std::string, Section> sections) : sections_(std::move(sections)) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
  }

  std::string text(const std::string& section, const std::string& key) const {
    return find(section, key)->value;
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& out) const {
    if (const Entry* e = find(section, key)) out = parse<T>(section, key, e->value);
  }

  template <typename T>
  T parse(const std::string& section, const std::string& key, const std::string& value) const {
    T v{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (value.empty() || ec != std::errc() || ptr != end) {
      throw ConfigError(section + "." + key + ": expected a number, got '" + value + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) throw ConfigError(section + "." + key + ": must be finite");
    }
    return v;
  }

 private:
  std::map<std::string, Section> sections_;
};

std::map<std::string, Section> read_sections(std::istream& in) {
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().contains(current)) {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + current +
                          "]");
      }
      if (sections.contains(current)) {
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate section [" +
                          current + "]");
      }
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside of any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().at(current).contains(key)) {
      throw ConfigError("unknown key " + current + "." + key);
    }
    auto& section = sections[current];
    if (section.contains(key)) throw ConfigError("duplicate key " + current + "." + key);
    section[key] = {value, lineno};
  }
  return sections;
}

std::string file_label(std::string s) {
  std::replace(s.begin(), s.end(), ':', '-');
  return s;
}

}  // namespace

TerrainGrid load_terrain(const TerrainSource& source) {
  TerrainGrid grid;
  if (!source.builtin.empty()) {
    grid = maps::builtin(source.builtin);
  } else {
    DemOptions opts;
    opts.cell_size = source.cell_size;
    opts.pgm_scale = source.pgm_scale;
    opts.eye_height = source.eye_height;
    grid = load_dem_file(source.dem.string(), source.format, opts);
  }
  grid.set_eye_height(source.eye_height);
  if (!source.traversability.empty()) {
    std::ifstream in(source.traversability);
    if (!in) throw ConfigError("cannot open traversability file '" +
                               source.traversability.string() + "'");
    load_traversability(in, grid);
  }
  return grid;
}

void ExperimentSpec::validate() const {
  if (terrain.builtin.empty() == terrain.dem.empty()) {
    throw ConfigError("terrain needs exactly one of terrain.builtin or terrain.dem");
  }
  if (policies.empty() || agent_counts.empty() || comms.empty() || placements.empty()) {
    throw ConfigError("every sweep axis needs at least one value");
  }
  if (runs < 1) throw ConfigError("run.runs must be >= 1");
  for (int j : agent_counts) {
    if (j < 1) throw ConfigError("agents.count must be >= 1");
  }
  base.validate();
}

ExperimentSpec parse_config(std::istream& in, const fs::path& base_dir) {
  const Reader cfg(read_sections(in));
  ExperimentSpec spec;
  auto& base = spec.base;

  // terrain
  if (cfg.has("terrain", "builtin")) spec.terrain.builtin = cfg.text("terrain", "builtin");
  if (cfg.has("terrain", "dem")) {
    fs::path p = cfg.text("terrain", "dem");
    spec.terrain.dem = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (!cfg.has("terrain", "builtin") && !cfg.has("terrain", "dem")) {
    throw ConfigError("missing required key terrain.builtin or terrain.dem");
  }
  if (cfg.has("terrain", "builtin") && cfg.has("terrain", "dem")) {
    throw ConfigError("terrain.builtin and terrain.dem are mutually exclusive");
  }
  if (cfg.has("terrain", "format")) {
    const auto f = cfg.text("terrain", "format");
    if (f == "ascii") {
      spec.terrain.format = DemFormat::kAsciiGrid;
    } else if (f == "pgm16") {
      spec.terrain.format = DemFormat::kPgm16;
    } else {
      throw ConfigError("terrain.format: expected ascii or pgm16, got '" + f + "'");
    }
  }
  cfg.number("terrain", "pgm_scale", spec.terrain.pgm_scale);
  if (cfg.has("terrain", "cell_size")) {
    double cs = 0.0;
    cfg.number("terrain", "cell_size", cs);
    if (!(cs > 0.0)) throw ConfigError("terrain.cell_size must be > 0");
    spec.terrain.cell_size = cs;
  }
  cfg.number("terrain", "eye_height", spec.terrain.eye_height);
  if (cfg.has("terrain", "traversability")) {
    fs::path p = cfg.text("terrain", "traversability");
    spec.terrain.traversability = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  cfg.number("terrain", "range_min", base.limits.range_min);
  cfg.number("terrain", "range_max", base.limits.range_max);
  if (!(base.limits.range_min >= 0.0) || !(base.limits.range_max > base.limits.range_min)) {
    throw ConfigError("terrain.range_min/range_max need 0 <= range_min < range_max");
  }
  if (!(spec.terrain.pgm_scale > 0.0)) throw ConfigError("terrain.pgm_scale must be > 0");
  if (!(spec.terrain.eye_height >= 0.0)) throw ConfigError("terrain.eye_height must be >= 0");

  // agents
  if (cfg.has("agents", "count")) {
    spec.agent_counts.clear();
    for (const auto& v : split_list(cfg.text("agents", "count"))) {
      const int j = cfg.parse<int>("agents", "count", v);
      if (j < 1) throw ConfigError("agents.count must be >= 1");
      spec.agent_counts.push_back(j);
    }
  }
  cfg.number("agents", "start_row", base.start.row);
  cfg.number("agents", "start_col", base.start.col);
  if (cfg.has("agents", "comms")) {
    spec.comms.clear();
    for (const auto& v : split_list(cfg.text("agents", "comms"))) {
      spec.comms.push_back(Comms::parse(v));
    }
  }

  // targets
  cfg.number("targets", "count", base.targets);
  if (cfg.has("targets", "placement")) {
    spec.placements.clear();
    for (const auto& v : split_list(cfg.text("targets", "placement"))) {
      spec.placements.push_back(parse_placement(v));
    }
  }
  cfg.number("targets", "found_threshold", base.found_threshold);

  // policy
  if (cfg.has("policy", "name")) {
    spec.policies.clear();
    for (const auto& v : split_list(cfg.text("policy", "name"))) {
      try {
        spec.policies.push_back(parse_policy(v));
      } catch (const DomainError& e) {
        throw ConfigError(std::string("policy.name: ") + e.what());
      }
    }
  }
  cfg.number("policy", "gamma", base.policy.tradeoff);
  cfg.number("policy", "lambda", base.policy.lambda);
  cfg.number("policy", "eps", base.policy.eps);
  cfg.number("policy", "hyper_a", base.hyper.a);
  cfg.number("policy", "hyper_b", base.hyper.b);
  cfg.number("policy", "risk_weight", base.risk_weight);
  cfg.number("policy", "candidate_stride", base.candidate_stride);
  cfg.number("policy", "em_max_iter", base.em.max_iter);
  cfg.number("policy", "em_tol", base.em.tol);
  if (base.policy.tradeoff < 0.0) throw ConfigError("policy.gamma must be >= 0");
  if (base.policy.lambda < 0.0) throw ConfigError("policy.lambda must be >= 0");

  // noise
  cfg.number("noise", "base_sigma", base.noise.base_sigma);
  cfg.number("noise", "distance_scale", base.noise.distance_scale);

  // run
  if (!cfg.has("run", "seed")) throw ConfigError("missing required key run.seed");
  cfg.number("run", "seed", base.seed);
  cfg.number("run", "budget", base.budget);
  cfg.number("run", "runs", spec.runs);
  if (cfg.has("run", "out")) {
    fs::path p = cfg.text("run", "out");
    spec.out_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  spec.validate();
  return spec;
}

ExperimentSpec parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

std::string SweepCell::label() const {
  return std::string(policy_name(policy)) + "_J" + std::to_string(agents) + "_" + comms.name() +
         "_" + placement_name(placement);
}

std::vector<SweepCell> sweep_cells(const ExperimentSpec& spec) {
  std::vector<SweepCell> cells;
  for (auto placement : spec.placements) {
    for (const auto& comms : spec.comms) {
      for (int agents : spec.agent_counts) {
        for (auto policy : spec.policies) cells.push_back({policy, agents, comms, placement});
      }
    }
  }
  return cells;
}

std::uint64_t mission_seed(std::uint64_t seed_base, int run) {
  return seed_base + static_cast<std::uint64_t>(run);
}

std::vector<AggregateRow> aggregate_curves(const SweepCell& cell,
                                           const std::vector<RunRecord>& records, int targets,
                                           int budget) {
  std::vector<AggregateRow> rows;
  if (records.empty()) return rows;
  std::vector<double> recovery(static_cast<std::size_t>(budget), 0.0);
  std::vector<double> penalty(static_cast<std::size_t>(budget), 0.0);
  for (const auto& rec : records) {
    const auto curve = metric_curves(rec, targets, budget);
    for (int s = 0; s < budget; ++s) {
      recovery[static_cast<std::size_t>(s)] += curve[static_cast<std::size_t>(s)].recovery;
      penalty[static_cast<std::size_t>(s)] += curve[static_cast<std::size_t>(s)].penalty;
    }
  }
  const double n = static_cast<double>(records.size());
  for (int s = 0; s < budget; ++s) {
    rows.push_back({std::string(policy_name(cell.policy)), cell.agents, cell.comms.name(),
                    placement_name(cell.placement), s + 1, static_cast<int>(records.size()),
                    recovery[static_cast<std::size_t>(s)] / n,
                    penalty[static_cast<std::size_t>(s)] / n});
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << r.agents << ',' << r.comms << ',' << r.placement << ',' << r.step
        << ',' << r.runs << ',' << format_real(r.mean_recovery) << ','
        << format_real(r.mean_penalty) << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kAggregateCsvHeader) {
    throw ParseError("aggregate CSV header mismatch", 1, 1);
  }
  std::vector<AggregateRow> rows;
  std::size_t lineno = 1;
  auto num = [&](const std::string& s, std::size_t col, auto& out) {
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (s.empty() || ec != std::errc() || ptr != end) {
      throw ParseError("bad aggregate field '" + s + "'", lineno, col);
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 8) {
      throw ParseError("expected 8 fields, got " + std::to_string(f.size()), lineno, 1);
    }
    AggregateRow r;
    r.policy = f[0];
    num(f[1], 2, r.agents);
    r.comms = f[2];
    r.placement = f[3];
    num(f[4], 5, r.step);
    num(f[5], 6, r.runs);
    num(f[6], 7, r.mean_recovery);
    num(f[7], 8, r.mean_penalty);
    rows.push_back(std::move(r));
  }
  return rows;
}

int run_batch(const ExperimentSpec& spec, std::ostream& log, const BatchOptions& options) {
  try {
    spec.validate();
    const World world(load_terrain(spec.terrain), spec.base.limits);
    fs::create_directories(spec.out_dir / "runs");

    std::vector<AggregateRow> aggregate;
    for (const auto& cell : sweep_cells(spec)) {
      std::vector<RunRecord> records;
      for (int r = 0; r < spec.runs; ++r) {
        MissionConfig cfg = spec.base;
        cfg.policy.kind = cell.policy;
        cfg.agents = cell.agents;
        cfg.comms = cell.comms;
        cfg.placement = cell.placement;
        cfg.seed = mission_seed(spec.base.seed, r);
        RunRecord rec = run_mission(world, cfg);

        const std::string stem = file_label(cell.label()) + "_run" + std::to_string(r);
        std::ofstream csv(spec.out_dir / "runs" / (stem + ".csv"));
        write_run_csv(csv, rec);
        if (options.write_jsonl) {
          std::ofstream jsonl(spec.out_dir / "runs" / (stem + ".jsonl"));
          write_run_jsonl(jsonl, rec);
        }
        if (!csv) throw std::runtime_error("failed writing run CSV for " + stem);
        log << cell.label() << " run " << r << ": found " << rec.targets_found << "/"
            << rec.targets << ", penalty " << rec.final_penalty << '\n';
        records.push_back(std::move(rec));
      }
      auto rows = aggregate_curves(cell, records, spec.base.targets, spec.base.budget);
      aggregate.insert(aggregate.end(), rows.begin(), rows.end());
    }
    std::ofstream agg(spec.out_dir / "aggregate.csv");
    write_aggregate_csv(agg, aggregate);
    if (!agg) throw std::runtime_error("failed writing aggregate CSV");
    return 0;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    log << "config error: " << e.what() << '\n';
    return 1;
  } catch (const StructuralError& e) {
    log << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    log << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

std::string summarize(const std::vector<AggregateRow>& rows) {
  struct CellSummary {
    std::string policy;
    int agents = 0;
    std::string comms;
    std::string placement;
    int runs = 0;
    int last_step = 0;
    double final_recovery = 0.0;
    double final_penalty = 0.0;
    int to_half = -1;
  };
  std::vector<CellSummary> cells;
  auto find_cell = [&](const AggregateRow& r) -> CellSummary& {
    for (auto& c : cells) {
      if (c.policy == r.policy && c.agents == r.agents && c.comms == r.comms &&
          c.placement == r.placement) {
        return c;
      }
    }
    cells.push_back({r.policy, r.agents, r.comms, r.placement});
    return cells.back();
  };
  for (const auto& r : rows) {
    auto& c = find_cell(r);
    c.runs = r.runs;
    if (r.step >= c.last_step) {
      c.last_step = r.step;
      c.final_recovery = r.mean_recovery;
      c.final_penalty = r.mean_penalty;
    }
    if (r.mean_recovery >= 0.5 && (c.to_half < 0 || r.step < c.to_half)) c.to_half = r.step;
  }

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "policy     agents comms      placement    runs  final_F/K  final_penalty  "
         "decisions_to_50%\n";
  for (const auto& c : cells) {
    out << std::left << std::setw(11) << c.policy << std::setw(7) << c.agents << std::setw(11)
        << c.comms << std::setw(13) << c.placement << std::setw(6) << c.runs << std::setw(11)
        << c.final_recovery << std::setw(15) << c.final_penalty;
    if (c.to_half >= 0) {
      out << c.to_half;
    } else {
      out << "-";
    }
    out << '\n';
  }
  out << "\npairwise deltas (first - second):\n";
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const auto& x = cells[a];
      const auto& y = cells[b];
      if (x.agents != y.agents || x.comms != y.comms || x.placement != y.placement) continue;
      if (x.policy == y.policy) continue;
      out << x.policy << " vs " << y.policy << " [J" << x.agents << " " << x.comms << " "
          << x.placement << "]: recovery " << std::showpos << (x.final_recovery - y.final_recovery)
          << ", penalty " << (x.final_penalty - y.final_penalty) << std::noshowpos << '\n';
    }
  }
  return out.str();
}

std::string summarize_files(const std::vector<fs::path>& aggregate_files) {
  std::vector<AggregateRow> rows;
  for (const auto& p : aggregate_files) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open aggregate file '" + p.string() + "'");
    auto more = read_aggregate_csv(in);
    rows.insert(rows.end(), more.begin(), more.end());
  }
  return summarize(rows);
}

}  // namespace star
