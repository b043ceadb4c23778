#include "star/record_io.hpp"

#include <charconv>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "star/errors.hpp"

namespace star {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& text, std::size_t row, std::size_t col) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("bad CSV field '" + text + "'", row, col);
  }
  return value;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << kRunCsvHeader << '\n';
  for (const auto& r : record.rows) {
    out << r.step << ',' << r.agent << ',' << r.goal_row << ',' << r.goal_col << ','
        << heading_name(r.heading) << ',' << format_real(r.raw_reward) << ','
        << format_real(r.raw_penalty) << ',' << r.targets_found << ','
        << format_real(r.cum_true_penalty) << '\n';
  }
}

std::vector<DecisionRow> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) {
    throw ParseError("run CSV header mismatch", 1, 1);
  }
  std::vector<DecisionRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) {
      throw ParseError("expected 9 fields, got " + std::to_string(f.size()), lineno, 1);
    }
    DecisionRow r;
    r.step = parse_field<int>(f[0], lineno, 1);
    r.agent = parse_field<int>(f[1], lineno, 2);
    r.goal_row = parse_field<int>(f[2], lineno, 3);
    r.goal_col = parse_field<int>(f[3], lineno, 4);
    try {
      r.heading = parse_heading(f[4]);
    } catch (const DomainError&) {
      throw ParseError("bad heading '" + f[4] + "'", lineno, 5);
    }
    r.raw_reward = parse_field<double>(f[5], lineno, 6);
    r.raw_penalty = parse_field<double>(f[6], lineno, 7);
    r.targets_found = parse_field<int>(f[7], lineno, 8);
    r.cum_true_penalty = parse_field<double>(f[8], lineno, 9);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_run_jsonl(std::ostream& out, const RunRecord& record) {
  for (const auto& r : record.rows) {
    nlohmann::ordered_json j;
    j["type"] = "decision";
    j["step"] = r.step;
    j["agent_id"] = r.agent;
    j["goal"] = {r.goal_row, r.goal_col};
    j["heading"] = std::string(heading_name(r.heading));
    j["raw_reward"] = r.raw_reward;
    j["raw_penalty"] = r.raw_penalty;
    j["path_steps"] = r.path_steps;
    j["targets_found"] = r.targets_found;
    j["cum_true_penalty"] = r.cum_true_penalty;
    j["agent_penalty"] = r.agent_penalty;
    j["sensed"] = r.sensed;
    j["y"] = r.measurements;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["type"] = "summary";
  s["targets"] = record.targets;
  s["targets_found"] = record.targets_found;
  s["decisions"] = record.decisions();
  s["initial_penalty"] = record.initial_penalty;
  s["final_penalty"] = record.final_penalty;
  s["agent_penalties"] = record.agent_penalties;
  s["target_cells"] = record.target_cells;
  nlohmann::ordered_json rec = nlohmann::ordered_json::array();
  for (const auto& e : record.recoveries) {
    rec.push_back({{"step", e.step}, {"agent_id", e.agent}, {"cell", e.cell}});
  }
  s["recoveries"] = rec;
  out << s.dump() << '\n';
}

}  // namespace star
