#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "star/engine.hpp"

namespace star {

/// Fixed column set of per-run CSV files.
inline constexpr const char* kRunCsvHeader =
    "step,agent_id,goal_row,goal_col,heading,raw_reward,raw_penalty,targets_found,"
    "cum_true_penalty";

void write_run_csv(std::ostream& out, const RunRecord& record);
/// Parses a run CSV back into decision rows (the CSV columns only). Throws
/// ParseError on a header mismatch or a malformed row.
std::vector<DecisionRow> read_run_csv(std::istream& in);

/// One JSON object per decision followed by a summary object.
void write_run_jsonl(std::ostream& out, const RunRecord& record);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

}  // namespace star
