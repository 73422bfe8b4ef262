#pragma once
#include <string>
#include <vector>

#include "viewdrift/harness/experiment.hpp"

namespace viewdrift::harness {

// step,total,move,prog,fid,tv,nps
void write_trace_csv(const std::string& path, const std::vector<attack::TracePoint>& trace);

// Fixed column order; doubles at 17 significant digits, bools as 0/1, so the
// same run always produces the same bytes. read + write round-trips.
void write_records_csv(const std::string& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(const std::string& path);

// Optional blocks for the aggregate summary.
struct SummaryExtras {
  std::vector<FoldSummary> folds;
  std::vector<AblationRow> ablation;
  std::vector<SizePoint> size_curve;
  std::vector<std::string> notes;
  std::string group_goal_granularity = "per-training-split";
};

// Aggregates over the ok records: overall, per category and per group means,
// plus status counts and the extras. Deterministic key order.
void write_summary_json(const std::string& path, const std::vector<ExperimentRecord>& records,
                        const SummaryExtras& extras = {});

}  // namespace viewdrift::harness
