#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scengraph/app_sim.hpp"
#include "scengraph/engine.hpp"

namespace scengraph::eval {

// One required operation with its concrete widget binding.
struct ScenOp {
  std::string widget_id;
  std::string operation;
  std::string parameter;  // empty when the operation carries none

  bool operator==(const ScenOp&) const = default;
};

// The authored required-operation sequence for one sub-scenario.
struct ScenOpSet {
  std::string sub_scenario_id;
  std::vector<ScenOp> ops;
};

// Golden file I/O: `op: <widget_id> <operation> "<parameter>"` lines.
ScenOpSet load_scen_ops(const std::string& path);
void save_scen_ops(const ScenOpSet& set, const std::string& path);

// Ordered walk over required vs generated operations. An event counts
// only while widget, operation and parameter all match exactly; the
// first mismatch fails every later event. Returns a percentage.
double gen_rate(const std::vector<ScenOp>& required,
                const std::vector<ScenOp>& generated);

// Matched-prefix length used by gen_rate (exposed for aggregation).
std::size_t matched_prefix(const std::vector<ScenOp>& required,
                           const std::vector<ScenOp>& generated);

// 100 * |covered| / |all|; covered must be a subset of all.
double scen_cov(const std::set<std::string>& all_subs,
                const std::set<std::string>& covered);

using BugKey = std::pair<std::string, std::string>;  // (app_id, bug_id)

struct BugDiff {
  std::set<BugKey> only_engine;
  std::set<BugKey> both;
  std::set<BugKey> only_baseline;
};

BugDiff bug_diff(const std::set<BugKey>& engine_bugs,
                 const std::set<BugKey>& baseline_bugs_scoped);

// Converts a run's logged events into comparable operations.
std::vector<ScenOp> to_scen_ops(const std::vector<sim::LoggedEvent>& events);

// Per-app evaluation against a golden set: each completed run is paired
// greedily with the golden it matches best (longest aligned prefix),
// one run per golden.
struct AppEvaluation {
  std::string app_id;
  std::size_t required_total = 0;
  std::size_t matched_total = 0;
  double gen_rate_event_weighted = 0.0;
  double gen_rate_scenario_averaged = 0.0;
  double scen_cov_percent = 0.0;
  std::set<std::string> covered;
  std::set<std::string> all_subs;
  std::vector<std::pair<std::string, double>> per_sub_rates;
};

AppEvaluation evaluate_app(const std::string& app_id,
                           const std::vector<ScenOpSet>& goldens,
                           const engine::ScenarioRunResult& result);

struct MetricReport {
  std::vector<AppEvaluation> apps;
  std::optional<BugDiff> bugs;
  std::set<BugKey> engine_bugs;
  std::set<BugKey> baseline_bugs;

  // Aggregates over all apps, labeled by weighting scheme. The two
  // disagree whenever apps differ in size; both are reported.
  double aggregate_event_weighted() const;
  double aggregate_scenario_averaged() const;
};

// Structured report plus a comma-separated summary table. The timestamp
// lands on the single header line.
std::string metric_report_to_string(const MetricReport& report,
                                    const std::string& timestamp);
std::string metric_report_to_csv(const MetricReport& report);

}  // namespace scengraph::eval
