#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scengraph/app_sim.hpp"
#include "scengraph/config.hpp"
#include "scengraph/ekg.hpp"
#include "scengraph/errors.hpp"
#include "scengraph/screen_analysis.hpp"

namespace scengraph::engine {

// One generated test event: the widget as seen on screen plus the
// knowledge that selected it.
struct TestEvent {
  Rect bbox;
  std::optional<std::string> widget_text;
  screen::WidgetType widget_type = screen::WidgetType::kUnknown;
  std::string operation;
  std::optional<std::string> parameter;
  bool tail = false;
  bool branch = false;
  ekg::EntityId matched_entity = -1;
};

// Append-only memory of executed events; reset only at reinitialization.
struct TestContext {
  std::vector<TestEvent> events;

  bool empty() const { return events.empty(); }
  ekg::QueryContext as_query() const {
    ekg::QueryContext q;
    if (!events.empty()) q.last_matched = events.back().matched_entity;
    return q;
  }
};

// Input literals per entity label, with valid and invalid variants.
class SeedTable {
 public:
  struct Seed {
    std::string valid;
    std::string invalid;
  };

  static SeedTable load(const std::string& path);
  static SeedTable from_lines(const std::vector<std::string>& lines);

  std::optional<Seed> lookup(const std::string& entity_label) const;
  bool empty() const { return seeds_.empty(); }

 private:
  std::map<std::string, Seed> seeds_;
};

enum class TerminationCase { kCompleted = 1, kContinue = 2, kConflict = 3 };

struct Termination {
  TerminationCase kind = TerminationCase::kContinue;
  // Set for the combination the classification table does not name:
  // tail reached but the query still returned candidates.
  bool anomaly = false;
};

// Maps (last event tail tag, query result emptiness) onto the three
// termination cases. `last_tail` is false when nothing ran yet.
Termination classify_termination(bool last_tail, bool query_empty);

// Composes the screen analysis stages into the query structure.
screen::GuiStructure analyze_state(const corpus::ScreenBundle& bundle,
                                   const PipelineConfig& config = {});

// Picks the highest-probability viable candidate and resolves its input
// parameter (seed table first, then the entity-recorded literal).
// Returns nullopt when no candidate has positive probability.
std::optional<TestEvent> select_action(const screen::GuiStructure& structure,
                                       const TestContext& context,
                                       const ekg::Ekg& graph,
                                       const SeedTable& seeds,
                                       const ekg::OpLegality& legality,
                                       bool use_invalid_inputs = false);

// One exploration path from app launch to a termination case.
struct SubScenarioRun {
  std::vector<sim::LoggedEvent> events;
  TerminationCase termination = TerminationCase::kConflict;
  bool anomaly = false;
  std::optional<std::string> crash;  // bug id if the path crashed
};

struct ScenarioRunResult {
  std::string app_id;
  std::string scenario_id;
  std::vector<SubScenarioRun> runs;
  long long wall_ms = 0;

  std::size_t completed() const;
  std::vector<std::string> crashes() const;  // sorted unique bug ids
};

// Thrown when the step cap trips; carries everything explored so far.
class RunAborted : public RunAbortedError {
 public:
  RunAborted(const std::string& what, ScenarioRunResult partial)
      : RunAbortedError(what), partial_result(std::move(partial)) {}

  ScenarioRunResult partial_result;
};

// Depth-first sub-scenario exploration: render, analyze, query, execute
// the top candidate, and reinitialize through recorded branch points
// until no unexplored alternatives remain.
ScenarioRunResult run_scenario(const sim::AppModel& app, const ekg::Ekg& graph,
                               const SeedTable& seeds,
                               const ekg::OpLegality& legality,
                               const PipelineConfig& config = {},
                               bool use_invalid_inputs = false);

// Structured run result serialization (docs/formats.md). The timestamp
// argument lands on the single header line; pass a fixed string for
// reproducible output.
std::string run_result_to_string(const ScenarioRunResult& result,
                                 const std::string& timestamp);
ScenarioRunResult run_result_from_string(const std::string& content,
                                         const std::string& origin =
                                             "<string>");

}  // namespace scengraph::engine
