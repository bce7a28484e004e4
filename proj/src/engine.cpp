#include "scengraph/engine.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "scengraph/text_analysis.hpp"

namespace scengraph::engine {

SeedTable SeedTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open seed file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return from_lines(lines);
}

SeedTable SeedTable::from_lines(const std::vector<std::string>& lines) {
  SeedTable t;
  for (const auto& raw : lines) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::size_t p1 = line.find('|');
    std::size_t p2 = p1 == std::string::npos ? std::string::npos
                                             : line.find('|', p1 + 1);
    if (p2 == std::string::npos) {
      throw Error("seed line needs label|valid|invalid: " + line);
    }
    Seed seed;
    seed.valid = line.substr(p1 + 1, p2 - p1 - 1);
    seed.invalid = line.substr(p2 + 1);
    t.seeds_[text::normalize(line.substr(0, p1))] = seed;
  }
  return t;
}

std::optional<SeedTable::Seed> SeedTable::lookup(
    const std::string& entity_label) const {
  auto it = seeds_.find(text::normalize(entity_label));
  if (it == seeds_.end()) return std::nullopt;
  return it->second;
}

Termination classify_termination(bool last_tail, bool query_empty) {
  if (last_tail && query_empty) return {TerminationCase::kCompleted, false};
  if (!last_tail && !query_empty) return {TerminationCase::kContinue, false};
  if (!last_tail && query_empty) return {TerminationCase::kConflict, false};
  return {TerminationCase::kCompleted, true};
}

screen::GuiStructure analyze_state(const corpus::ScreenBundle& bundle,
                                   const PipelineConfig& config) {
  return screen::analyze_screen(bundle.raster, bundle.text_layer, config);
}

namespace {

TestEvent to_test_event(const ekg::WidgetCandidate& cand, const ekg::Ekg& graph,
                        const SeedTable& seeds, bool use_invalid) {
  TestEvent ev;
  ev.bbox = cand.bbox;
  ev.widget_text = cand.widget_text;
  ev.widget_type = cand.widget_type;
  ev.operation = cand.operation;
  ev.tail = cand.tail;
  ev.branch = cand.branch;
  ev.matched_entity = cand.matched_entity;
  if (graph.analyzer().vocabulary().arity(cand.operation) ==
      text::ParamArity::kRequired) {
    const std::string& label = graph.entity(cand.matched_entity).label;
    if (auto seed = seeds.lookup(label)) {
      ev.parameter = use_invalid ? seed->invalid : seed->valid;
    } else if (cand.parameter) {
      // Fall back to the literal the reports recorded for this entity.
      ev.parameter = cand.parameter;
    } else {
      throw SeedMissingError("no seed value for input target '" + label + "'");
    }
  }
  return ev;
}

}  // namespace

std::optional<TestEvent> select_action(const screen::GuiStructure& structure,
                                       const TestContext& context,
                                       const ekg::Ekg& graph,
                                       const SeedTable& seeds,
                                       const ekg::OpLegality& legality,
                                       bool use_invalid_inputs) {
  auto candidates = graph.query(structure, context.as_query(), legality);
  for (const auto& cand : candidates) {
    if (cand.probability <= 0.0) break;  // sorted: zeros trail
    return to_test_event(cand, graph, seeds, use_invalid_inputs);
  }
  return std::nullopt;
}

std::size_t ScenarioRunResult::completed() const {
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.termination == TerminationCase::kCompleted) ++n;
  }
  return n;
}

std::vector<std::string> ScenarioRunResult::crashes() const {
  std::set<std::string> bugs;
  for (const auto& r : runs) {
    if (r.crash) bugs.insert(*r.crash);
  }
  return {bugs.begin(), bugs.end()};
}

namespace {

struct BranchFrame {
  ekg::EntityId branch_entity = -1;
  std::vector<sim::ReplayEvent> prefix;
  std::vector<TestEvent> context_prefix;
  std::vector<TestEvent> alternatives;  // descending probability
};

// Representative of the matched entity's similar closure, used to tell
// genuinely different branch alternatives apart.
ekg::EntityId closure_rep(const ekg::Ekg& graph, ekg::EntityId id) {
  // Similar closures are small; a scan over similar edges suffices.
  std::set<ekg::EntityId> seen{id};
  std::vector<ekg::EntityId> stack{id};
  while (!stack.empty()) {
    ekg::EntityId u = stack.back();
    stack.pop_back();
    for (const auto& r : graph.relationships()) {
      if (r.kind != ekg::RelationKind::kCntCntSimilar) continue;
      ekg::EntityId other = r.src == u ? r.dst : (r.dst == u ? r.src : -1);
      if (other >= 0 && seen.insert(other).second) stack.push_back(other);
    }
  }
  return *seen.begin();
}

// Taps the center of a detected box and returns the declared widget
// under it, mirroring coordinate-driven execution on a live device.
const sim::SimWidget* widget_at_box(const sim::Screen& screen,
                                    const Rect& bbox) {
  int cx = (bbox.x0 + bbox.x1) / 2;
  int cy = (bbox.y0 + bbox.y1) / 2;
  for (const auto& w : screen.widgets) {
    if (w.bbox.contains(cx, cy)) return &w;
  }
  return nullptr;
}

struct ExploreOutcome {
  Termination termination;
  std::optional<std::string> crash;
};

}  // namespace

ScenarioRunResult run_scenario(const sim::AppModel& app, const ekg::Ekg& graph,
                               const SeedTable& seeds,
                               const ekg::OpLegality& legality,
                               const PipelineConfig& config,
                               bool use_invalid_inputs) {
  auto t0 = std::chrono::steady_clock::now();
  ScenarioRunResult result;
  result.app_id = app.app_id;
  result.scenario_id = graph.scenario_id();

  auto finish = [&]() {
    result.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  };

  std::vector<BranchFrame> frames;

  // Explores from the session's current state to a termination case.
  // Appends executed events to `context`; pushes branch frames.
  auto explore = [&](sim::Session& session,
                     TestContext& context) -> ExploreOutcome {
    // Oscillation guard: (screen, last matched entity) pairs seen on
    // this path, including the replayed prefix.
    std::set<std::pair<std::string, ekg::EntityId>> seen;
    {
      const auto& log = session.event_log();
      for (std::size_t i = 0; i < log.size(); ++i) {
        ekg::EntityId last =
            i == 0 ? -1 : context.events[i - 1].matched_entity;
        seen.insert({log[i].screen_id, last});
      }
    }
    while (true) {
      if (static_cast<int>(session.event_log().size()) > config.step_cap) {
        finish();
        throw RunAborted("step cap of " + std::to_string(config.step_cap) +
                             " events exceeded on " + app.app_id,
                         result);
      }
      auto bundle = sim::render(session.current_screen());
      auto structure = analyze_state(bundle, config);
      auto candidates = graph.query(structure, context.as_query(), legality);
      std::vector<TestEvent> viable;
      for (const auto& c : candidates) {
        if (c.probability <= 0.0) break;
        viable.push_back(to_test_event(c, graph, seeds, use_invalid_inputs));
      }

      bool last_tail = !context.empty() && context.events.back().tail;
      if (viable.empty() || last_tail) {
        return {classify_termination(last_tail, viable.empty()), std::nullopt};
      }

      ekg::EntityId last =
          context.empty() ? -1 : context.events.back().matched_entity;
      if (!seen.insert({session.current_screen_id(), last}).second) {
        // Same screen queried with the same knowledge; the path loops.
        return {{TerminationCase::kConflict, true}, std::nullopt};
      }

      // Record a branch frame when the knowledge diverges here: at the
      // scenario start or right after a branch-point event.
      bool at_branch = context.empty() || context.events.back().branch;
      if (at_branch && viable.size() > 1) {
        ekg::EntityId chosen_rep = closure_rep(graph, viable[0].matched_entity);
        BranchFrame frame;
        frame.branch_entity = last;
        for (const auto& ev : session.event_log()) {
          frame.prefix.push_back(
              sim::ReplayEvent{ev.widget_id, ev.operation, ev.parameter});
        }
        frame.context_prefix = context.events;
        std::set<ekg::EntityId> taken{chosen_rep};
        for (std::size_t i = 1; i < viable.size(); ++i) {
          ekg::EntityId rep = closure_rep(graph, viable[i].matched_entity);
          if (taken.insert(rep).second) frame.alternatives.push_back(viable[i]);
        }
        if (!frame.alternatives.empty()) frames.push_back(std::move(frame));
      }

      TestEvent ev = viable.front();
      const sim::SimWidget* target =
          widget_at_box(session.current_screen(), ev.bbox);
      if (!target || !target->actions.count(ev.operation)) {
        // The knowledge suggested an event the app refuses; that is a
        // conflict between generation and the graph.
        context.events.push_back(ev);
        return {{TerminationCase::kConflict, true}, std::nullopt};
      }
      session.execute_event(target->widget_id, ev.operation,
                            ev.parameter.value_or(""));
      context.events.push_back(ev);
      if (session.crashed()) {
        Termination t{ev.tail ? TerminationCase::kCompleted
                              : TerminationCase::kConflict,
                      false};
        return {t, session.crashed()};
      }
    }
  };

  sim::Session session(app);
  TestContext context;
  while (true) {
    ExploreOutcome outcome = explore(session, context);
    SubScenarioRun run;
    run.events = session.event_log();
    run.termination = outcome.termination.kind;
    run.anomaly = outcome.termination.anomaly;
    run.crash = outcome.crash;
    result.runs.push_back(std::move(run));

    while (!frames.empty() && frames.back().alternatives.empty()) {
      frames.pop_back();
    }
    if (frames.empty()) break;

    BranchFrame& frame = frames.back();
    TestEvent alt = frame.alternatives.front();
    frame.alternatives.erase(frame.alternatives.begin());

    session = sim::reset_and_replay(app, frame.prefix);
    context.events = frame.context_prefix;

    const sim::SimWidget* target =
        widget_at_box(session.current_screen(), alt.bbox);
    if (!target || !target->actions.count(alt.operation)) {
      SubScenarioRun bad;
      bad.events = session.event_log();
      bad.termination = TerminationCase::kConflict;
      bad.anomaly = true;
      result.runs.push_back(std::move(bad));
      continue;
    }
    session.execute_event(target->widget_id, alt.operation,
                          alt.parameter.value_or(""));
    context.events.push_back(alt);
    if (session.crashed()) {
      SubScenarioRun run_crash;
      run_crash.events = session.event_log();
      run_crash.termination = alt.tail ? TerminationCase::kCompleted
                                       : TerminationCase::kConflict;
      run_crash.crash = session.crashed();
      result.runs.push_back(std::move(run_crash));
      continue;  // backtrack through the remaining frames
    }
  }

  finish();
  return result;
}

std::string run_result_to_string(const ScenarioRunResult& result,
                                 const std::string& timestamp) {
  std::ostringstream out;
  out << "# generated " << timestamp << " wall-ms " << result.wall_ms << "\n";
  out << "scenrun 1\n";
  out << "app: " << result.app_id << "\n";
  out << "scenario: " << result.scenario_id << "\n";
  out << "runs: " << result.runs.size() << "\n";
  out << "completed: " << result.completed() << "\n";
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& r = result.runs[i];
    out << "run: " << (i + 1) << " case=" << static_cast<int>(r.termination)
        << " anomaly=" << (r.anomaly ? 1 : 0)
        << " crash=" << (r.crash ? *r.crash : std::string("-")) << "\n";
    for (const auto& ev : r.events) {
      out << "event: " << (i + 1) << ' ' << sim::to_log_line(ev) << "\n";
    }
  }
  return out.str();
}

ScenarioRunResult run_result_from_string(const std::string& content,
                                         const std::string& origin) {
  ScenarioRunResult result;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  bool magic = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (!magic) {
      if (line != "scenrun 1") throw Error(where + ": expected 'scenrun 1'");
      magic = true;
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw Error(where + ": expected key");
    std::string key = line.substr(0, colon);
    std::string body = line.substr(colon + 1);
    while (!body.empty() && body.front() == ' ') body.erase(body.begin());
    if (key == "app") {
      result.app_id = body;
    } else if (key == "scenario") {
      result.scenario_id = body;
    } else if (key == "runs" || key == "completed") {
      // Derived counts; recomputed from the run lines.
    } else if (key == "run") {
      std::istringstream bs(body);
      int idx;
      std::string case_s, anomaly_s, crash_s;
      bs >> idx >> case_s >> anomaly_s >> crash_s;
      if (idx != static_cast<int>(result.runs.size()) + 1) {
        throw Error(where + ": run indices must be dense");
      }
      SubScenarioRun run;
      run.termination =
          static_cast<TerminationCase>(std::stoi(case_s.substr(5)));
      run.anomaly = anomaly_s == "anomaly=1";
      std::string crash = crash_s.substr(6);
      if (crash != "-") run.crash = crash;
      result.runs.push_back(std::move(run));
    } else if (key == "event") {
      std::size_t sp = body.find(' ');
      if (sp == std::string::npos) throw Error(where + ": bad event line");
      std::size_t run_idx = std::stoul(body.substr(0, sp));
      if (run_idx == 0 || run_idx > result.runs.size()) {
        throw Error(where + ": event references unknown run");
      }
      result.runs[run_idx - 1].events.push_back(
          sim::logged_event_from_line(body.substr(sp + 1)));
    } else {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  if (!magic) throw Error(origin + ": empty run result");
  return result;
}

}  // namespace scengraph::engine
