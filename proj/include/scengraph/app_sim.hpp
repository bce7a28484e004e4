#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scengraph/geometry.hpp"
#include "scengraph/raster.hpp"
#include "scengraph/report_corpus.hpp"
#include "scengraph/screen_analysis.hpp"

namespace scengraph::sim {

// Guard predicate over a session field.
enum class GuardPred { kEmpty, kValid, kIs };

// What an operation on a widget does. Guarded effects carry a predicate
// and two non-guarded branches.
struct Effect {
  enum class Kind { kGoto, kSetField, kCrash, kEnd, kNoop, kGuarded };

  Kind kind = Kind::kNoop;
  std::string target;  // screen id, field name, or bug id

  // kGuarded only:
  std::string guard_field;
  GuardPred guard_pred = GuardPred::kEmpty;
  std::string guard_literal;
  std::unique_ptr<Effect> then_effect;
  std::unique_ptr<Effect> else_effect;

  Effect() = default;
  Effect(Kind k, std::string t) : kind(k), target(std::move(t)) {}
  Effect(const Effect& o);
  Effect& operator=(const Effect& o);
  Effect(Effect&&) = default;
  Effect& operator=(Effect&&) = default;
};

struct SimWidget {
  std::string widget_id;
  screen::WidgetType type = screen::WidgetType::kButton;
  std::string label;  // empty means unlabeled
  Rect bbox;
  std::map<std::string, Effect> actions;  // operation -> effect
};

// Free-floating declared text (not tied to a widget).
struct ScreenNote {
  std::string text;
  Rect box;
};

struct Screen {
  std::string screen_id;
  int width = 0;
  int height = 0;
  std::vector<SimWidget> widgets;
  std::vector<ScreenNote> notes;

  const SimWidget* find_widget(const std::string& id) const;
};

struct BugSpec {
  std::string bug_id;
  std::string depth;  // shallow | deep
  std::string note;
};

struct AppModel {
  std::string app_id;
  std::vector<Screen> screens;
  std::string initial_screen;
  std::map<std::string, std::string> credential_table;
  std::vector<BugSpec> injected_bugs;

  const Screen* find_screen(const std::string& id) const;
  const BugSpec* find_bug(const std::string& id) const;
};

// Parses and validates the versioned app model text format
// (docs/formats.md). Throws AppModelError on violations.
AppModel load_app_model(const std::string& path);
AppModel parse_app_model(const std::string& content,
                         const std::string& origin = "<string>");

// Deterministic raster plus sidecar text layer for a screen; identical
// screens render byte-identically.
corpus::ScreenBundle render(const Screen& screen);

// One executed event as recorded in session logs.
struct LoggedEvent {
  int step = 0;
  std::string screen_id;
  std::string widget_id;
  std::string operation;
  std::string parameter;  // empty when the operation carries none
  std::string outcome;    // screen:<id> | set:<field> | crash:<id> | end | stay

  bool operator==(const LoggedEvent&) const = default;
};

std::string to_log_line(const LoggedEvent& ev);
LoggedEvent logged_event_from_line(const std::string& line);

// Live state of one app session. Single-threaded; a crashed session
// accepts no further events.
class Session {
 public:
  explicit Session(const AppModel& app);

  const std::string& current_screen_id() const { return current_screen_; }
  const Screen& current_screen() const;
  const std::map<std::string, std::string>& fields() const { return fields_; }
  const std::optional<std::string>& crashed() const { return crashed_; }
  bool ended() const { return ended_; }
  const std::vector<LoggedEvent>& event_log() const { return log_; }

  // Applies the widget's effect for `operation`; throws
  // CrashedSessionError after a crash and IllegalEventError when the
  // widget or operation is not available on the current screen.
  const LoggedEvent& execute_event(const std::string& widget_id,
                                   const std::string& operation,
                                   const std::string& parameter = "");

 private:
  const AppModel* app_;  // non-owning; the model outlives its sessions
  std::string current_screen_;
  std::map<std::string, std::string> fields_;
  std::optional<std::string> crashed_;
  bool ended_ = false;
  std::vector<LoggedEvent> log_;
};

// Event triple used for replay prefixes.
struct ReplayEvent {
  std::string widget_id;
  std::string operation;
  std::string parameter;
};

// Fresh session advanced through `prefix`; throws ReplayDivergedError
// if the prefix crashes or becomes illegal.
Session reset_and_replay(const AppModel& app,
                         const std::vector<ReplayEvent>& prefix);

}  // namespace scengraph::sim
