#include "scengraph/app_sim.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::sim {

namespace {

using screen::WidgetType;
namespace draw = screen::draw;

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits `s` on whitespace but keeps "quoted strings" as single items.
std::vector<std::string> split_quoted(const std::string& s,
                                      const std::string& where) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] == '"') {
      std::size_t close = s.find('"', i + 1);
      if (close == std::string::npos) {
        throw AppModelError(where + ": unterminated quote");
      }
      out.push_back(s.substr(i + 1, close - i - 1));
      i = close + 1;
      continue;
    }
    std::size_t end = i;
    while (end < s.size() &&
           !std::isspace(static_cast<unsigned char>(s[end]))) {
      ++end;
    }
    out.push_back(s.substr(i, end - i));
    i = end;
  }
  return out;
}

int to_int(const std::string& s, const std::string& where) {
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw AppModelError(where + ": expected integer, got '" + s + "'");
  }
}

// Parses a non-guarded effect tail: goto <s> | set <f> | crash <b> |
// end | noop, starting at tokens[pos].
Effect parse_simple_effect(const std::vector<std::string>& toks,
                           std::size_t& pos, const std::string& where) {
  if (pos >= toks.size()) throw AppModelError(where + ": missing effect");
  const std::string& kw = toks[pos++];
  if (kw == "goto") {
    if (pos >= toks.size()) throw AppModelError(where + ": goto needs target");
    return Effect(Effect::Kind::kGoto, toks[pos++]);
  }
  if (kw == "set") {
    if (pos >= toks.size()) throw AppModelError(where + ": set needs field");
    return Effect(Effect::Kind::kSetField, toks[pos++]);
  }
  if (kw == "crash") {
    if (pos >= toks.size()) throw AppModelError(where + ": crash needs bug");
    return Effect(Effect::Kind::kCrash, toks[pos++]);
  }
  if (kw == "end") return Effect(Effect::Kind::kEnd, "");
  if (kw == "noop") return Effect(Effect::Kind::kNoop, "");
  throw AppModelError(where + ": unknown effect '" + kw + "'");
}

void validate_model(const AppModel& app, const std::string& origin);

}  // namespace

Effect::Effect(const Effect& o)
    : kind(o.kind),
      target(o.target),
      guard_field(o.guard_field),
      guard_pred(o.guard_pred),
      guard_literal(o.guard_literal) {
  if (o.then_effect) then_effect = std::make_unique<Effect>(*o.then_effect);
  if (o.else_effect) else_effect = std::make_unique<Effect>(*o.else_effect);
}

Effect& Effect::operator=(const Effect& o) {
  if (this == &o) return *this;
  kind = o.kind;
  target = o.target;
  guard_field = o.guard_field;
  guard_pred = o.guard_pred;
  guard_literal = o.guard_literal;
  then_effect = o.then_effect ? std::make_unique<Effect>(*o.then_effect)
                              : nullptr;
  else_effect = o.else_effect ? std::make_unique<Effect>(*o.else_effect)
                              : nullptr;
  return *this;
}

const SimWidget* Screen::find_widget(const std::string& id) const {
  for (const auto& w : widgets) {
    if (w.widget_id == id) return &w;
  }
  return nullptr;
}

const Screen* AppModel::find_screen(const std::string& id) const {
  for (const auto& s : screens) {
    if (s.screen_id == id) return &s;
  }
  return nullptr;
}

const BugSpec* AppModel::find_bug(const std::string& id) const {
  for (const auto& b : injected_bugs) {
    if (b.bug_id == id) return &b;
  }
  return nullptr;
}

AppModel parse_app_model(const std::string& content,
                         const std::string& origin) {
  AppModel app;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  bool magic_seen = false;
  Screen* current = nullptr;

  while (std::getline(in, line)) {
    ++lineno;
    std::string where = origin + ":" + std::to_string(lineno);
    std::string t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    if (!magic_seen) {
      if (t != "scenapp 1") {
        throw AppModelError(where + ": expected 'scenapp 1' header");
      }
      magic_seen = true;
      continue;
    }
    std::size_t colon = t.find(':');
    if (colon == std::string::npos) {
      throw AppModelError(where + ": expected 'key: value'");
    }
    std::string key = strip(t.substr(0, colon));
    auto toks = split_quoted(strip(t.substr(colon + 1)), where);

    if (key == "app") {
      if (toks.size() != 1) throw AppModelError(where + ": app needs one id");
      app.app_id = toks[0];
    } else if (key == "screen") {
      if (toks.size() != 3) {
        throw AppModelError(where + ": screen needs id, width, height");
      }
      Screen s;
      s.screen_id = toks[0];
      s.width = to_int(toks[1], where);
      s.height = to_int(toks[2], where);
      app.screens.push_back(std::move(s));
      current = &app.screens.back();
    } else if (key == "widget") {
      if (!current) throw AppModelError(where + ": widget outside screen");
      if (toks.size() < 6 || toks.size() > 7) {
        throw AppModelError(where +
                            ": widget needs id, type, four coords, [label]");
      }
      SimWidget w;
      w.widget_id = toks[0];
      auto type = screen::widget_type_from_string(toks[1]);
      if (!type) throw AppModelError(where + ": unknown type " + toks[1]);
      w.type = *type;
      w.bbox = Rect{to_int(toks[2], where), to_int(toks[3], where),
                    to_int(toks[4], where), to_int(toks[5], where)};
      if (toks.size() == 7) w.label = toks[6];
      current->widgets.push_back(std::move(w));
    } else if (key == "note") {
      if (!current) throw AppModelError(where + ": note outside screen");
      if (toks.size() != 5) {
        throw AppModelError(where + ": note needs text and four coords");
      }
      ScreenNote n;
      n.text = toks[0];
      n.box = Rect{to_int(toks[1], where), to_int(toks[2], where),
                   to_int(toks[3], where), to_int(toks[4], where)};
      current->notes.push_back(std::move(n));
    } else if (key == "on") {
      if (!current) throw AppModelError(where + ": 'on' outside screen");
      if (toks.size() < 3) {
        throw AppModelError(where + ": on needs widget, operation, effect");
      }
      SimWidget* w = nullptr;
      for (auto& cand : current->widgets) {
        if (cand.widget_id == toks[0]) w = &cand;
      }
      if (!w) throw AppModelError(where + ": unknown widget " + toks[0]);
      std::string op = toks[1];
      std::size_t pos = 2;
      Effect eff;
      if (toks[pos] == "if") {
        ++pos;
        if (pos + 1 >= toks.size()) {
          throw AppModelError(where + ": guard needs field and predicate");
        }
        eff.kind = Effect::Kind::kGuarded;
        eff.guard_field = toks[pos++];
        const std::string& pred = toks[pos++];
        if (pred == "empty") {
          eff.guard_pred = GuardPred::kEmpty;
        } else if (pred == "valid") {
          eff.guard_pred = GuardPred::kValid;
        } else if (pred == "is") {
          if (pos >= toks.size()) {
            throw AppModelError(where + ": 'is' needs a literal");
          }
          eff.guard_pred = GuardPred::kIs;
          eff.guard_literal = toks[pos++];
        } else {
          throw AppModelError(where + ": unknown predicate '" + pred + "'");
        }
        if (pos >= toks.size() || toks[pos] != "then") {
          throw AppModelError(where + ": guard needs 'then'");
        }
        ++pos;
        eff.then_effect = std::make_unique<Effect>(
            parse_simple_effect(toks, pos, where));
        if (pos >= toks.size() || toks[pos] != "else") {
          throw AppModelError(where + ": guard needs 'else'");
        }
        ++pos;
        eff.else_effect = std::make_unique<Effect>(
            parse_simple_effect(toks, pos, where));
      } else {
        eff = parse_simple_effect(toks, pos, where);
      }
      if (pos != toks.size()) {
        throw AppModelError(where + ": trailing tokens after effect");
      }
      if (w->actions.count(op)) {
        throw AppModelError(where + ": duplicate action " + op + " on " +
                            w->widget_id);
      }
      w->actions[op] = std::move(eff);
    } else if (key == "initial") {
      if (toks.size() != 1) throw AppModelError(where + ": initial needs id");
      app.initial_screen = toks[0];
    } else if (key == "cred") {
      if (toks.size() != 2) {
        throw AppModelError(where + ": cred needs field and value");
      }
      app.credential_table[toks[0]] = toks[1];
    } else if (key == "bug") {
      if (toks.size() != 3) {
        throw AppModelError(where + ": bug needs id, depth, note");
      }
      if (toks[1] != "shallow" && toks[1] != "deep") {
        throw AppModelError(where + ": bug depth is shallow|deep");
      }
      app.injected_bugs.push_back(BugSpec{toks[0], toks[1], toks[2]});
    } else {
      throw AppModelError(where + ": unknown key '" + key + "'");
    }
  }
  if (!magic_seen) throw AppModelError(origin + ": empty app model");
  validate_model(app, origin);
  return app;
}

AppModel load_app_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AppModelError("cannot open app model " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_app_model(buf.str(), path);
}

namespace {

void validate_effect_targets(const AppModel& app, const Effect& eff,
                             const std::string& where) {
  switch (eff.kind) {
    case Effect::Kind::kGoto:
      if (!app.find_screen(eff.target)) {
        throw AppModelError(where + ": transition to unknown screen " +
                            eff.target);
      }
      break;
    case Effect::Kind::kCrash:
      if (!app.find_bug(eff.target)) {
        throw AppModelError(where + ": crash references undeclared bug " +
                            eff.target);
      }
      break;
    case Effect::Kind::kGuarded:
      validate_effect_targets(app, *eff.then_effect, where);
      validate_effect_targets(app, *eff.else_effect, where);
      break;
    default:
      break;
  }
}

void validate_model(const AppModel& app, const std::string& origin) {
  if (app.app_id.empty()) throw AppModelError(origin + ": missing app id");
  if (app.screens.empty()) throw AppModelError(origin + ": no screens");
  if (!app.find_screen(app.initial_screen)) {
    throw AppModelError(origin + ": initial screen '" + app.initial_screen +
                        "' does not exist");
  }
  for (const auto& s : app.screens) {
    if (s.width < 32 || s.height < 32) {
      throw AppModelError(origin + ": screen " + s.screen_id + " too small");
    }
    for (std::size_t i = 0; i < s.widgets.size(); ++i) {
      const auto& w = s.widgets[i];
      std::string where = origin + ": " + s.screen_id + "/" + w.widget_id;
      if (w.bbox.width() < 8 || w.bbox.height() < 8) {
        throw AppModelError(where + ": widgets must be at least 8x8");
      }
      // The detection ring needs two pixels of clearance from the rim
      // and from sibling widgets.
      if (!w.bbox.grown(2).within(s.width, s.height)) {
        throw AppModelError(where + ": widget too close to the screen rim");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (w.bbox.grown(2).overlap_area(s.widgets[j].bbox.grown(2)) > 0) {
          throw AppModelError(where + ": overlaps or nearly touches " +
                              s.widgets[j].widget_id);
        }
        if (w.widget_id == s.widgets[j].widget_id) {
          throw AppModelError(where + ": duplicate widget id");
        }
      }
      for (const auto& [op, eff] : w.actions) {
        validate_effect_targets(app, eff, where);
      }
    }
    for (const auto& n : s.notes) {
      if (!n.box.within(s.width, s.height)) {
        throw AppModelError(origin + ": " + s.screen_id + " note \"" +
                            n.text + "\" out of bounds");
      }
    }
  }
}

// Text layer box for a widget label, centered inside the widget with
// clearance past the border.
Rect label_box(const Rect& bbox, const std::string& label) {
  int inset = draw::kBorderThickness + 2;
  int avail_w = bbox.width() - 2 * inset;
  int avail_h = bbox.height() - 2 * inset;
  int tw = std::min(avail_w,
                    static_cast<int>(label.size()) * 6 + 2);
  int th = std::min(avail_h, 10);
  tw = std::max(tw, 2);
  th = std::max(th, 2);
  int cx = (bbox.x0 + bbox.x1) / 2;
  int cy = (bbox.y0 + bbox.y1) / 2;
  return Rect{cx - tw / 2, cy - th / 2, cx - tw / 2 + tw, cy - th / 2 + th};
}

}  // namespace

corpus::ScreenBundle render(const Screen& screen) {
  corpus::ScreenBundle bundle;
  auto& raster = bundle.raster;
  raster = screen::ScreenRaster(screen.width, screen.height, draw::kBackground);

  for (const auto& w : screen.widgets) {
    switch (w.type) {
      case WidgetType::kButton:
        raster.fill_rect(w.bbox, draw::kButtonFill);
        raster.draw_border(w.bbox, draw::kBorderThickness, draw::kBorder);
        break;
      case WidgetType::kTextField:
        raster.fill_rect(w.bbox, draw::kTextFieldFill);
        raster.draw_border(w.bbox, draw::kBorderThickness, draw::kBorder);
        break;
      case WidgetType::kTextView:
        raster.fill_rect(w.bbox, draw::kTextViewFill);
        break;
      case WidgetType::kImageView:
        raster.fill_rect(w.bbox, draw::kImageViewFill);
        raster.draw_border(w.bbox, draw::kBorderThickness, draw::kBorder);
        break;
      case WidgetType::kCheckbox:
        raster.fill_rect(w.bbox, draw::kCheckboxFill);
        raster.draw_border(w.bbox, draw::kBorderThickness, draw::kBorder);
        break;
      case WidgetType::kIcon:
        raster.fill_rect(w.bbox, draw::kIconFill);
        break;
      case WidgetType::kUnknown:
        break;
    }
    if (!w.label.empty()) {
      bundle.text_layer.push_back(
          screen::TextSpan{w.label, label_box(w.bbox, w.label)});
    }
  }
  for (const auto& n : screen.notes) {
    bundle.text_layer.push_back(screen::TextSpan{n.text, n.box});
  }
  return bundle;
}

std::string to_log_line(const LoggedEvent& ev) {
  std::ostringstream out;
  out << ev.step << ',' << ev.screen_id << ',' << ev.widget_id << ','
      << ev.operation << ",\"" << ev.parameter << "\"," << ev.outcome;
  return out.str();
}

LoggedEvent logged_event_from_line(const std::string& line) {
  LoggedEvent ev;
  std::size_t p = 0;
  auto next_field = [&](const char* what) {
    std::size_t comma = line.find(',', p);
    if (comma == std::string::npos) {
      throw Error(std::string("bad event log line (missing ") + what +
                  "): " + line);
    }
    std::string f = line.substr(p, comma - p);
    p = comma + 1;
    return f;
  };
  ev.step = std::stoi(next_field("step"));
  ev.screen_id = next_field("screen");
  ev.widget_id = next_field("widget");
  ev.operation = next_field("operation");
  if (p >= line.size() || line[p] != '"') {
    throw Error("bad event log line (parameter quoting): " + line);
  }
  std::size_t close = line.find('"', p + 1);
  if (close == std::string::npos || close + 1 >= line.size() ||
      line[close + 1] != ',') {
    throw Error("bad event log line (parameter quoting): " + line);
  }
  ev.parameter = line.substr(p + 1, close - p - 1);
  ev.outcome = line.substr(close + 2);
  return ev;
}

Session::Session(const AppModel& app)
    : app_(&app), current_screen_(app.initial_screen) {}

const Screen& Session::current_screen() const {
  const Screen* s = app_->find_screen(current_screen_);
  if (!s) throw Error("session on unknown screen " + current_screen_);
  return *s;
}

const LoggedEvent& Session::execute_event(const std::string& widget_id,
                                          const std::string& operation,
                                          const std::string& parameter) {
  if (crashed_) {
    throw CrashedSessionError("session crashed with " + *crashed_ +
                              "; no further events accepted");
  }
  const Screen& screen = current_screen();
  const SimWidget* widget = screen.find_widget(widget_id);
  if (!widget) {
    throw IllegalEventError("widget " + widget_id + " not on screen " +
                            current_screen_);
  }
  auto it = widget->actions.find(operation);
  if (it == widget->actions.end()) {
    throw IllegalEventError("widget " + widget_id + " does not support " +
                            operation);
  }

  LoggedEvent ev;
  ev.step = static_cast<int>(log_.size()) + 1;
  ev.screen_id = current_screen_;
  ev.widget_id = widget_id;
  ev.operation = operation;
  ev.parameter = parameter;

  const Effect* eff = &it->second;
  if (eff->kind == Effect::Kind::kGuarded) {
    bool hold = false;
    auto field_it = fields_.find(eff->guard_field);
    std::string value = field_it == fields_.end() ? "" : field_it->second;
    switch (eff->guard_pred) {
      case GuardPred::kEmpty:
        hold = value.empty();
        break;
      case GuardPred::kValid: {
        auto cred = app_->credential_table.find(eff->guard_field);
        hold = cred != app_->credential_table.end() && value == cred->second;
        break;
      }
      case GuardPred::kIs:
        hold = value == eff->guard_literal;
        break;
    }
    eff = hold ? eff->then_effect.get() : eff->else_effect.get();
  }

  switch (eff->kind) {
    case Effect::Kind::kGoto:
      current_screen_ = eff->target;
      ev.outcome = "screen:" + eff->target;
      break;
    case Effect::Kind::kSetField:
      fields_[eff->target] = parameter;
      ev.outcome = "set:" + eff->target;
      break;
    case Effect::Kind::kCrash:
      crashed_ = eff->target;
      ev.outcome = "crash:" + eff->target;
      break;
    case Effect::Kind::kEnd:
      ended_ = true;
      ev.outcome = "end";
      break;
    case Effect::Kind::kNoop:
      ev.outcome = "stay";
      break;
    case Effect::Kind::kGuarded:
      throw Error("nested guard effects are not supported");
  }
  log_.push_back(std::move(ev));
  return log_.back();
}

Session reset_and_replay(const AppModel& app,
                         const std::vector<ReplayEvent>& prefix) {
  Session session(app);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const auto& ev = prefix[i];
    try {
      session.execute_event(ev.widget_id, ev.operation, ev.parameter);
    } catch (const Error& e) {
      throw ReplayDivergedError("replay diverged at event " +
                                std::to_string(i + 1) + ": " + e.what());
    }
    if (session.crashed()) {
      throw ReplayDivergedError("replay crashed with " + *session.crashed() +
                                " at event " + std::to_string(i + 1));
    }
  }
  return session;
}

}  // namespace scengraph::sim
