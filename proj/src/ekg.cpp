#include "scengraph/ekg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::ekg {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Reads a quoted string starting at pos; advances pos past it.
std::string unquote(const std::string& s, std::size_t& pos,
                    const std::string& where) {
  if (pos >= s.size() || s[pos] != '"') {
    throw Error(where + ": expected quoted string");
  }
  std::string out;
  ++pos;
  while (pos < s.size() && s[pos] != '"') {
    if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
    out.push_back(s[pos++]);
  }
  if (pos >= s.size()) throw Error(where + ": unterminated string");
  ++pos;
  return out;
}

}  // namespace

std::string to_string(EntityKind k) {
  switch (k) {
    case EntityKind::kCnt: return "CNT";
    case EntityKind::kWid: return "WID";
    case EntityKind::kOpt: return "OPT";
    case EntityKind::kTxt: return "TXT";
  }
  return "?";
}

std::string to_string(RelationKind k) {
  switch (k) {
    case RelationKind::kTxtTxtSimilar: return "TXT-TXT";
    case RelationKind::kCntOptOperate: return "CNT-OPT";
    case RelationKind::kCntTxtConcreteText: return "CNT-TXT";
    case RelationKind::kCntWidConcreteWidget: return "CNT-WID";
    case RelationKind::kCntCntSimilar: return "CNT-CNT-similar";
    case RelationKind::kCntCntOrder: return "CNT-CNT-order";
  }
  return "?";
}

std::optional<EntityKind> entity_kind_from_string(const std::string& s) {
  if (s == "CNT") return EntityKind::kCnt;
  if (s == "WID") return EntityKind::kWid;
  if (s == "OPT") return EntityKind::kOpt;
  if (s == "TXT") return EntityKind::kTxt;
  return std::nullopt;
}

std::optional<RelationKind> relation_kind_from_string(const std::string& s) {
  if (s == "TXT-TXT") return RelationKind::kTxtTxtSimilar;
  if (s == "CNT-OPT") return RelationKind::kCntOptOperate;
  if (s == "CNT-TXT") return RelationKind::kCntTxtConcreteText;
  if (s == "CNT-WID") return RelationKind::kCntWidConcreteWidget;
  if (s == "CNT-CNT-similar") return RelationKind::kCntCntSimilar;
  if (s == "CNT-CNT-order") return RelationKind::kCntCntOrder;
  return std::nullopt;
}

WidgetNounTable WidgetNounTable::load(const std::string& path) {
  return from_lines(read_lines(path));
}

WidgetNounTable WidgetNounTable::from_lines(
    const std::vector<std::string>& lines) {
  WidgetNounTable t;
  for (const auto& line : lines) {
    if (blank_or_comment(line)) continue;
    std::istringstream in(line);
    std::string noun, type;
    in >> noun >> type;
    if (noun.empty() || type.empty()) {
      throw Error("widget noun line needs noun and type: " + line);
    }
    if (type == "-") {
      t.nouns_[text::normalize(noun)] = std::nullopt;
    } else {
      auto wt = screen::widget_type_from_string(type);
      if (!wt) throw Error("unknown widget type in noun table: " + type);
      t.nouns_[text::normalize(noun)] = wt;
    }
  }
  return t;
}

bool WidgetNounTable::is_noun(const std::string& word) const {
  return nouns_.count(text::normalize(word)) > 0;
}

std::optional<screen::WidgetType> WidgetNounTable::type_of(
    const std::string& word) const {
  auto it = nouns_.find(text::normalize(word));
  if (it == nouns_.end()) return std::nullopt;
  return it->second;
}

OpLegality OpLegality::load(const std::string& path) {
  return from_lines(read_lines(path));
}

OpLegality OpLegality::from_lines(const std::vector<std::string>& lines) {
  OpLegality t;
  for (const auto& line : lines) {
    if (blank_or_comment(line)) continue;
    std::istringstream in(line);
    std::string op;
    in >> op;
    std::string type;
    while (in >> type) {
      auto wt = screen::widget_type_from_string(type);
      if (!wt) throw Error("unknown widget type in legality table: " + type);
      t.table_[text::normalize(op)].insert(*wt);
    }
  }
  return t;
}

bool OpLegality::legal(const std::string& op,
                       screen::WidgetType type) const {
  auto it = table_.find(text::normalize(op));
  return it != table_.end() && it->second.count(type) > 0;
}

Ekg::Ekg(std::string scenario_id,
         std::shared_ptr<const text::TextAnalyzer> analyzer,
         PipelineConfig config)
    : scenario_id_(std::move(scenario_id)),
      analyzer_(std::move(analyzer)),
      config_(config) {}

namespace {

std::string dedup_key(EntityKind kind, const std::string& label,
                      bool desc_origin) {
  std::string key = to_string(kind);
  key.push_back('\x1f');
  if (kind == EntityKind::kTxt) key += desc_origin ? "d\x1f" : "g\x1f";
  key += label;
  return key;
}

}  // namespace

EntityId Ekg::append_entity(const EntityDraft& draft) {
  if (frozen_) throw Error("graph is frozen");
  if ((draft.start_tag || draft.tail_tag) && draft.kind != EntityKind::kCnt) {
    throw EntityKindError("start/tail tags are valid only on CNT entities");
  }
  if (draft.kind == EntityKind::kOpt &&
      !analyzer_->vocabulary().is_operation(draft.label)) {
    throw EntityKindError("OPT label '" + draft.label +
                          "' is not in the operation vocabulary");
  }
  if (draft.kind == EntityKind::kWid &&
      !screen::widget_type_from_string(draft.label)) {
    throw EntityKindError("WID label '" + draft.label +
                          "' is not a widget type");
  }
  if (draft.label.empty()) throw EntityKindError("empty entity label");

  std::string key = dedup_key(draft.kind, draft.label, draft.desc_origin);
  auto it = index_.find(key);
  if (it != index_.end()) {
    Entity& e = entities_[it->second];
    e.start_tag = e.start_tag || draft.start_tag;
    e.tail_tag = e.tail_tag || draft.tail_tag;
    if (draft.provenance) e.provenance.insert(*draft.provenance);
    for (const auto& [k, v] : draft.attributes) {
      e.attributes.emplace(k, v);  // first value wins
    }
    return e.id;
  }
  Entity e;
  e.id = static_cast<EntityId>(entities_.size());
  e.kind = draft.kind;
  e.label = draft.label;
  e.desc_origin = draft.kind == EntityKind::kTxt && draft.desc_origin;
  e.start_tag = draft.start_tag;
  e.tail_tag = draft.tail_tag;
  e.attributes = draft.attributes;
  if (draft.provenance) e.provenance.insert(*draft.provenance);
  entities_.push_back(std::move(e));
  index_[key] = entities_.back().id;
  web_parent_.push_back(entities_.back().id);
  return entities_.back().id;
}

int Ekg::web_find(int v) const {
  while (web_parent_[v] != v) {
    web_parent_[v] = web_parent_[web_parent_[v]];
    v = web_parent_[v];
  }
  return v;
}

void Ekg::web_union(int a, int b) {
  web_parent_[web_find(a)] = web_find(b);
}

namespace {

bool endpoints_valid(EntityKind a, EntityKind b, RelationKind kind,
                     bool& swap) {
  swap = false;
  switch (kind) {
    case RelationKind::kTxtTxtSimilar:
      return a == EntityKind::kTxt && b == EntityKind::kTxt;
    case RelationKind::kCntCntSimilar:
    case RelationKind::kCntCntOrder:
      return a == EntityKind::kCnt && b == EntityKind::kCnt;
    case RelationKind::kCntOptOperate:
      if (a == EntityKind::kOpt && b == EntityKind::kCnt) swap = true;
      return (a == EntityKind::kCnt && b == EntityKind::kOpt) || swap;
    case RelationKind::kCntTxtConcreteText:
      if (a == EntityKind::kTxt && b == EntityKind::kCnt) swap = true;
      return (a == EntityKind::kCnt && b == EntityKind::kTxt) || swap;
    case RelationKind::kCntWidConcreteWidget:
      if (a == EntityKind::kWid && b == EntityKind::kCnt) swap = true;
      return (a == EntityKind::kCnt && b == EntityKind::kWid) || swap;
  }
  return false;
}

bool is_web_kind(RelationKind kind) {
  return kind == RelationKind::kTxtTxtSimilar ||
         kind == RelationKind::kCntCntSimilar ||
         kind == RelationKind::kCntTxtConcreteText;
}

bool is_undirected(RelationKind kind) {
  return kind != RelationKind::kCntCntOrder;
}

}  // namespace

bool Ekg::order_path_exists_in_report(EntityId from, EntityId to,
                                      const std::string& report_id) const {
  std::vector<EntityId> stack{from};
  std::set<EntityId> seen{from};
  while (!stack.empty()) {
    EntityId u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    auto [lo, hi] = order_out_.equal_range(u);
    for (auto it = lo; it != hi; ++it) {
      const Relationship& r = relationships_[it->second];
      if (!r.report_ids.count(report_id)) continue;
      if (seen.insert(r.dst).second) stack.push_back(r.dst);
    }
  }
  return false;
}

RelationOutcome Ekg::append_relation(EntityId src, EntityId dst,
                                     RelationKind kind,
                                     std::optional<double> weight,
                                     const std::string& report_id) {
  if (frozen_) throw Error("graph is frozen");
  if (src < 0 || dst < 0 || src >= static_cast<int>(entities_.size()) ||
      dst >= static_cast<int>(entities_.size())) {
    throw RelationKindError("relation endpoint does not exist");
  }
  if (src == dst) return RelationOutcome::kSelfLoop;
  bool swap = false;
  if (!endpoints_valid(entities_[src].kind, entities_[dst].kind, kind, swap)) {
    throw RelationKindError("endpoints " + to_string(entities_[src].kind) +
                            "/" + to_string(entities_[dst].kind) +
                            " do not fit " + to_string(kind));
  }
  if (swap) std::swap(src, dst);
  if (is_undirected(kind) && src > dst &&
      entities_[src].kind == entities_[dst].kind) {
    std::swap(src, dst);  // similar edges stored once per unordered pair
  }

  // Duplicate check before everything else.
  for (std::size_t i = 0; i < relationships_.size(); ++i) {
    Relationship& r = relationships_[i];
    if (r.kind == kind && r.src == src && r.dst == dst) {
      if (kind == RelationKind::kCntCntOrder && !report_id.empty()) {
        r.report_ids.insert(report_id);
      }
      return RelationOutcome::kDuplicate;
    }
  }

  if (is_web_kind(kind)) {
    if (web_find(src) == web_find(dst)) return RelationOutcome::kLoopAvoided;
    web_union(src, dst);
  }
  if (kind == RelationKind::kCntCntOrder && !report_id.empty() &&
      order_path_exists_in_report(dst, src, report_id)) {
    return RelationOutcome::kOrderCycleSkipped;
  }

  Relationship r;
  r.src = src;
  r.dst = dst;
  r.kind = kind;
  r.weight = weight;
  if (kind == RelationKind::kCntCntOrder && !report_id.empty()) {
    r.report_ids.insert(report_id);
  }
  relationships_.push_back(std::move(r));
  if (kind == RelationKind::kCntCntOrder) {
    order_out_.emplace(src, relationships_.size() - 1);
  }
  return RelationOutcome::kStored;
}

std::optional<EntityId> Ekg::find(EntityKind kind, const std::string& label,
                                  bool desc_origin) const {
  auto it = index_.find(dedup_key(kind, label, desc_origin));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Ekg::coreference_resolve() {
  const double theta = config_.theta;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    for (std::size_t j = i + 1; j < entities_.size(); ++j) {
      const Entity& a = entities_[i];
      const Entity& b = entities_[j];
      RelationKind kind;
      if (a.kind == EntityKind::kTxt && b.kind == EntityKind::kTxt) {
        kind = RelationKind::kTxtTxtSimilar;
      } else if (a.kind == EntityKind::kCnt && b.kind == EntityKind::kCnt) {
        kind = RelationKind::kCntCntSimilar;
      } else {
        continue;
      }
      double s = analyzer_->text_similarity(a.label, b.label);
      if (s >= theta) {
        append_relation(a.id, b.id, kind, s);
      }
    }
  }
}

std::set<EntityId> Ekg::similar_closure(EntityId seed) const {
  std::set<EntityId> out{seed};
  std::vector<EntityId> stack{seed};
  while (!stack.empty()) {
    EntityId u = stack.back();
    stack.pop_back();
    for (const auto& r : relationships_) {
      if (r.kind != RelationKind::kCntCntSimilar) continue;
      EntityId other = -1;
      if (r.src == u) other = r.dst;
      if (r.dst == u) other = r.src;
      if (other >= 0 && out.insert(other).second) stack.push_back(other);
    }
  }
  return out;
}

void Ekg::freeze() {
  if (frozen_) return;
  // Branch points: a CNT whose order successors fall into two or more
  // distinct similar-closure groups.
  for (auto& e : entities_) {
    if (e.kind != EntityKind::kCnt) continue;
    auto [lo, hi] = order_out_.equal_range(e.id);
    std::set<EntityId> groups;
    for (auto it = lo; it != hi; ++it) {
      EntityId dst = relationships_[it->second].dst;
      groups.insert(*similar_closure(dst).begin());
    }
    e.branch_point = groups.size() >= 2;
  }
  if (!entities_.empty()) {
    bool has_start = false;
    bool has_tail = false;
    for (const auto& e : entities_) {
      has_start = has_start || e.start_tag;
      has_tail = has_tail || e.tail_tag;
    }
    if (!has_start || !has_tail) {
      throw Error("non-empty scenario graph lacks start or tail tags");
    }
  }
  frozen_ = true;
}

std::set<EntityId> Ekg::reachable_from(const QueryContext& context) const {
  std::set<EntityId> result;
  if (!context.last_matched) {
    for (const auto& e : entities_) {
      if (e.kind == EntityKind::kCnt && e.start_tag) {
        auto closure = similar_closure(e.id);
        result.insert(closure.begin(), closure.end());
      }
    }
    return result;
  }
  // Expand order edges outward from the seed closure; an entity is
  // reachable once some order edge leads into its similar closure.
  std::set<EntityId> seeds = similar_closure(*context.last_matched);
  std::vector<EntityId> queue(seeds.begin(), seeds.end());
  std::set<EntityId> expanded;
  while (!queue.empty()) {
    EntityId u = queue.back();
    queue.pop_back();
    if (!expanded.insert(u).second) continue;
    auto [lo, hi] = order_out_.equal_range(u);
    for (auto it = lo; it != hi; ++it) {
      EntityId v = relationships_[it->second].dst;
      for (EntityId w : similar_closure(v)) {
        if (result.insert(w).second) queue.push_back(w);
      }
    }
  }
  return result;
}

std::vector<WidgetCandidate> Ekg::query(const screen::GuiStructure& structure,
                                        const QueryContext& context,
                                        const OpLegality& legality) const {
  if (!frozen_) throw Error("query requires a frozen graph");
  std::set<EntityId> reachable = reachable_from(context);

  // Per-CNT lookup tables, id-ordered for determinism.
  struct CntInfo {
    std::vector<std::string> ops;        // sorted OPT labels
    std::vector<std::string> txt_labels;
    std::set<std::string> wid_labels;
  };
  std::map<EntityId, CntInfo> cnts;
  for (const auto& e : entities_) {
    if (e.kind == EntityKind::kCnt) cnts[e.id] = CntInfo{};
  }
  for (const auto& r : relationships_) {
    switch (r.kind) {
      case RelationKind::kCntOptOperate:
        cnts[r.src].ops.push_back(entities_[r.dst].label);
        break;
      case RelationKind::kCntTxtConcreteText:
        cnts[r.src].txt_labels.push_back(entities_[r.dst].label);
        break;
      case RelationKind::kCntWidConcreteWidget:
        cnts[r.src].wid_labels.insert(entities_[r.dst].label);
        break;
      default:
        break;
    }
  }
  for (auto& [id, info] : cnts) {
    std::sort(info.ops.begin(), info.ops.end());
    info.ops.erase(std::unique(info.ops.begin(), info.ops.end()),
                   info.ops.end());
  }

  std::vector<WidgetCandidate> out;
  for (std::size_t wi = 0; wi < structure.widgets.size(); ++wi) {
    const auto& w = structure.widgets[wi];
    std::string type_label = screen::to_string(w.widget_type);
    std::string type_word = text::normalize(type_label);

    double best_reach = 0.0;
    EntityId best_reach_id = -1;
    double best_any = 0.0;
    EntityId best_any_id = -1;
    for (const auto& [id, info] : cnts) {
      bool any_legal = false;
      for (const auto& op : info.ops) {
        if (legality.legal(op, w.widget_type)) any_legal = true;
      }
      if (!any_legal) continue;
      const Entity& e = entities_[id];
      double s = 0.0;
      if (w.text) {
        s = std::max(s, analyzer_->text_similarity(*w.text, e.label));
        for (const auto& t : info.txt_labels) {
          s = std::max(s, analyzer_->text_similarity(*w.text, t));
        }
      }
      if (info.wid_labels.count(type_label)) {
        s = std::max(s, analyzer_->text_similarity(type_word, e.label));
      }
      if (s <= 0.0) continue;
      if (s > best_any) {
        best_any = s;
        best_any_id = id;
      }
      if (reachable.count(id) && s > best_reach) {
        best_reach = s;
        best_reach_id = id;
      }
    }
    if (best_any_id < 0) continue;  // widget matches nothing; no candidate

    WidgetCandidate cand;
    cand.widget_index = wi;
    cand.bbox = w.bbox;
    cand.widget_text = w.text;
    cand.widget_type = w.widget_type;
    if (best_reach_id >= 0) {
      cand.probability = best_reach;
      cand.matched_entity = best_reach_id;
    } else {
      cand.probability = 0.0;
      cand.matched_entity = best_any_id;
    }
    const Entity& matched = entities_[cand.matched_entity];
    const CntInfo& info = cnts[cand.matched_entity];
    for (const auto& op : info.ops) {
      if (legality.legal(op, w.widget_type)) {
        cand.operation = op;
        break;
      }
    }
    auto param = matched.attributes.find("parameter");
    if (param != matched.attributes.end()) cand.parameter = param->second;
    cand.tail = matched.tail_tag;
    cand.branch = matched.branch_point;
    out.push_back(std::move(cand));
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const WidgetCandidate& a, const WidgetCandidate& b) {
                     if (a.probability != b.probability) {
                       return a.probability > b.probability;
                     }
                     return std::tie(a.bbox.y0, a.bbox.x0, a.matched_entity) <
                            std::tie(b.bbox.y0, b.bbox.x0, b.matched_entity);
                   });
  return out;
}

std::map<std::string, std::size_t> Ekg::ontology_counts() const {
  std::map<std::string, std::size_t> c;
  c["entities"] = entities_.size();
  c["relationships"] = relationships_.size();
  c["CNT"] = c["WID"] = c["OPT"] = c["TXT"] = 0;
  for (const auto& e : entities_) c[to_string(e.kind)]++;
  c["TXT-TXT"] = c["CNT-OPT"] = c["CNT-TXT"] = c["CNT-WID"] = c["CNT-CNT"] = 0;
  for (const auto& r : relationships_) {
    if (r.kind == RelationKind::kCntCntSimilar ||
        r.kind == RelationKind::kCntCntOrder) {
      c["CNT-CNT"]++;
    } else {
      c[to_string(r.kind)]++;
    }
  }
  return c;
}

std::string Ekg::export_structured() const {
  std::ostringstream out;
  out << "scengraph-ekg 1\n";
  out << "scenario: " << scenario_id_ << "\n";
  for (const auto& e : entities_) {
    out << "entity: " << e.id << ' ' << to_string(e.kind)
        << " start=" << (e.start_tag ? 1 : 0)
        << " tail=" << (e.tail_tag ? 1 : 0)
        << " branch=" << (e.branch_point ? 1 : 0) << " origin="
        << (e.kind == EntityKind::kTxt ? (e.desc_origin ? "desc" : "gui")
                                       : "-")
        << " label=" << quote(e.label) << "\n";
    for (const auto& [k, v] : e.attributes) {
      out << "attr: " << e.id << ' ' << k << '=' << quote(v) << "\n";
    }
    for (const auto& p : e.provenance) {
      out << "prov: " << e.id << ' ' << p.report_id << ' ' << p.step_index
          << ' ' << (p.source == ProvenanceSource::kImage ? "image" : "text")
          << "\n";
    }
  }
  for (const auto& r : relationships_) {
    out << "rel: " << r.src << ' ' << r.dst << ' ' << to_string(r.kind)
        << " weight=";
    if (r.weight) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", *r.weight);
      out << buf;
    } else {
      out << '-';
    }
    out << " reports=";
    if (r.report_ids.empty()) {
      out << '-';
    } else {
      bool first = true;
      for (const auto& id : r.report_ids) {
        if (!first) out << ';';
        out << id;
        first = false;
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string Ekg::export_dot() const {
  std::ostringstream out;
  out << "graph ekg {\n";
  out << "  label=" << quote("scenario: " + scenario_id_) << ";\n";
  for (const auto& e : entities_) {
    std::string decor;
    if (e.start_tag) decor += " [start]";
    if (e.tail_tag) decor += " [tail]";
    if (e.branch_point) decor += " [branch]";
    out << "  n" << e.id << " [label="
        << quote(to_string(e.kind) + ": " + e.label + decor) << "];\n";
  }
  for (const auto& r : relationships_) {
    out << "  n" << r.src << " -- n" << r.dst << " [label="
        << quote(to_string(r.kind)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

Ekg Ekg::import_structured(const std::string& content,
                           std::shared_ptr<const text::TextAnalyzer> analyzer,
                           PipelineConfig config) {
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  bool magic = false;
  std::optional<Ekg> graph;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank_or_comment(line)) continue;
    std::string where = "ekg import line " + std::to_string(lineno);
    if (!magic) {
      if (line != "scengraph-ekg 1") {
        throw Error(where + ": expected 'scengraph-ekg 1' header");
      }
      magic = true;
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw Error(where + ": expected key");
    std::string key = line.substr(0, colon);
    std::string body = line.substr(colon + 1);
    std::istringstream bs(body);
    if (key == "scenario") {
      std::string sid = body;
      while (!sid.empty() && sid.front() == ' ') sid.erase(sid.begin());
      graph.emplace(sid, analyzer, config);
    } else if (!graph) {
      throw Error(where + ": entity before scenario header");
    } else if (key == "entity") {
      int id;
      std::string kind_s, start_s, tail_s, branch_s, origin_s;
      bs >> id >> kind_s >> start_s >> tail_s >> branch_s >> origin_s;
      auto kind = entity_kind_from_string(kind_s);
      if (!kind) throw Error(where + ": bad entity kind " + kind_s);
      std::size_t lp = body.find("label=");
      if (lp == std::string::npos) throw Error(where + ": missing label");
      std::size_t pos = lp + 6;
      Entity e;
      e.id = id;
      e.kind = *kind;
      e.label = unquote(body, pos, where);
      e.desc_origin = origin_s == "origin=desc";
      e.start_tag = start_s == "start=1";
      e.tail_tag = tail_s == "tail=1";
      e.branch_point = branch_s == "branch=1";
      if (e.id != static_cast<int>(graph->entities_.size())) {
        throw Error(where + ": entity ids must be dense and ordered");
      }
      graph->entities_.push_back(e);
      graph->web_parent_.push_back(e.id);
      graph->index_[dedup_key(e.kind, e.label, e.desc_origin)] = e.id;
    } else if (key == "attr") {
      int id;
      bs >> id;
      std::string rest;
      std::getline(bs, rest);
      while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
      std::size_t eq = rest.find('=');
      if (eq == std::string::npos) throw Error(where + ": bad attr");
      std::size_t pos = eq + 1;
      graph->entities_.at(id).attributes[rest.substr(0, eq)] =
          unquote(rest, pos, where);
    } else if (key == "prov") {
      int id, step;
      std::string report, src;
      bs >> id >> report >> step >> src;
      graph->entities_.at(id).provenance.insert(Provenance{
          report, step,
          src == "image" ? ProvenanceSource::kImage : ProvenanceSource::kText});
    } else if (key == "rel") {
      int src, dst;
      std::string kind_s, weight_s, reports_s;
      bs >> src >> dst >> kind_s >> weight_s >> reports_s;
      auto kind = relation_kind_from_string(kind_s);
      if (!kind) throw Error(where + ": bad relation kind " + kind_s);
      Relationship r;
      r.src = src;
      r.dst = dst;
      r.kind = *kind;
      if (weight_s.rfind("weight=", 0) != 0 ||
          reports_s.rfind("reports=", 0) != 0) {
        throw Error(where + ": bad relation fields");
      }
      std::string w = weight_s.substr(7);
      if (w != "-") r.weight = std::stod(w);
      std::string reps = reports_s.substr(8);
      if (reps != "-") {
        std::stringstream rs(reps);
        std::string one;
        while (std::getline(rs, one, ';')) r.report_ids.insert(one);
      }
      if (is_web_kind(r.kind)) graph->web_union(r.src, r.dst);
      if (r.kind == RelationKind::kCntCntOrder) {
        graph->order_out_.emplace(r.src, graph->relationships_.size());
      }
      graph->relationships_.push_back(std::move(r));
    } else {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  if (!graph) throw Error("ekg import: empty document");
  graph->frozen_ = true;  // exports are taken from frozen graphs
  return std::move(*graph);
}

bool Ekg::deep_equals(const Ekg& other) const {
  if (scenario_id_ != other.scenario_id_) return false;
  if (entities_.size() != other.entities_.size()) return false;
  if (relationships_.size() != other.relationships_.size()) return false;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const Entity& a = entities_[i];
    const Entity& b = other.entities_[i];
    if (a.id != b.id || a.kind != b.kind || a.label != b.label ||
        a.desc_origin != b.desc_origin || a.start_tag != b.start_tag ||
        a.tail_tag != b.tail_tag || a.branch_point != b.branch_point ||
        a.attributes != b.attributes || a.provenance != b.provenance) {
      return false;
    }
  }
  for (std::size_t i = 0; i < relationships_.size(); ++i) {
    const Relationship& a = relationships_[i];
    const Relationship& b = other.relationships_[i];
    if (a.src != b.src || a.dst != b.dst || a.kind != b.kind ||
        a.weight != b.weight || a.report_ids != b.report_ids) {
      return false;
    }
  }
  return true;
}

EkgBuilder::EkgBuilder(std::shared_ptr<const text::TextAnalyzer> analyzer,
                       WidgetNounTable nouns, PipelineConfig config)
    : analyzer_(std::move(analyzer)),
      nouns_(std::move(nouns)),
      config_(config) {}

Ekg EkgBuilder::construct_from_reports(
    const std::vector<corpus::TestReport>& reports) {
  std::string scenario = reports.empty() ? "" : reports.front().scenario_id;
  for (const auto& r : reports) {
    if (r.scenario_id != scenario) {
      throw Error("reports mix scenarios: " + scenario + " vs " +
                  r.scenario_id);
    }
  }
  Ekg graph(scenario, analyzer_, config_);
  for (const auto& r : reports) {
    ingest(graph, r);
    graph.coreference_resolve();
  }
  graph.freeze();
  return graph;
}

void EkgBuilder::ingest(Ekg& graph, const corpus::TestReport& report) {
  struct ParsedStep {
    const corpus::ReportStep* step;
    std::vector<text::OpTriple> triples;
  };
  std::vector<ParsedStep> parsed;
  for (const auto& step : report.steps) {
    try {
      auto triples = analyzer_->parse_step(analyzer_->segment(step.text));
      parsed.push_back(ParsedStep{&step, std::move(triples)});
    } catch (const UnparsableStep& e) {
      // Complementation: the step is skipped with a warning; other
      // reports cover the gap.
      warnings_.push_back(StepWarning{report.report_id, step.index, e.what()});
    }
  }

  // Image entities first, step order.
  for (const auto& ps : parsed) {
    if (!ps.step->screen) continue;
    Provenance prov{report.report_id, ps.step->index,
                    ProvenanceSource::kImage};
    auto structure = screen::analyze_screen(ps.step->screen->raster,
                                            ps.step->screen->text_layer,
                                            config_);
    for (const auto& w : structure.widgets) {
      std::string type_label = screen::to_string(w.widget_type);
      EntityDraft wid;
      wid.kind = EntityKind::kWid;
      wid.label = type_label;
      wid.provenance = prov;
      EntityId wid_id = graph.append_entity(wid);

      std::ostringstream geom;
      geom << w.bbox.x0 << ',' << w.bbox.y0 << ',' << w.bbox.x1 << ','
           << w.bbox.y1;

      EntityDraft cnt;
      cnt.kind = EntityKind::kCnt;
      cnt.provenance = prov;
      cnt.attributes["geometry"] = geom.str();
      std::optional<EntityId> txt_id;
      if (w.text) {
        std::string label_text = text::normalize(*w.text);
        EntityDraft txt;
        txt.kind = EntityKind::kTxt;
        txt.label = label_text;
        txt.desc_origin = false;
        txt.provenance = prov;
        txt_id = graph.append_entity(txt);
        cnt.label = label_text + " " + text::normalize(type_label);
      } else {
        cnt.label = text::normalize(type_label);
      }
      EntityId cnt_id = graph.append_entity(cnt);
      graph.append_relation(cnt_id, wid_id,
                            RelationKind::kCntWidConcreteWidget);
      if (txt_id) {
        graph.append_relation(cnt_id, *txt_id,
                              RelationKind::kCntTxtConcreteText);
      }
    }
    // Standalone texts stay observations; they feed query-time matching
    // but do not become entities.
  }

  // Text entities, operation chain, order edges, start/tail tags.
  std::vector<EntityId> chain;
  for (const auto& ps : parsed) {
    Provenance prov{report.report_id, ps.step->index, ProvenanceSource::kText};
    for (const auto& triple : ps.triples) {
      EntityDraft opt;
      opt.kind = EntityKind::kOpt;
      opt.label = triple.operation;
      opt.provenance = prov;
      EntityId opt_id = graph.append_entity(opt);

      auto words = split_words(triple.widget_phrase);
      std::string type_word;
      std::string name = triple.widget_phrase;
      if (!words.empty() && nouns_.is_noun(words.back())) {
        type_word = words.back();
        if (words.size() > 1) {
          name.clear();
          for (std::size_t i = 0; i + 1 < words.size(); ++i) {
            if (!name.empty()) name.push_back(' ');
            name += words[i];
          }
        }
      }

      EntityDraft cnt;
      cnt.kind = EntityKind::kCnt;
      cnt.label = text::normalize(triple.widget_phrase);
      cnt.provenance = prov;
      if (triple.parameter) cnt.attributes["parameter"] = *triple.parameter;
      EntityId cnt_id = graph.append_entity(cnt);

      EntityDraft txt;
      txt.kind = EntityKind::kTxt;
      txt.label = text::normalize(name);
      txt.desc_origin = true;
      txt.provenance = prov;
      EntityId txt_id = graph.append_entity(txt);
      graph.append_relation(cnt_id, txt_id,
                            RelationKind::kCntTxtConcreteText);

      if (!type_word.empty()) {
        if (auto wt = nouns_.type_of(type_word)) {
          EntityDraft wid;
          wid.kind = EntityKind::kWid;
          wid.label = screen::to_string(*wt);
          wid.provenance = prov;
          EntityId wid_id = graph.append_entity(wid);
          graph.append_relation(cnt_id, wid_id,
                                RelationKind::kCntWidConcreteWidget);
        }
      }
      graph.append_relation(cnt_id, opt_id, RelationKind::kCntOptOperate);

      if (triple.parameter) {
        EntityDraft param;
        param.kind = EntityKind::kCnt;
        param.label = *triple.parameter;  // literals keep their case
        param.provenance = prov;
        graph.append_entity(param);
      }
      chain.push_back(cnt_id);
    }
  }
  for (std::size_t i = 1; i < chain.size(); ++i) {
    graph.append_relation(chain[i - 1], chain[i], RelationKind::kCntCntOrder,
                          std::nullopt, report.report_id);
  }
  if (!chain.empty()) {
    EntityDraft start;
    start.kind = EntityKind::kCnt;
    start.label = graph.entity(chain.front()).label;
    start.start_tag = true;
    graph.append_entity(start);
    EntityDraft tail;
    tail.kind = EntityKind::kCnt;
    tail.label = graph.entity(chain.back()).label;
    tail.tail_tag = true;
    graph.append_entity(tail);
  }
}

}  // namespace scengraph::ekg
