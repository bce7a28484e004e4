#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scengraph/config.hpp"
#include "scengraph/report_corpus.hpp"
#include "scengraph/screen_analysis.hpp"
#include "scengraph/text_analysis.hpp"

namespace scengraph::ekg {

enum class EntityKind { kCnt, kWid, kOpt, kTxt };
enum class RelationKind {
  kTxtTxtSimilar,
  kCntOptOperate,
  kCntTxtConcreteText,
  kCntWidConcreteWidget,
  kCntCntSimilar,
  kCntCntOrder,
};

std::string to_string(EntityKind k);
std::string to_string(RelationKind k);
std::optional<EntityKind> entity_kind_from_string(const std::string& s);
std::optional<RelationKind> relation_kind_from_string(const std::string& s);

enum class ProvenanceSource { kImage, kText };

struct Provenance {
  std::string report_id;
  int step_index = 0;
  ProvenanceSource source = ProvenanceSource::kText;

  auto operator<=>(const Provenance&) const = default;
};

using EntityId = int;

struct Entity {
  EntityId id = -1;
  EntityKind kind = EntityKind::kCnt;
  std::string label;
  // TXT entities split by origin: a name mentioned in a sentence and
  // the same string read off a screenshot stay distinct nodes.
  bool desc_origin = false;
  std::map<std::string, std::string> attributes;
  bool start_tag = false;
  bool tail_tag = false;
  bool branch_point = false;
  std::set<Provenance> provenance;
};

struct Relationship {
  EntityId src = -1;
  EntityId dst = -1;
  RelationKind kind = RelationKind::kCntCntOrder;
  std::optional<double> weight;
  // Reports whose step order produced this edge (order edges only).
  std::set<std::string> report_ids;
};

enum class RelationOutcome {
  kStored,
  kDuplicate,
  kSelfLoop,
  kLoopAvoided,
  kOrderCycleSkipped,
};

// Everything known about an entity draft before appending.
struct EntityDraft {
  EntityKind kind = EntityKind::kCnt;
  std::string label;
  bool desc_origin = false;
  bool start_tag = false;
  bool tail_tag = false;
  std::map<std::string, std::string> attributes;
  std::optional<Provenance> provenance;
};

// One ranked query result.
struct WidgetCandidate {
  std::size_t widget_index = 0;  // into the queried structure's widgets
  Rect bbox;
  std::optional<std::string> widget_text;
  screen::WidgetType widget_type = screen::WidgetType::kUnknown;
  std::string operation;
  std::optional<std::string> parameter;  // entity-recorded literal if any
  double probability = 0.0;
  bool tail = false;
  bool branch = false;
  EntityId matched_entity = -1;
};

// The test context as the graph sees it: the entity matched by the last
// executed event (empty context means scenario start).
struct QueryContext {
  std::optional<EntityId> last_matched;
};

// Maps trailing phrase nouns to widget types ('button Button'); a '-'
// type records a noun that splits off without producing a WID entity.
class WidgetNounTable {
 public:
  static WidgetNounTable load(const std::string& path);
  static WidgetNounTable from_lines(const std::vector<std::string>& lines);

  bool is_noun(const std::string& word) const;
  std::optional<screen::WidgetType> type_of(const std::string& word) const;

 private:
  std::map<std::string, std::optional<screen::WidgetType>> nouns_;
};

// Legal operations per widget type ('input TextField').
class OpLegality {
 public:
  static OpLegality load(const std::string& path);
  static OpLegality from_lines(const std::vector<std::string>& lines);

  bool legal(const std::string& op, screen::WidgetType type) const;

 private:
  std::map<std::string, std::set<screen::WidgetType>> table_;
};

// The event knowledge graph for one scenario. Single-writer during
// construction; freeze() computes branch points and validates shape,
// after which queries may run concurrently.
class Ekg {
 public:
  Ekg(std::string scenario_id,
      std::shared_ptr<const text::TextAnalyzer> analyzer,
      PipelineConfig config = {});

  const std::string& scenario_id() const { return scenario_id_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relationship>& relationships() const {
    return relationships_;
  }
  const Entity& entity(EntityId id) const { return entities_.at(id); }
  bool frozen() const { return frozen_; }
  const PipelineConfig& config() const { return config_; }
  const text::TextAnalyzer& analyzer() const { return *analyzer_; }

  // Deduplicates on (kind, label, origin); merging unions provenance
  // and tags. Tag or vocabulary violations raise EntityKindError.
  EntityId append_entity(const EntityDraft& draft);

  // Validates endpoint kinds (RelationKindError on mismatch), rejects
  // self loops and duplicates, and refuses any similar/concrete-text
  // edge that would close a cycle in the coreference web.
  RelationOutcome append_relation(EntityId src, EntityId dst,
                                  RelationKind kind,
                                  std::optional<double> weight = std::nullopt,
                                  const std::string& report_id = "");

  std::optional<EntityId> find(EntityKind kind, const std::string& label,
                               bool desc_origin = false) const;

  // Links every CNT/CNT and TXT/TXT pair at or above theta, subject to
  // loop avoidance; never deletes entities.
  void coreference_resolve();

  // Computes branch points and validates graph shape; idempotent.
  void freeze();

  // Entities reachable from the context by order edges, hopping through
  // CNT similar edges at zero cost. Empty context yields the closure of
  // start-tagged entities.
  std::set<EntityId> reachable_from(const QueryContext& context) const;

  // Ranked candidates for every matchable widget of the structure;
  // probability follows the two-step rule: zero when the matched entity
  // is off the reachable path, best attained similarity otherwise.
  std::vector<WidgetCandidate> query(const screen::GuiStructure& structure,
                                     const QueryContext& context,
                                     const OpLegality& legality) const;

  // Per-kind entity and relationship counts (the construction ledger).
  std::map<std::string, std::size_t> ontology_counts() const;

  std::string export_structured() const;
  std::string export_dot() const;
  static Ekg import_structured(const std::string& content,
                               std::shared_ptr<const text::TextAnalyzer>
                                   analyzer,
                               PipelineConfig config = {});

  bool deep_equals(const Ekg& other) const;

 private:
  friend class EkgBuilder;

  int web_find(int v) const;
  void web_union(int a, int b);
  std::set<EntityId> similar_closure(EntityId seed) const;
  bool order_path_exists_in_report(EntityId from, EntityId to,
                                   const std::string& report_id) const;

  std::string scenario_id_;
  std::shared_ptr<const text::TextAnalyzer> analyzer_;
  PipelineConfig config_;
  std::vector<Entity> entities_;
  std::vector<Relationship> relationships_;
  std::map<std::string, EntityId> index_;  // dedup key -> id
  std::set<std::pair<EntityId, EntityId>> similar_pairs_[2];
  mutable std::vector<int> web_parent_;  // union-find over the coreference web
  std::multimap<EntityId, std::size_t> order_out_;  // src -> edge index
  bool frozen_ = false;
};

// Per-report accumulation implementing the construction loop: image
// entities, text entities, relationships, then coreference resolution.
class EkgBuilder {
 public:
  EkgBuilder(std::shared_ptr<const text::TextAnalyzer> analyzer,
             WidgetNounTable nouns, PipelineConfig config = {});

  struct StepWarning {
    std::string report_id;
    int step_index;
    std::string message;
  };

  // All reports must share one scenario_id; the result is frozen.
  Ekg construct_from_reports(const std::vector<corpus::TestReport>& reports);

  const std::vector<StepWarning>& warnings() const { return warnings_; }

 private:
  void ingest(Ekg& graph, const corpus::TestReport& report);

  std::shared_ptr<const text::TextAnalyzer> analyzer_;
  WidgetNounTable nouns_;
  PipelineConfig config_;
  std::vector<StepWarning> warnings_;
};

}  // namespace scengraph::ekg
