#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace scengraph::text {

// One token from a segmented sentence. Plain tokens are lowercased;
// literal tokens come from quoted spans and keep their original case.
struct Token {
  std::string value;
  bool literal = false;

  bool operator==(const Token&) const = default;
};

// One operation extracted from a sentence: verb, target noun phrase,
// optional attached literal (input string, slide scale).
struct OpTriple {
  std::string operation;
  std::string widget_phrase;
  std::optional<std::string> parameter;

  bool operator==(const OpTriple&) const = default;
};

// Symmetric groups of equivalent terms, loaded one comma-separated
// group per line. Groups are disjoint; membership is case-insensitive.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  static SynonymLexicon load(const std::string& path);
  static SynonymLexicon from_lines(const std::vector<std::string>& lines);

  // True iff a and b normalize into the same group (reflexive).
  bool same_group(const std::string& a, const std::string& b) const;

  // Group representative for a term, or the term itself when ungrouped.
  std::string canonical(const std::string& term) const;

  bool contains(const std::string& term) const;

  // All members of the group containing `term` (empty if ungrouped).
  std::vector<std::string> group_of(const std::string& term) const;

  std::size_t group_count() const { return groups_.size(); }

 private:
  std::vector<std::vector<std::string>> groups_;
  std::map<std::string, std::size_t> index_;
};

// Per-operation parameter arity.
enum class ParamArity { kForbidden, kRequired };

// The closed operation vocabulary: canonical verb plus arity, loaded
// from a file of `verb required|none` lines.
class OperationVocabulary {
 public:
  static OperationVocabulary load(const std::string& path);
  static OperationVocabulary from_lines(const std::vector<std::string>& lines);

  bool is_operation(const std::string& verb) const;
  ParamArity arity(const std::string& verb) const;
  std::vector<std::string> all() const;

 private:
  std::map<std::string, ParamArity> ops_;
};

// Pluggable step-two similarity over already-canonicalized token bags.
class VectorMeasure {
 public:
  virtual ~VectorMeasure() = default;
  virtual double similarity(const std::map<std::string, int>& a,
                            const std::map<std::string, int>& b) const = 0;
};

// Default measure: cosine over bag-of-token count vectors.
class CosineMeasure : public VectorMeasure {
 public:
  double similarity(const std::map<std::string, int>& a,
                    const std::map<std::string, int>& b) const override;
};

// Bundles the lexicon, stop-word list, operation vocabulary and the
// vector measure behind the module's operations. Immutable once built;
// safe for unrestricted concurrent use.
class TextAnalyzer {
 public:
  TextAnalyzer(SynonymLexicon lexicon, std::set<std::string> stop_words,
               OperationVocabulary vocab,
               std::shared_ptr<const VectorMeasure> measure =
                   std::make_shared<CosineMeasure>());

  // Loads lexicon.txt, stopwords.txt and operations.txt from a data dir.
  static TextAnalyzer load(const std::string& data_dir);

  // Lowercases, strips punctuation, preserves quoted spans as literal
  // tokens, removes stop words (never from literals).
  std::vector<Token> segment(const std::string& sentence) const;

  // Verb-anchored grouping over segmented tokens; throws UnparsableStep
  // when no operation verb is found or a required parameter is missing.
  std::vector<OpTriple> parse_step(const std::vector<Token>& tokens) const;

  // Two-step similarity: synonym-group hit gives 1.0, otherwise the
  // vector measure over canonicalized token bags, clamped to [0,1].
  double text_similarity(const std::string& a, const std::string& b) const;

  bool is_synonym(const std::string& a, const std::string& b) const;

  // Canonicalized count vector used by the step-two measure. Whole-phrase
  // lexicon members collapse to their group representative before
  // tokenization; single tokens canonicalize through the lexicon after.
  std::map<std::string, int> vectorize(const std::string& s) const;

  const SynonymLexicon& lexicon() const { return lexicon_; }
  const OperationVocabulary& vocabulary() const { return vocab_; }
  const std::set<std::string>& stop_words() const { return stop_words_; }

 private:
  SynonymLexicon lexicon_;
  std::set<std::string> stop_words_;
  OperationVocabulary vocab_;
  std::shared_ptr<const VectorMeasure> measure_;
};

// Lowercase-and-trim normalization shared by lexicon lookups and
// entity label canonicalization.
std::string normalize(const std::string& s);

}  // namespace scengraph::text
