#include "scengraph/text_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::text {

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

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string normalize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  bool prev_space = false;
  for (std::size_t i = begin; i < end; ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      if (!prev_space) out.push_back(' ');
      prev_space = true;
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
      prev_space = false;
    }
  }
  return out;
}

SynonymLexicon SynonymLexicon::load(const std::string& path) {
  return from_lines(read_lines(path));
}

SynonymLexicon SynonymLexicon::from_lines(
    const std::vector<std::string>& lines) {
  SynonymLexicon lex;
  for (const auto& line : lines) {
    if (is_comment_or_blank(line)) continue;
    std::vector<std::string> group;
    std::stringstream ss(line);
    std::string term;
    while (std::getline(ss, term, ',')) {
      std::string norm = normalize(term);
      if (norm.empty()) continue;
      group.push_back(norm);
    }
    if (group.size() < 2) continue;
    std::size_t gi = lex.groups_.size();
    for (const auto& t : group) {
      if (lex.index_.count(t)) {
        throw Error("lexicon term in two groups: " + t);
      }
      lex.index_[t] = gi;
    }
    lex.groups_.push_back(std::move(group));
  }
  return lex;
}

bool SynonymLexicon::same_group(const std::string& a,
                                const std::string& b) const {
  std::string na = normalize(a);
  std::string nb = normalize(b);
  if (na == nb) return true;
  auto ia = index_.find(na);
  auto ib = index_.find(nb);
  return ia != index_.end() && ib != index_.end() && ia->second == ib->second;
}

std::string SynonymLexicon::canonical(const std::string& term) const {
  std::string norm = normalize(term);
  auto it = index_.find(norm);
  if (it == index_.end()) return norm;
  return groups_[it->second].front();
}

bool SynonymLexicon::contains(const std::string& term) const {
  return index_.count(normalize(term)) > 0;
}

std::vector<std::string> SynonymLexicon::group_of(
    const std::string& term) const {
  auto it = index_.find(normalize(term));
  if (it == index_.end()) return {};
  return groups_[it->second];
}

OperationVocabulary OperationVocabulary::load(const std::string& path) {
  return from_lines(read_lines(path));
}

OperationVocabulary OperationVocabulary::from_lines(
    const std::vector<std::string>& lines) {
  OperationVocabulary v;
  for (const auto& line : lines) {
    if (is_comment_or_blank(line)) continue;
    std::stringstream ss(line);
    std::string verb, arity;
    ss >> verb >> arity;
    if (verb.empty()) continue;
    if (arity == "required") {
      v.ops_[normalize(verb)] = ParamArity::kRequired;
    } else if (arity == "none") {
      v.ops_[normalize(verb)] = ParamArity::kForbidden;
    } else {
      throw Error("bad arity '" + arity + "' for operation " + verb);
    }
  }
  return v;
}

bool OperationVocabulary::is_operation(const std::string& verb) const {
  return ops_.count(normalize(verb)) > 0;
}

ParamArity OperationVocabulary::arity(const std::string& verb) const {
  auto it = ops_.find(normalize(verb));
  if (it == ops_.end()) throw Error("unknown operation: " + verb);
  return it->second;
}

std::vector<std::string> OperationVocabulary::all() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : ops_) out.push_back(k);
  return out;
}

double CosineMeasure::similarity(const std::map<std::string, int>& a,
                                 const std::map<std::string, int>& b) const {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  for (const auto& [tok, na] : a) {
    auto it = b.find(tok);
    if (it != b.end()) dot += static_cast<double>(na) * it->second;
  }
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (const auto& [tok, n] : a) norm_a += static_cast<double>(n) * n;
  for (const auto& [tok, n] : b) norm_b += static_cast<double>(n) * n;
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

TextAnalyzer::TextAnalyzer(SynonymLexicon lexicon,
                           std::set<std::string> stop_words,
                           OperationVocabulary vocab,
                           std::shared_ptr<const VectorMeasure> measure)
    : lexicon_(std::move(lexicon)),
      stop_words_(std::move(stop_words)),
      vocab_(std::move(vocab)),
      measure_(std::move(measure)) {}

TextAnalyzer TextAnalyzer::load(const std::string& data_dir) {
  auto lexicon = SynonymLexicon::load(data_dir + "/lexicon.txt");
  auto vocab = OperationVocabulary::load(data_dir + "/operations.txt");
  std::set<std::string> stops;
  for (const auto& line : read_lines(data_dir + "/stopwords.txt")) {
    if (is_comment_or_blank(line)) continue;
    stops.insert(normalize(line));
  }
  return TextAnalyzer(std::move(lexicon), std::move(stops), std::move(vocab));
}

std::vector<Token> TextAnalyzer::segment(const std::string& sentence) const {
  std::vector<Token> out;
  std::string word;
  auto flush_word = [&] {
    if (word.empty()) return;
    std::string norm = normalize(word);
    word.clear();
    if (norm.empty() || stop_words_.count(norm)) return;
    out.push_back(Token{norm, false});
  };
  std::size_t i = 0;
  while (i < sentence.size()) {
    char c = sentence[i];
    if (c == '\'' || c == '"') {
      flush_word();
      char quote = c;
      std::size_t close = sentence.find(quote, i + 1);
      if (close == std::string::npos) {
        // Unterminated quote behaves as a plain character.
        ++i;
        continue;
      }
      out.push_back(Token{sentence.substr(i + 1, close - i - 1), true});
      i = close + 1;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '@' ||
        c == '.') {
      word.push_back(c);
      ++i;
      continue;
    }
    flush_word();
    ++i;
  }
  flush_word();
  // Trailing sentence punctuation can leave a bare '.' or '-' token.
  std::erase_if(out, [](const Token& t) {
    return !t.literal &&
           t.value.find_first_not_of(".-@") == std::string::npos;
  });
  return out;
}

std::vector<OpTriple> TextAnalyzer::parse_step(
    const std::vector<Token>& tokens) const {
  // Group tokens by operation verbs; tokens before the first verb are
  // leading context and are discarded.
  struct Group {
    std::string verb;
    std::vector<Token> body;
  };
  std::vector<Group> groups;
  for (const auto& tok : tokens) {
    // Verb synonyms (press, tap, select) canonicalize onto the closed
    // vocabulary before the check.
    if (!tok.literal && vocab_.is_operation(lexicon_.canonical(tok.value))) {
      groups.push_back(Group{lexicon_.canonical(tok.value), {}});
      continue;
    }
    if (groups.empty()) continue;
    groups.back().body.push_back(tok);
  }
  if (groups.empty()) {
    throw UnparsableStep("no operation verb in step");
  }

  std::vector<OpTriple> triples;
  for (const auto& g : groups) {
    if (vocab_.arity(g.verb) == ParamArity::kRequired) {
      // Each literal closes one triple over the phrase collected since
      // the previous literal. Tokens after the last literal extend the
      // last triple's phrase (trailing type nouns).
      std::vector<std::size_t> triple_starts;
      std::vector<std::string> phrase;
      bool any_literal = false;
      for (const auto& tok : g.body) {
        if (tok.literal) {
          if (phrase.empty()) {
            throw UnparsableStep("operation '" + g.verb +
                                 "' has a parameter but no target phrase");
          }
          std::string joined;
          for (const auto& w : phrase) {
            if (!joined.empty()) joined.push_back(' ');
            joined += w;
          }
          triple_starts.push_back(triples.size());
          triples.push_back(OpTriple{g.verb, joined, tok.value});
          phrase.clear();
          any_literal = true;
        } else {
          phrase.push_back(tok.value);
        }
      }
      if (!any_literal) {
        throw UnparsableStep("operation '" + g.verb +
                             "' requires a parameter");
      }
      if (!phrase.empty()) {
        auto& last = triples.back();
        for (const auto& w : phrase) {
          last.widget_phrase.push_back(' ');
          last.widget_phrase += w;
        }
      }
    } else {
      // One object per group; literals name the widget and join the
      // phrase in place.
      std::vector<std::string> phrase;
      for (const auto& tok : g.body) {
        phrase.push_back(tok.literal ? normalize(tok.value) : tok.value);
      }
      std::string joined;
      for (const auto& w : phrase) {
        if (!joined.empty()) joined.push_back(' ');
        joined += w;
      }
      if (joined.empty()) {
        throw UnparsableStep("operation '" + g.verb + "' has no target");
      }
      triples.push_back(OpTriple{g.verb, joined, std::nullopt});
    }
  }
  return triples;
}

std::map<std::string, int> TextAnalyzer::vectorize(const std::string& s) const {
  // Whole-phrase lexicon members collapse before tokenization so that
  // synonym substitution of a full label cannot change the vector.
  std::string subject = lexicon_.contains(s) ? lexicon_.canonical(s) : s;
  std::map<std::string, int> counts;
  for (const auto& tok : segment(subject)) {
    counts[lexicon_.canonical(tok.value)]++;
  }
  return counts;
}

double TextAnalyzer::text_similarity(const std::string& a,
                                     const std::string& b) const {
  std::string na = normalize(a);
  std::string nb = normalize(b);
  if (na.empty() || nb.empty()) return na == nb ? 1.0 : 0.0;
  if (na == nb) return 1.0;
  if (lexicon_.same_group(na, nb)) return 1.0;
  double v = measure_->similarity(vectorize(na), vectorize(nb));
  return std::clamp(v, 0.0, 1.0);
}

bool TextAnalyzer::is_synonym(const std::string& a,
                              const std::string& b) const {
  return lexicon_.same_group(a, b);
}

}  // namespace scengraph::text
