#include "scengraph/text_analysis.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "scengraph/errors.hpp"

using namespace scengraph;
using namespace scengraph::text;

namespace {

const char* kDataDir = SCENGRAPH_SOURCE_DIR "/data";

TextAnalyzer make_analyzer() { return TextAnalyzer::load(kDataDir); }

// Independent cosine oracle: splits on whitespace, no lexicon, no stop
// words. Valid for inputs that avoid both.
double cosine_oracle(const std::string& a, const std::string& b) {
  auto counts = [](const std::string& s) {
    std::map<std::string, int> m;
    std::istringstream in(s);
    std::string w;
    while (in >> w) m[w]++;
    return m;
  };
  auto va = counts(a);
  auto vb = counts(b);
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (auto& [k, v] : va) {
    na += v * v;
    if (vb.count(k)) dot += v * vb[k];
  }
  for (auto& [k, v] : vb) nb += v * v;
  if (na == 0 || nb == 0) return 0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST_CASE("segment basics") {
  auto a = make_analyzer();
  CHECK(a.segment("").empty());

  auto toks = a.segment("click on the Login button");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == Token{"click", false});
  CHECK(toks[1] == Token{"login", false});
  CHECK(toks[2] == Token{"button", false});

  toks = a.segment("input the password '123456'");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == Token{"input", false});
  CHECK(toks[1] == Token{"password", false});
  CHECK(toks[2] == Token{"123456", true});
}

TEST_CASE("segment preserves literal case and never stop-filters literals") {
  auto a = make_analyzer();
  auto toks = a.segment("click on 'The Button'");
  REQUIRE(toks.size() == 2);
  CHECK(toks[1] == Token{"The Button", true});
}

TEST_CASE("parse_step reproduces the multi-operation sentence") {
  auto a = make_analyzer();
  auto triples = a.parse_step(a.segment(
      "input the username 'admin' and password '123456', and then click on "
      "the Login button"));
  REQUIRE(triples.size() == 3);
  CHECK(triples[0] == OpTriple{"input", "username", "admin"});
  CHECK(triples[1] == OpTriple{"input", "password", "123456"});
  CHECK(triples[2] == OpTriple{"click", "login button", std::nullopt});
}

TEST_CASE("parse_step single click") {
  auto a = make_analyzer();
  auto triples = a.parse_step(a.segment("click on the menu button"));
  REQUIRE(triples.size() == 1);
  CHECK(triples[0] == OpTriple{"click", "menu button", std::nullopt});
}

TEST_CASE("parse_step quoted widget names join the phrase for click") {
  auto a = make_analyzer();
  auto triples = a.parse_step(a.segment("choose the 'Account Login' option"));
  REQUIRE(triples.size() == 1);
  CHECK(triples[0] == OpTriple{"choose", "account login option", std::nullopt});
}

TEST_CASE("parse_step trailing phrase extends the last input triple") {
  auto a = make_analyzer();
  auto triples = a.parse_step(
      a.segment("input the phone number '5551234' in the phone textfield"));
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].operation == "input");
  CHECK(triples[0].widget_phrase == "phone number phone textfield");
  CHECK(triples[0].parameter == "5551234");
}

TEST_CASE("parse_step verb synonyms canonicalize") {
  auto a = make_analyzer();
  auto triples = a.parse_step(a.segment("press the Login button"));
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].operation == "click");
}

TEST_CASE("parse_step failures") {
  auto a = make_analyzer();
  CHECK_THROWS_AS(a.parse_step(a.segment("the app crashes")), UnparsableStep);
  CHECK_THROWS_AS(a.parse_step(a.segment("input the username")),
                  UnparsableStep);
  CHECK_THROWS_AS(a.parse_step(std::vector<Token>{}), UnparsableStep);
}

TEST_CASE("text_similarity two-step contract") {
  auto a = make_analyzer();
  CHECK(a.text_similarity("login", "login") == doctest::Approx(1.0));
  CHECK(a.text_similarity("login", "sign in") == doctest::Approx(1.0));
  CHECK(a.text_similarity("Login", "SIGN IN") == doctest::Approx(1.0));

  // Brute-force vector oracle, frozen: shared token 'button' only.
  double expected = cosine_oracle("login button", "register button");
  CHECK(expected == doctest::Approx(0.5));
  CHECK(a.text_similarity("login button", "register button") ==
        doctest::Approx(expected));
  // Below the coreference threshold.
  CHECK(a.text_similarity("login button", "register button") < 0.8);

  CHECK(a.text_similarity("login", "login button") ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(a.text_similarity("apple", "orange") == doctest::Approx(0.0));
}

TEST_CASE("is_synonym") {
  auto a = make_analyzer();
  CHECK(a.is_synonym("click", "press"));
  CHECK(a.is_synonym("click", "click"));
  CHECK_FALSE(a.is_synonym("click", "input"));
  CHECK(a.is_synonym("textfield", "textbox"));
}

TEST_CASE("similarity properties: symmetry, identity, synonym implies one") {
  auto a = make_analyzer();
  std::mt19937 rng(7);
  std::vector<std::string> pool = {
      "login",  "sign in",   "login button", "password", "menu",
      "button", "textfield", "send code",    "register", "phone number",
      "code",   "email",     "account",      "pay now",  "search flight",
  };
  for (int i = 0; i < 300; ++i) {
    const auto& x = pool[rng() % pool.size()];
    const auto& y = pool[rng() % pool.size()];
    double xy = a.text_similarity(x, y);
    double yx = a.text_similarity(y, x);
    CHECK(xy == doctest::Approx(yx));
    CHECK(xy >= 0.0);
    CHECK(xy <= 1.0);
    if (a.is_synonym(x, y)) CHECK(xy == doctest::Approx(1.0));
  }
  for (const auto& x : pool) {
    CHECK(a.text_similarity(x, x) == doctest::Approx(1.0));
  }
}

TEST_CASE("synonym substitution leaves vectors unchanged") {
  auto a = make_analyzer();
  // Whole-phrase lexicon members collapse to one canonical vector, so a
  // label swap inside a group cannot move any similarity.
  for (const auto& probe :
       {"login button", "menu", "password", "account login option"}) {
    double via_login = a.text_similarity("login", probe);
    double via_signin = a.text_similarity("sign in", probe);
    CHECK(via_login == doctest::Approx(via_signin));
  }
}

TEST_CASE("parse_step triple count matches the grammar rule table") {
  auto a = make_analyzer();
  std::vector<std::string> sentences = {
      "click on the menu button",
      "choose the 'Account Login' option",
      "input the username 'admin' and password '123456', and then click on "
      "the Login button",
      "input the phone number '5551234' in the phone textfield",
      "click on the 'Send code' button",
      "input the code '9999', and then click on the Login button",
      "press the Register button, and then input the email 'a@b.c'",
  };
  for (const auto& s : sentences) {
    auto toks = a.segment(s);
    // Rule-table count: one triple per parameterless verb group, one
    // per literal inside a parameter-taking group.
    std::size_t expected = 0;
    bool in_required = false;
    for (const auto& t : toks) {
      bool is_verb =
          !t.literal && a.vocabulary().is_operation(a.lexicon().canonical(
                            t.value));
      if (is_verb) {
        std::string verb = a.lexicon().canonical(t.value);
        in_required = a.vocabulary().arity(verb) == ParamArity::kRequired;
        if (!in_required) ++expected;
      } else if (t.literal && in_required) {
        ++expected;
      }
    }
    CHECK(a.parse_step(toks).size() == expected);
  }
}

TEST_CASE("parse_step preserves sentence order") {
  auto a = make_analyzer();
  auto toks = a.segment(
      "input the code '9999', and then click on the Login button");
  auto triples = a.parse_step(toks);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0].operation == "input");
  CHECK(triples[1].operation == "click");
}
