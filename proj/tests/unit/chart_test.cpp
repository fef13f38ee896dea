#include "ebl/chart.hpp"

#include <doctest.h>

#include <set>

#include "../testlib.hpp"
#include "ebl/config.hpp"

using namespace ebl;

namespace {

const TagSet& fixture_tagset() {
  static TagSet ts = TagSet::load(read_file(std::string(EBL_FIXTURE_DIR) + "/tagset.tags"));
  return ts;
}

const Lexicon& fixture_lexicon() {
  static Lexicon lex = Lexicon::load(
      read_file(std::string(EBL_FIXTURE_DIR) + "/lexicon.lex"), fixture_tagset());
  return lex;
}

const Grammar& fixture_grammar() {
  static Grammar g = Grammar::load(read_file(std::string(EBL_FIXTURE_DIR) + "/grammar.gram"));
  return g;
}

const TagWordLexicon& fixture_tagwords() {
  static TagWordLexicon tw(fixture_tagset(), fixture_lexicon());
  return tw;
}

TagSequence seq_of(std::initializer_list<const char*> tags) {
  TagSequence s;
  for (const char* t : tags) s.tags.emplace_back(t);
  return s;
}

std::set<std::string> skeletons_of(const std::vector<ParseTree>& parses) {
  std::set<std::string> out;
  for (const auto& p : parses) out.insert(skeleton(p.derivation));
  return out;
}

}  // namespace

TEST_CASE("grammar load: fixture has 15 rules and a start constraint") {
  const Grammar& g = fixture_grammar();
  CHECK(g.rules().size() == 15);
  CHECK(g.start() == parse_fs("[cat:s]"));
}

TEST_CASE("grammar load: faults carry locations") {
  CHECK_THROWS_WITH_AS(Grammar::load("rule broken -> [cat:x] := \n"),
                       doctest::Contains("broken"), DataError);
  CHECK_THROWS_WITH_AS(Grammar::load("rule a -> [cat:x] := [cat:y]\n"),
                       doctest::Contains("no start"), DataError);
}

TEST_CASE("parse_tags: determiner noun gives exactly one parse") {
  auto parses = parse_tags(fixture_grammar(), fixture_tagwords(),
                           seq_of({"determiner", "noun"}));
  REQUIRE(parses.size() == 1);
  const ParseTree& t = parses[0];
  CHECK(t.leaves.size() == 2);
  CHECK(t.root_fs.atom_at(FeaturePath::parse("cat")) == "s");
  // Both leaves anchor inside the subject frame.
  CHECK(t.leaf_anchors[0] == t.root_fs.at(FeaturePath::parse("subj.det")));
  CHECK(t.leaf_anchors[1] == t.root_fs.at(FeaturePath::parse("subj.head")));
}

TEST_CASE("parse_tags: single interjection parses via a unary chain") {
  auto parses = parse_tags(fixture_grammar(), fixture_tagwords(),
                           seq_of({"interjection"}));
  REQUIRE(parses.size() == 1);
  CHECK(skeleton(parses[0].derivation) == "(s_intj 0)");
}

TEST_CASE("parse: two determiners have no parse") {
  const auto& tw = fixture_tagwords();
  std::vector<FeatureStructure> leaves = {tw.entry("determiner"),
                                          tw.entry("determiner")};
  CHECK(parse(fixture_grammar(), leaves).empty());
}

TEST_CASE("parse: complement/adjunct ambiguity is enumerated in rule order") {
  auto parses = parse_tags(
      fixture_grammar(), fixture_tagwords(),
      seq_of({"pronoun", "verb", "verb_comp_prep", "determiner", "noun"}));
  REQUIRE(parses.size() == 2);
  // vp_vpp is declared before vp_pmod, so the complement reading comes first.
  CHECK(skeleton(parses[0].derivation).find("vp_vpp") != std::string::npos);
  CHECK(skeleton(parses[1].derivation).find("vp_pmod") != std::string::npos);
  CHECK(parses[0].root_fs.atom_at(FeaturePath::parse("pred.cform")) == "pp");
  CHECK(parses[1].root_fs.atom_at(FeaturePath::parse("pred.cform")) == "none");
}

TEST_CASE("parse: subject sharing is threaded into the verb's agent") {
  auto parses = parse_tags(fixture_grammar(), fixture_tagwords(),
                           seq_of({"pronoun", "verb"}));
  REQUIRE(parses.size() == 1);
  const FeatureStructure& fs = parses[0].root_fs;
  CHECK(fs.at(FeaturePath::parse("subj")) ==
        fs.at(FeaturePath::parse("pred.agent")));
}

TEST_CASE("parse: a 21-tag sequence completes") {
  TagSequence seq;
  for (int i = 0; i < 21; ++i) seq.tags.emplace_back("noun");
  auto parses = parse_tags(fixture_grammar(), fixture_tagwords(), seq);
  CHECK(parses.empty());  // nothing combines bare nominals; must terminate
}

TEST_CASE("parse: leaf counts always match the input length") {
  for (auto tags : {seq_of({"determiner", "noun"}),
                    seq_of({"pronoun", "verb", "determiner", "noun"}),
                    seq_of({"aux_mod", "verb_trans", "determiner", "noun"})}) {
    for (const auto& p : parse_tags(fixture_grammar(), fixture_tagwords(), tags)) {
      CHECK(p.leaves.size() == tags.size());
      CHECK(p.leaf_anchors.size() == tags.size());
    }
  }
}

TEST_CASE("replay: recorded rule applications reproduce the root") {
  for (auto tags : {seq_of({"determiner", "noun"}),
                    seq_of({"pronoun", "verb", "verb_comp_prep", "determiner", "noun"}),
                    seq_of({"pronoun", "aux_be", "verb"}),
                    seq_of({"verb_intrans", "verb_mod_prep", "noun"})}) {
    auto parses = parse_tags(fixture_grammar(), fixture_tagwords(), tags);
    REQUIRE(!parses.empty());
    for (const auto& p : parses) {
      CHECK(replay(fixture_grammar(), p) == p.root_fs);
    }
  }
}

TEST_CASE("parse: determinism across runs") {
  auto tags = seq_of({"pronoun", "verb", "verb_comp_prep", "determiner", "noun"});
  auto a = parse_tags(fixture_grammar(), fixture_tagwords(), tags);
  auto b = parse_tags(fixture_grammar(), fixture_tagwords(), tags);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].root_fs == b[i].root_fs);
    CHECK(skeleton(a[i].derivation) == skeleton(b[i].derivation));
  }
}

TEST_CASE("parse: monotone in lexical specificity") {
  const Lexicon& lex = fixture_lexicon();
  const auto& tw = fixture_tagwords();

  // General tag-words admit both readings; each specific verb entry admits
  // a subset of the rule skeletons.
  auto tags = seq_of({"pronoun", "verb", "verb_comp_prep", "determiner", "noun"});
  auto general = skeletons_of(parse_tags(fixture_grammar(), tw, tags));
  REQUIRE(general.size() == 2);

  auto leaves_with = [&](const FeatureStructure& verb_fs) {
    return std::vector<FeatureStructure>{lex.lookup("he")[0].fs, verb_fs,
                                         lex.lookup("at")[0].fs,
                                         lex.lookup("the")[0].fs,
                                         lex.lookup("dog")[0].fs};
  };
  auto looks = lex.lookup("looks");  // [cform:pp] then [cform:none]
  REQUIRE(looks.size() == 2);
  for (const auto& entry : looks) {
    CHECK(subsumes(tw.entry("verb"), entry.fs));
    auto specific = skeletons_of(parse(fixture_grammar(), leaves_with(entry.fs)));
    CHECK(specific.size() == 1);
    for (const auto& s : specific) CHECK(general.count(s) == 1);
  }
}

TEST_CASE("parse: specific entries can fail where tag-words succeed") {
  const Lexicon& lex = fixture_lexicon();
  // runs[cform:np] cannot head an intransitive clause.
  std::vector<FeatureStructure> np_leaves = {lex.lookup("he")[0].fs,
                                             lex.lookup("runs")[0].fs};
  CHECK(parse(fixture_grammar(), np_leaves).empty());
  std::vector<FeatureStructure> none_leaves = {lex.lookup("he")[0].fs,
                                               lex.lookup("runs")[1].fs};
  CHECK(parse(fixture_grammar(), none_leaves).size() == 1);
}

TEST_CASE("apply_rule: arity mismatch is a fault") {
  const Grammar& g = fixture_grammar();
  const Rule* binary = nullptr;
  for (const auto& r : g.rules())
    if (r.arity == 2) binary = &r;
  REQUIRE(binary);
  FeatureStructure top;
  CHECK_THROWS_AS(apply_rule(*binary, {&top}), DataError);
}
