#include "ebl/tagset.hpp"

#include <doctest.h>

#include "../testlib.hpp"
#include "ebl/config.hpp"

using namespace ebl;
using ebltest::fs_of;

static const TagSet& fixture_tagset() {
  static TagSet ts = TagSet::load(read_file(std::string(EBL_FIXTURE_DIR) + "/tagset.tags"));
  return ts;
}

static const Lexicon& fixture_lexicon() {
  static Lexicon lex = Lexicon::load(
      read_file(std::string(EBL_FIXTURE_DIR) + "/lexicon.lex"), fixture_tagset());
  return lex;
}

TEST_CASE("load_tagset: fixture declares the five preposition classes") {
  const TagSet& ts = fixture_tagset();
  // The paper's five classes, plus case_prep as the sixth subclass.
  const char* classes[] = {"noun_mod_prep", "verb_mod_prep", "verb_comp_prep",
                           "part_prep", "pass_prep"};
  for (const char* name : classes) {
    REQUIRE(ts.has_tag(name));
    CHECK(ts.tag(name).superclass == "preposition");
  }
  CHECK(ts.tag("case_prep").superclass == "preposition");
  int subclasses = 0;
  for (const auto& t : ts.tags())
    if (t.superclass == "preposition") ++subclasses;
  CHECK(subclasses == 6);
  CHECK(ts.tag("adjective").deletable);
  CHECK(ts.tag("adverb").deletable);
  CHECK(!ts.tag("noun").deletable);
}

TEST_CASE("load_tagset: undeclared superclass is an error naming the tag") {
  const char* text =
      "features cat\n"
      "tag thing super=stuff\n"
      "macro thing [cat:x]\n";
  CHECK_THROWS_WITH_AS(TagSet::load(text),
                       doctest::Contains("unknown superclass 'stuff'"), DataError);
}

TEST_CASE("load_tagset: empty input is an error") {
  CHECK_THROWS_WITH_AS(TagSet::load(""), doctest::Contains("no tags declared"),
                       DataError);
}

TEST_CASE("load_tagset: every violation is reported with its location") {
  const char* text =
      "features cat\n"
      "tag a\n"
      "tag a\n"
      "tag b super=missing\n"
      "macro a [cat:x\n"
      "macro b [cat:y]\n";
  try {
    TagSet::load(text);
    FAIL("expected a fault");
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("duplicate tag 'a'") != std::string::npos);
    CHECK(msg.find("unknown superclass 'missing'") != std::string::npos);
    CHECK(msg.find("macro for 'a'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("generalize_tag: superclass when declared, else identity") {
  const TagSet& ts = fixture_tagset();
  CHECK(ts.generalize_tag("case_prep") == "preposition");
  CHECK(ts.generalize_tag("noun_mod_prep") == "preposition");
  CHECK(ts.generalize_tag("determiner") == "determiner");
  CHECK(ts.generalize_tag("preposition") == "preposition");
}

TEST_CASE("generalize_key: pointwise and idempotent") {
  const TagSet& ts = fixture_tagset();
  TagSequence seq{{"case_prep", "determiner", "noun"}};
  TagSequence want{{"preposition", "determiner", "noun"}};
  CHECK(ts.generalize_key(seq) == want);
  TagSequence plain{{"determiner", "noun"}};
  CHECK(ts.generalize_key(plain) == plain);
  TagSequence mixed{{"verb_trans", "noun_mod_prep", "noun"}};
  TagSequence mixed_want{{"verb", "preposition", "noun"}};
  CHECK(ts.generalize_key(mixed) == mixed_want);
  CHECK(ts.generalize_key(ts.generalize_key(mixed)) == ts.generalize_key(mixed));
}

TEST_CASE("lookup_word: homographs, unknowns, case folding") {
  const Lexicon& lex = fixture_lexicon();
  auto the = lex.lookup("the");
  REQUIRE(the.size() == 1);
  CHECK(the[0].tag == "determiner");
  CHECK(lex.lookup("zzyx").empty());
  auto runs = lex.lookup("RUN");
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].tag == "verb");
  CHECK(runs[1].tag == "verb");
  CHECK(runs[0].fs.atom_at(FeaturePath::parse("cform")) == "np");
  CHECK(runs[1].fs.atom_at(FeaturePath::parse("cform")) == "none");
}

TEST_CASE("lexical entries unify macro with overrides and stay subsumed") {
  const TagSet& ts = fixture_tagset();
  const Lexicon& lex = fixture_lexicon();
  for (const auto& e : lex.entries()) {
    CHECK(subsumes(ts.macro(e.tag), e.fs));
  }
  CHECK_THROWS_AS(
      Lexicon::load("word x tag=noun fs=[wtype:weird]\n", ts), DataError);
  CHECK_THROWS_AS(Lexicon::load("word x tag=nope\n", ts), DataError);
}

TEST_CASE("tagword_entry: fold of anti-unification over the tag's entries") {
  const TagSet& ts = fixture_tagset();
  const Lexicon& lex = fixture_lexicon();
  TagWordLexicon tw(ts, lex);

  // Single-entry tags give that entry back.
  auto got = lex.lookup("got");
  REQUIRE(got.size() == 1);
  // got shares its tag with sees/see/notify plus the head/water homographs;
  // the tag-word keeps what they all share.
  CHECK(subsumes(tw.entry("verb_trans"), got[0].fs));

  // Determiners disagree on num, so the arc survives with a top value.
  const FeatureStructure& det = tw.entry("determiner");
  NodeId num = det.at(FeaturePath::parse("num"));
  REQUIRE(num != kNoNode);
  CHECK(det.node(num).kind == FsKind::Top);
  CHECK(det.atom_at(FeaturePath::parse("cat")) == "det");
  for (const auto& e : lex.lookup("these")) CHECK(subsumes(det, e.fs));

  // Entry-less tags fall back to the macro.
  CHECK(tw.entry("preposition") == ts.macro("preposition"));
  CHECK(tw.entry("aux") == ts.macro("aux"));

  // Invariant: the tag-word subsumes every entry of its tag.
  for (const auto& e : lex.entries()) CHECK(subsumes(tw.entry(e.tag), e.fs));
}

TEST_CASE("tagset fingerprint is order independent and content sensitive") {
  const char* a =
      "features cat\n"
      "tag x\n"
      "macro x [cat:one]\n"
      "tag y\n"
      "macro y [cat:two]\n";
  const char* b =
      "features cat\n"
      "tag y\n"
      "macro y [cat:two]\n"
      "tag x\n"
      "macro x [cat:one]\n";
  const char* c =
      "features cat\n"
      "tag x\n"
      "macro x [cat:one]\n"
      "tag y deletable\n"
      "macro y [cat:two]\n";
  CHECK(TagSet::load(a).fingerprint() == TagSet::load(b).fingerprint());
  CHECK(TagSet::load(a).fingerprint() != TagSet::load(c).fingerprint());
}
