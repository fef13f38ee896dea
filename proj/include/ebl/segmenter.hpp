#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/config.hpp"
#include "ebl/tagset.hpp"

namespace ebl {

/// A substring of one input line, parsed independently of its neighbours.
struct Segment {
  std::vector<std::string> words;
  size_t begin = 0;  // character offsets into the source line
  size_t end = 0;

  std::string text() const;  // space-joined words
};

/// Rule-based segmenter. Splits after tokens carrying sentence-final
/// punctuation (. ! ?) and after a configured discourse marker followed by a
/// comma. Punctuation is stripped from the stored words; internal
/// apostrophes are kept. Pure and deterministic.
class Segmenter {
 public:
  explicit Segmenter(std::vector<std::string> markers = {});
  static Segmenter from_config(const Config& cfg);

  std::vector<Segment> segment(std::string_view line) const;

 private:
  std::set<std::string> markers_;  // case-folded
};

/// Dictionary tagger: one tag per word. Among a word's lexicon tags the one
/// with the highest unigram frequency wins (ties go to lexicon order);
/// unknown words get the configured default open-class tag.
class Tagger {
 public:
  Tagger(const TagSet& ts, const Lexicon& lex, std::string default_tag = "noun");
  static Tagger from_config(const TagSet& ts, const Lexicon& lex,
                            const Config& cfg);

  TagSequence tag(const Segment& seg) const;
  std::string tag_word(std::string_view word) const;

 private:
  const TagSet& ts_;
  const Lexicon& lex_;
  std::string default_tag_;
};

}  // namespace ebl
