#include "ebl/segmenter.hpp"

#include <cctype>

namespace ebl {

std::string Segment::text() const {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

Segmenter::Segmenter(std::vector<std::string> markers) {
  for (const auto& m : markers) markers_.insert(fold_case(m));
}

Segmenter Segmenter::from_config(const Config& cfg) {
  return Segmenter(cfg.get_list("segmenter.markers"));
}

namespace {

struct RawToken {
  std::string_view text;
  size_t begin;
  size_t end;
};

std::vector<RawToken> tokenize(std::string_view line) {
  std::vector<RawToken> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start, i});
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'';
}

// The token with leading/trailing punctuation removed. Apostrophes survive
// only in word-internal position.
std::string strip_token(std::string_view tok) {
  size_t b = 0, e = tok.size();
  while (b < e && !is_word_char(tok[b])) ++b;
  while (e > b && !is_word_char(tok[e - 1])) --e;
  while (b < e && tok[b] == '\'') ++b;
  while (e > b && tok[e - 1] == '\'') --e;
  return std::string(tok.substr(b, e - b));
}

bool ends_sentence(std::string_view tok) {
  if (tok.empty()) return false;
  char c = tok.back();
  return c == '.' || c == '!' || c == '?';
}

}  // namespace

std::vector<Segment> Segmenter::segment(std::string_view line) const {
  std::vector<Segment> out;
  Segment current;
  bool open = false;

  auto close = [&] {
    if (open && !current.words.empty()) out.push_back(current);
    current = Segment{};
    open = false;
  };

  for (const RawToken& tok : tokenize(line)) {
    std::string word = strip_token(tok.text);
    if (word.empty()) continue;  // pure punctuation
    if (!open) {
      current.begin = tok.begin;
      open = true;
    }
    current.words.push_back(word);
    current.end = tok.end;
    if (ends_sentence(tok.text)) {
      close();
    } else if (current.words.size() == 1 && tok.text.back() == ',' &&
               markers_.count(fold_case(word))) {
      close();  // segment-initial discourse marker set off by a comma
    }
  }
  close();
  return out;
}

Tagger::Tagger(const TagSet& ts, const Lexicon& lex, std::string default_tag)
    : ts_(ts), lex_(lex), default_tag_(std::move(default_tag)) {
  if (!ts_.has_tag(default_tag_))
    throw ConfigError("tagger default tag '" + default_tag_ + "' is not declared");
}

Tagger Tagger::from_config(const TagSet& ts, const Lexicon& lex,
                           const Config& cfg) {
  return Tagger(ts, lex, cfg.get("tagger.default_tag", "noun"));
}

std::string Tagger::tag_word(std::string_view word) const {
  std::vector<std::string> candidates;  // distinct tags in lexicon order
  for (const auto& entry : lex_.lookup(word)) {
    bool known = false;
    for (const auto& t : candidates) known = known || t == entry.tag;
    if (!known) candidates.push_back(entry.tag);
  }
  if (candidates.empty()) return default_tag_;
  std::string best = candidates.front();
  long best_freq = lex_.frequency(word, best);
  for (size_t i = 1; i < candidates.size(); ++i) {
    long f = lex_.frequency(word, candidates[i]);
    if (f > best_freq) {
      best = candidates[i];
      best_freq = f;
    }
  }
  return best;
}

TagSequence Tagger::tag(const Segment& seg) const {
  TagSequence out;
  out.tags.reserve(seg.words.size());
  for (const auto& w : seg.words) out.tags.push_back(tag_word(w));
  return out;
}

}  // namespace ebl
