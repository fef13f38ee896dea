#include "ebl/tagset.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ebl {

std::string TagSequence::to_string() const {
  std::string out;
  for (size_t i = 0; i < tags.size(); ++i) {
    if (i) out += ' ';
    out += tags[i];
  }
  return out;
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// ---------------------------------------------------------------------------
// TagSet

namespace {

// Splits a line into leading words; the AVM payload (if any) is everything
// after the named prefix words.
struct LineScanner {
  std::string_view text;
  size_t pos = 0;

  std::optional<std::string> word() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos >= text.size()) return std::nullopt;
    size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    return std::string(text.substr(start, pos - start));
  }

  std::string_view rest() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    return text.substr(pos);
  }
};

void collect_features(const FeatureStructure& fs, std::set<std::string>& out) {
  for (int i = 0; i < fs.size(); ++i)
    for (const auto& [f, _] : fs.node(i).arcs) out.insert(f);
}

}  // namespace

TagSet TagSet::load(std::string_view text) {
  TagSet ts;
  std::vector<std::string> problems;
  std::map<std::string, std::string> macro_texts;
  std::map<std::string, int> macro_lines;

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    LineScanner scan{line};
    auto head = scan.word();
    if (!head || (*head)[0] == '#') continue;
    auto where = [&] { return "line " + std::to_string(lineno); };
    if (*head == "tag") {
      auto name = scan.word();
      if (!name) {
        problems.push_back(where() + ": tag directive without a name");
        continue;
      }
      if (ts.by_name_.count(*name)) {
        problems.push_back(where() + ": duplicate tag '" + *name + "'");
        continue;
      }
      Tag tag{*name, std::nullopt, false};
      bool bad = false;
      while (auto opt = scan.word()) {
        if (opt->rfind("super=", 0) == 0) {
          tag.superclass = opt->substr(6);
        } else if (*opt == "deletable") {
          tag.deletable = true;
        } else {
          problems.push_back(where() + ": unknown tag attribute '" + *opt + "'");
          bad = true;
        }
      }
      if (bad) continue;
      ts.by_name_.emplace(tag.name, ts.tags_.size());
      ts.tags_.push_back(std::move(tag));
    } else if (*head == "features") {
      while (auto f = scan.word()) ts.vocabulary_.insert(*f);
    } else if (*head == "macro") {
      auto name = scan.word();
      if (!name) {
        problems.push_back(where() + ": macro directive without a tag name");
        continue;
      }
      if (macro_texts.count(*name)) {
        problems.push_back(where() + ": duplicate macro for tag '" + *name + "'");
        continue;
      }
      macro_texts.emplace(*name, std::string(scan.rest()));
      macro_lines.emplace(*name, lineno);
    } else {
      problems.push_back(where() + ": unknown directive '" + *head + "'");
    }
  }

  if (ts.tags_.empty() && problems.empty()) problems.push_back("no tags declared");

  for (const auto& tag : ts.tags_) {
    if (tag.superclass) {
      auto it = ts.by_name_.find(*tag.superclass);
      if (it == ts.by_name_.end()) {
        problems.push_back("tag '" + tag.name + "': unknown superclass '" +
                           *tag.superclass + "'");
      } else if (ts.tags_[it->second].superclass) {
        problems.push_back("tag '" + tag.name + "': superclass '" +
                           *tag.superclass +
                           "' has a superclass of its own (chains must have depth 1)");
      }
    }
  }

  for (const auto& tag : ts.tags_) {
    auto it = macro_texts.find(tag.name);
    if (it == macro_texts.end()) {
      problems.push_back("tag '" + tag.name + "' has no macro");
      continue;
    }
    try {
      FeatureStructure fs = parse_fs(it->second);
      std::set<std::string> used;
      collect_features(fs, used);
      for (const auto& f : used) {
        if (!ts.vocabulary_.count(f))
          problems.push_back("macro for '" + tag.name + "' (line " +
                             std::to_string(macro_lines[tag.name]) +
                             "): feature '" + f + "' not in the declared vocabulary");
      }
      ts.macros_.emplace(tag.name, std::move(fs));
    } catch (const FsSyntaxError& e) {
      problems.push_back("macro for '" + tag.name + "' (line " +
                         std::to_string(macro_lines[tag.name]) + "): " + e.what());
    }
  }
  for (const auto& [name, _] : macro_texts) {
    if (!ts.by_name_.count(name))
      problems.push_back("macro for undeclared tag '" + name + "'");
  }

  if (!problems.empty()) {
    std::string msg = "invalid tagset:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }

  for (const auto& tag : ts.tags_)
    if (tag.superclass) ts.classes_with_subclasses_.insert(*tag.superclass);
  return ts;
}

const Tag& TagSet::tag_checked(std::string_view name, const char* caller) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end())
    throw DataError(std::string(caller) + ": undeclared tag '" +
                    std::string(name) + "'");
  return tags_[it->second];
}

const Tag& TagSet::tag(std::string_view name) const {
  return tag_checked(name, "tag");
}

bool TagSet::has_tag(std::string_view name) const {
  return by_name_.count(name) != 0;
}

const FeatureStructure& TagSet::macro(std::string_view tag) const {
  tag_checked(tag, "macro");
  return macros_.find(tag)->second;
}

const std::string& TagSet::generalize_tag(const std::string& tag) const {
  const Tag& t = tag_checked(tag, "generalize_tag");
  return t.superclass ? *t.superclass : t.name;
}

TagSequence TagSet::generalize_key(const TagSequence& seq) const {
  TagSequence out;
  out.tags.reserve(seq.tags.size());
  for (const auto& t : seq.tags) out.tags.push_back(generalize_tag(t));
  return out;
}

bool TagSet::class_has_subclasses(const std::string& tag) const {
  return classes_with_subclasses_.count(generalize_tag(tag)) != 0;
}

bool TagSet::compatible(const std::string& a, const std::string& b) const {
  return a == b || generalize_tag(a) == generalize_tag(b);
}

std::string TagSet::canonical_text() const {
  std::string out;
  std::vector<const Tag*> sorted;
  for (const auto& t : tags_) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const Tag* a, const Tag* b) { return a->name < b->name; });
  for (const Tag* t : sorted) {
    out += "tag " + t->name;
    if (t->superclass) out += " super=" + *t->superclass;
    if (t->deletable) out += " deletable";
    out += "\n";
    out += "macro " + t->name + " " + render(macros_.find(t->name)->second) + "\n";
  }
  for (const auto& f : vocabulary_) out += "feature " + f + "\n";
  return out;
}

std::string TagSet::fingerprint() const {
  return to_hex(fnv1a64(canonical_text()));
}

// ---------------------------------------------------------------------------
// Lexicon

Lexicon Lexicon::load(std::string_view text, const TagSet& ts) {
  Lexicon lex;
  std::vector<std::string> problems;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    LineScanner scan{line};
    auto head = scan.word();
    if (!head || (*head)[0] == '#') continue;
    auto where = [&] { return "line " + std::to_string(lineno); };
    if (*head == "word") {
      auto form = scan.word();
      auto tagattr = scan.word();
      if (!form || !tagattr || tagattr->rfind("tag=", 0) != 0) {
        problems.push_back(where() + ": expected 'word <form> tag=<tag> [fs=<avm>]'");
        continue;
      }
      std::string tag = tagattr->substr(4);
      if (!ts.has_tag(tag)) {
        problems.push_back(where() + ": undeclared tag '" + tag + "'");
        continue;
      }
      FeatureStructure fs = ts.macro(tag);
      std::string_view rest = scan.rest();
      if (!rest.empty()) {
        if (rest.rfind("fs=", 0) != 0) {
          problems.push_back(where() + ": expected fs=<avm>, got '" +
                             std::string(rest) + "'");
          continue;
        }
        try {
          FeatureStructure overrides = parse_fs(rest.substr(3));
          auto unified = unify(fs, overrides);
          if (!unified) {
            problems.push_back(where() + ": overrides for '" + *form +
                               "' do not unify with macro '" + tag + "'");
            continue;
          }
          fs = std::move(*unified);
        } catch (const FsSyntaxError& e) {
          problems.push_back(where() + ": " + e.what());
          continue;
        }
      }
      lex.by_form_[fold_case(*form)].push_back(lex.entries_.size());
      lex.entries_.push_back(LexicalEntry{*form, tag, std::move(fs)});
    } else if (*head == "freq") {
      auto form = scan.word();
      auto tag = scan.word();
      auto count = scan.word();
      if (!form || !tag || !count) {
        problems.push_back(where() + ": expected 'freq <word> <tag> <count>'");
        continue;
      }
      try {
        lex.freq_[{fold_case(*form), *tag}] = std::stol(*count);
      } catch (const std::exception&) {
        problems.push_back(where() + ": bad count '" + *count + "'");
      }
    } else {
      problems.push_back(where() + ": unknown directive '" + *head + "'");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid lexicon:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  return lex;
}

std::vector<LexicalEntry> Lexicon::lookup(std::string_view form) const {
  std::vector<LexicalEntry> out;
  auto it = by_form_.find(fold_case(form));
  if (it == by_form_.end()) return out;
  for (size_t idx : it->second) out.push_back(entries_[idx]);
  return out;
}

std::vector<LexicalEntry> Lexicon::lookup_tagged(std::string_view form,
                                                 std::string_view tag) const {
  std::vector<LexicalEntry> out;
  for (auto& e : lookup(form))
    if (e.tag == tag) out.push_back(std::move(e));
  return out;
}

long Lexicon::frequency(std::string_view form, std::string_view tag) const {
  auto it = freq_.find({fold_case(form), std::string(tag)});
  return it == freq_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// TagWordLexicon

TagWordLexicon::TagWordLexicon(const TagSet& ts, const Lexicon& lex) {
  for (const auto& tag : ts.tags()) {
    std::optional<FeatureStructure> acc;
    for (const auto& entry : lex.entries()) {
      if (entry.tag != tag.name) continue;
      acc = acc ? generalize(*acc, entry.fs) : entry.fs;
    }
    entries_.emplace(tag.name, acc ? std::move(*acc) : ts.macro(tag.name));
  }
}

const FeatureStructure& TagWordLexicon::entry(const std::string& tag) const {
  auto it = entries_.find(tag);
  if (it == entries_.end())
    throw DataError("tag-word entry for undeclared tag '" + tag + "'");
  return it->second;
}

}  // namespace ebl
