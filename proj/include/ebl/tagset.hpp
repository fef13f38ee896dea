#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/fs.hpp"

namespace ebl {

struct Tag {
  std::string name;
  std::optional<std::string> superclass;  // generalized key tag, depth exactly 1
  bool deletable = false;                 // eligible for the runtime deletion heuristic
};

/// An ordered list of tag names; the key type of the whole system.
struct TagSequence {
  std::vector<std::string> tags;

  bool empty() const { return tags.empty(); }
  size_t size() const { return tags.size(); }
  std::string to_string() const;  // space-joined

  auto operator<=>(const TagSequence&) const = default;
};

/// Tag inventory with per-tag generalization superclasses and macros
/// (tag -> feature-structure template). Immutable after load.
class TagSet {
 public:
  static TagSet load(std::string_view text);

  const Tag& tag(std::string_view name) const;
  bool has_tag(std::string_view name) const;
  const std::vector<Tag>& tags() const { return tags_; }
  const FeatureStructure& macro(std::string_view tag) const;
  const std::set<std::string>& feature_vocabulary() const { return vocabulary_; }

  /// Superclass when declared, else the tag itself.
  const std::string& generalize_tag(const std::string& tag) const;
  /// generalize_tag applied pointwise.
  TagSequence generalize_key(const TagSequence& seq) const;
  /// True iff the class (generalize_tag image) has declared subclasses.
  bool class_has_subclasses(const std::string& tag) const;
  /// Two tags are key-compatible when they generalize to the same class.
  bool compatible(const std::string& a, const std::string& b) const;
  bool deletable(const std::string& name) const { return tag(name).deletable; }

  std::string canonical_text() const;
  std::string fingerprint() const;

 private:
  const Tag& tag_checked(std::string_view name, const char* caller) const;
  std::vector<Tag> tags_;
  std::map<std::string, size_t, std::less<>> by_name_;
  std::map<std::string, FeatureStructure, std::less<>> macros_;
  std::set<std::string> vocabulary_;
  std::set<std::string> classes_with_subclasses_;
};

struct LexicalEntry {
  std::string form;  // as written in the lexicon (original case)
  std::string tag;
  FeatureStructure fs;  // macro unified with the entry's overrides
};

/// Word lexicon plus the unigram frequency table used by the tagger.
/// Lookup is case-insensitive; entry order follows the file.
class Lexicon {
 public:
  static Lexicon load(std::string_view text, const TagSet& ts);

  const std::vector<LexicalEntry>& entries() const { return entries_; }
  std::vector<LexicalEntry> lookup(std::string_view form) const;
  /// Entries for `form` restricted to `tag`, in lexicon order.
  std::vector<LexicalEntry> lookup_tagged(std::string_view form,
                                          std::string_view tag) const;
  long frequency(std::string_view form, std::string_view tag) const;

 private:
  std::vector<LexicalEntry> entries_;
  std::map<std::string, std::vector<size_t>> by_form_;  // folded form -> indices
  std::map<std::pair<std::string, std::string>, long> freq_;
};

std::string fold_case(std::string_view s);

/// The lexical entry of the pseudo-word standing for a whole tag class: the
/// anti-unification of every entry carrying the tag, or the tag's macro when
/// the lexicon has no entry for it. Computed once per tag and cached.
class TagWordLexicon {
 public:
  TagWordLexicon(const TagSet& ts, const Lexicon& lex);
  const FeatureStructure& entry(const std::string& tag) const;

 private:
  std::map<std::string, FeatureStructure> entries_;
};

}  // namespace ebl
