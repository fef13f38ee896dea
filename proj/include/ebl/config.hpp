#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/common.hpp"

namespace ebl {

/// Flat key=value configuration. Unknown keys are kept and ignored.
/// Recognized keys:
///   segmenter.markers           comma-separated discourse markers
///   tagger.default_tag          tag for unknown words (default "noun")
///   runtime.max_deletions       deletion-fallback bound (default 2)
///   runtime.time_budget_ms      per-segment fallback budget (default 50)
///   trainer.cap_base            per-key parse cap base (default 2)
///   trainer.cap_per_generalizable  cap increment per generalizable tag (default 2)
class Config {
 public:
  Config() = default;
  static Config parse(std::string_view text);
  static Config load_file(const std::string& path);

  std::string get(const std::string& key, const std::string& fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) != 0; }

 private:
  std::map<std::string, std::string> values_;
};

/// Reads a whole file; throws DataError naming the path when unreadable.
std::string read_file(const std::string& path);

}  // namespace ebl
