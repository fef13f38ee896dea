#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ebl {

// Base class for all faults raised by the library. Unification failure and
// index lookup misses are not faults; they are normal return values.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed configuration or command usage.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed data files (tagset, lexicon, grammar, corpus, index).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Syntax error in AVM text, with 1-based line/column diagnostics.
class FsSyntaxError : public DataError {
 public:
  FsSyntaxError(const std::string& msg, int line, int column)
      : DataError(msg + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// FNV-1a, used for tagset/retention fingerprints in index files.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace ebl
