#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genparse {

// Malformed or inconsistent input data (treebanks, model files, configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unbalanced or otherwise unreadable bracketed text. `offset` is the byte
// offset into the input where the problem was detected.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DataError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// An action sequence that does not describe a valid tree. `index` is the
// position of the first offending action (or the sequence length when the
// problem is a missing suffix).
class ValidityError : public DataError {
 public:
  ValidityError(const std::string& what, std::size_t index)
      : DataError(what + " (action " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace genparse
