#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genparse/action.hpp"

namespace genparse {

struct Tree;

// Bidirectional string <-> dense id map. Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> labels);

  std::int32_t size() const { return static_cast<std::int32_t>(labels_.size()); }
  const std::string& label(std::int32_t id) const { return labels_.at(static_cast<std::size_t>(id)); }
  std::optional<std::int32_t> find(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct WordToken {
  std::int32_t id = 0;
  std::string surface;
};

using Sentence = std::vector<WordToken>;

inline constexpr std::string_view kUnknownWord = "<unk>";
inline constexpr std::int32_t kUnknownWordId = 0;

// Closed nonterminal and word vocabularies. The word vocabulary always holds
// the unknown-word token at id 0.
class Vocabularies {
 public:
  Vocabularies() = default;
  Vocabularies(Vocabulary nonterminals, Vocabulary words);

  const Vocabulary& nonterminals() const { return nonterminals_; }
  const Vocabulary& words() const { return words_; }
  ActionSpace action_space() const { return {nonterminals_.size(), words_.size()}; }

  // Unknown words map to kUnknownWordId.
  std::int32_t word_id(std::string_view surface) const;
  // Throws DataError for a label outside the vocabulary.
  std::int32_t nonterminal_id(std::string_view label) const;

  Sentence encode_sentence(const std::vector<std::string>& words) const;

  friend bool operator==(const Vocabularies&, const Vocabularies&) = default;

 private:
  Vocabulary nonterminals_;
  Vocabulary words_;
};

// Every internal label becomes a nonterminal; words with count >= min_count
// become word types. Ids are assigned by descending frequency, ties broken
// lexicographically. Throws DataError on empty input.
Vocabularies build_vocab(const std::vector<Tree>& trees, int min_count);

// "nonterminals N" then N labels, "words W" then W words, one per line.
void save_vocabularies(std::ostream& out, const Vocabularies& vocab);
Vocabularies load_vocabularies(std::istream& in);

}  // namespace genparse
