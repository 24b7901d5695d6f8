#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "genparse/tree.hpp"

namespace genparse {

struct Bracket {
  std::string label;
  int start = 0;
  int end = 0;  // exclusive

  friend auto operator<=>(const Bracket&, const Bracket&) = default;
};

// Sorted multiset of labeled spans, one per internal node (root included).
using BracketSet = std::vector<Bracket>;

BracketSet extract_brackets(const Tree& tree);

// Size of the multiset intersection.
std::size_t matched_brackets(const BracketSet& a, const BracketSet& b);

struct SentenceScore {
  std::size_t index = 0;
  std::size_t gold_brackets = 0;
  std::size_t pred_brackets = 0;
  std::size_t matched = 0;
  bool skipped = false;  // word counts differ
  std::string error;
};

struct CorpusScore {
  std::size_t matched = 0;
  std::size_t gold_brackets = 0;
  std::size_t pred_brackets = 0;
  double recall = 0.0;     // percent
  double precision = 0.0;  // percent
  double f1 = 0.0;         // percent
  std::size_t skipped = 0;
  std::vector<SentenceScore> sentences;
};

// Labeled bracket recall/precision/F1 over the corpus. Throws DataError when
// the corpora differ in length.
CorpusScore score_corpus(const std::vector<Tree>& pred, const std::vector<Tree>& gold);

// Percent with two decimals, e.g. "85.71".
std::string format_percent(double v);

// "LR LP F1" header line followed by the values.
void write_report(std::ostream& out, const CorpusScore& score);
void write_sentence_scores(std::ostream& out, const CorpusScore& score);

}  // namespace genparse
