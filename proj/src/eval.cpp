#include "genparse/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "genparse/errors.hpp"

namespace genparse {

namespace {

int collect(const Tree& t, int start, BracketSet& out) {
  if (t.is_leaf()) return start + 1;
  int end = start;
  for (const auto& c : t.children) end = collect(c, end, out);
  out.push_back({t.label, start, end});
  return end;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

BracketSet extract_brackets(const Tree& tree) {
  BracketSet out;
  collect(tree, 0, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t matched_brackets(const BracketSet& a, const BracketSet& b) {
  std::size_t matched = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++matched;
      ++i;
      ++j;
    }
  }
  return matched;
}

CorpusScore score_corpus(const std::vector<Tree>& pred, const std::vector<Tree>& gold) {
  if (pred.size() != gold.size()) {
    throw DataError("prediction has " + std::to_string(pred.size()) + " trees but gold has " +
                    std::to_string(gold.size()));
  }
  CorpusScore score;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    SentenceScore s;
    s.index = i;
    const int pred_words = count_leaves(pred[i]);
    const int gold_words = count_leaves(gold[i]);
    if (pred_words != gold_words) {
      s.skipped = true;
      s.error = "word count mismatch: " + std::to_string(pred_words) + " vs " +
                std::to_string(gold_words);
      ++score.skipped;
      score.sentences.push_back(std::move(s));
      continue;
    }
    const BracketSet p = extract_brackets(pred[i]);
    const BracketSet g = extract_brackets(gold[i]);
    s.pred_brackets = p.size();
    s.gold_brackets = g.size();
    s.matched = matched_brackets(p, g);
    score.pred_brackets += s.pred_brackets;
    score.gold_brackets += s.gold_brackets;
    score.matched += s.matched;
    score.sentences.push_back(std::move(s));
  }
  score.recall = ratio(score.matched, score.gold_brackets);
  score.precision = ratio(score.matched, score.pred_brackets);
  const double sum = score.recall + score.precision;
  score.f1 = sum > 0.0 ? 2.0 * score.recall * score.precision / sum : 0.0;
  return score;
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_report(std::ostream& out, const CorpusScore& score) {
  out << "LR LP F1\n"
      << format_percent(score.recall) << ' ' << format_percent(score.precision) << ' '
      << format_percent(score.f1) << '\n';
  if (score.skipped > 0) out << "skipped " << score.skipped << '\n';
}

void write_sentence_scores(std::ostream& out, const CorpusScore& score) {
  out << "sentence\tgold\tpred\tmatched\tskipped\n";
  for (const auto& s : score.sentences) {
    out << s.index << '\t' << s.gold_brackets << '\t' << s.pred_brackets << '\t' << s.matched
        << '\t' << (s.skipped ? 1 : 0) << '\n';
  }
}

}  // namespace genparse
