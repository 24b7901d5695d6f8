#include "genparse/vocab.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "genparse/errors.hpp"
#include "genparse/text_format.hpp"
#include "genparse/tree.hpp"

namespace genparse {

Vocabulary::Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(labels_[i], static_cast<std::int32_t>(i));
    if (!inserted) throw DataError("duplicate vocabulary entry '" + labels_[i] + "'");
  }
}

std::optional<std::int32_t> Vocabulary::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabularies::Vocabularies(Vocabulary nonterminals, Vocabulary words)
    : nonterminals_(std::move(nonterminals)), words_(std::move(words)) {
  if (words_.size() == 0 || words_.label(kUnknownWordId) != kUnknownWord) {
    throw DataError("word vocabulary must start with the unknown-word token");
  }
}

std::int32_t Vocabularies::word_id(std::string_view surface) const {
  return words_.find(surface).value_or(kUnknownWordId);
}

std::int32_t Vocabularies::nonterminal_id(std::string_view label) const {
  auto id = nonterminals_.find(label);
  if (!id) throw DataError("unknown nonterminal '" + std::string(label) + "'");
  return *id;
}

Sentence Vocabularies::encode_sentence(const std::vector<std::string>& words) const {
  Sentence out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back({word_id(w), w});
  return out;
}

namespace {

void count_symbols(const Tree& t, std::map<std::string, long>& labels,
                   std::map<std::string, long>& words) {
  if (t.is_leaf()) {
    ++words[t.label];
    return;
  }
  ++labels[t.label];
  for (const auto& c : t.children) count_symbols(c, labels, words);
}

std::vector<std::string> by_frequency(const std::map<std::string, long>& counts, long min_count) {
  std::vector<std::pair<std::string, long>> items;
  for (const auto& [label, n] : counts) {
    if (n >= min_count) items.emplace_back(label, n);
  }
  // std::map iteration is already lexicographic, so a stable sort on count
  // gives the lexicographic tie-break.
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [label, n] : items) out.push_back(std::move(label));
  return out;
}

}  // namespace

Vocabularies build_vocab(const std::vector<Tree>& trees, int min_count) {
  if (trees.empty()) throw DataError("cannot build a vocabulary from an empty treebank");
  std::map<std::string, long> labels;
  std::map<std::string, long> words;
  for (const auto& t : trees) count_symbols(t, labels, words);
  words.erase(std::string(kUnknownWord));

  std::vector<std::string> word_list{std::string(kUnknownWord)};
  for (auto& w : by_frequency(words, std::max(min_count, 1))) word_list.push_back(std::move(w));
  return Vocabularies(Vocabulary(by_frequency(labels, 1)), Vocabulary(std::move(word_list)));
}

namespace {

Vocabulary read_labels(std::istream& in, std::string_view key) {
  const auto n = text::parse_int<std::int32_t>(text::read_field(in, key));
  if (n < 0) throw DataError("negative vocabulary size");
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) labels.push_back(text::read_line(in, key));
  return Vocabulary(std::move(labels));
}

}  // namespace

void save_vocabularies(std::ostream& out, const Vocabularies& vocab) {
  out << "nonterminals " << vocab.nonterminals().size() << '\n';
  for (const auto& l : vocab.nonterminals().labels()) out << l << '\n';
  out << "words " << vocab.words().size() << '\n';
  for (const auto& w : vocab.words().labels()) out << w << '\n';
}

Vocabularies load_vocabularies(std::istream& in) {
  Vocabulary nts = read_labels(in, "nonterminals");
  Vocabulary words = read_labels(in, "words");
  return Vocabularies(std::move(nts), std::move(words));
}

}  // namespace genparse
