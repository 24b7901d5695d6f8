#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "genparse/tree.hpp"

namespace genparse {

struct SyntheticGrammarOptions {
  int num_nonterminals = 26;  // at most 26
  int private_words = 8;      // lexicon entries unique to each label
  int shared_words = 20;      // pool of words any label may emit
  int max_depth = 5;
  int min_length = 3;
  int max_length = 20;
  std::uint64_t seed = 7;
};

// A random probabilistic grammar over PTB-like labels without a POS layer:
// each label rewrites to a mix of words and child labels. Used to build
// desk-scale treebanks with a known generating process.
class SyntheticGrammar {
 public:
  explicit SyntheticGrammar(const SyntheticGrammarOptions& options = {});

  Tree sample(std::mt19937_64& rng) const;
  std::vector<Tree> sample_corpus(std::size_t n, std::uint64_t seed) const;

  const std::vector<std::string>& labels() const { return labels_; }

 private:
  struct Symbol {
    bool terminal = true;
    int label = 0;  // child label when !terminal
  };
  struct Production {
    std::vector<Symbol> rhs;
    double weight = 1.0;
  };
  struct Rule {
    std::vector<Production> productions;  // productions[0] is terminal-only
    std::vector<std::string> lexicon;
    std::vector<double> lexicon_weights;
  };

  Tree expand(int label, int depth, std::mt19937_64& rng) const;

  SyntheticGrammarOptions options_;
  std::vector<std::string> labels_;
  std::vector<Rule> rules_;
};

}  // namespace genparse
