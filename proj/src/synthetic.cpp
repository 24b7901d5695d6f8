#include "genparse/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace genparse {

namespace {

const char* const kLabels[] = {"S",    "NP",     "VP",  "PP",   "SBAR",   "ADJP", "ADVP",
                               "QP",   "WHNP",   "PRN", "NX",   "SINV",   "SQ",   "FRAG",
                               "UCP",  "WHADVP", "CONJP", "PRT", "WHPP",  "LST",  "RRC",
                               "INTJ", "SBARQ",  "NAC", "WHADJP", "X"};

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

SyntheticGrammar::SyntheticGrammar(const SyntheticGrammarOptions& options) : options_(options) {
  const int n = options.num_nonterminals;
  if (n < 1 || n > static_cast<int>(std::size(kLabels))) {
    throw std::invalid_argument("synthetic grammar supports 1..26 nonterminals");
  }
  if (options.min_length < 1 || options.max_length < options.min_length) {
    throw std::invalid_argument("invalid synthetic sentence length bounds");
  }
  std::mt19937_64 rng(options.seed);
  labels_.assign(kLabels, kLabels + n);
  rules_.resize(static_cast<std::size_t>(n));

  std::vector<std::string> shared;
  for (int j = 0; j < options.shared_words; ++j) shared.push_back("c" + std::to_string(j));

  std::vector<std::vector<int>> used(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    Rule& rule = rules_[static_cast<std::size_t>(x)];
    const std::string stem = lowercase(labels_[static_cast<std::size_t>(x)]);
    for (int j = 0; j < options.private_words; ++j) rule.lexicon.push_back(stem + std::to_string(j));
    for (int j = 0; j < options.private_words / 3 && !shared.empty(); ++j) {
      rule.lexicon.push_back(shared[static_cast<std::size_t>(uniform_int(rng, 0, options.shared_words - 1))]);
    }
    std::sort(rule.lexicon.begin(), rule.lexicon.end());
    rule.lexicon.erase(std::unique(rule.lexicon.begin(), rule.lexicon.end()), rule.lexicon.end());
    // Zipf-like emission weights in a seeded random order.
    std::shuffle(rule.lexicon.begin(), rule.lexicon.end(), rng);
    for (std::size_t r = 0; r < rule.lexicon.size(); ++r) {
      rule.lexicon_weights.push_back(1.0 / static_cast<double>(r + 1));
    }

    // Each label may only embed a few child labels, so the set of Opens that
    // follow a given context stays small.
    std::vector<int> children;
    const int fanout = std::min(n, uniform_int(rng, 2, 4));
    while (static_cast<int>(children.size()) < fanout) {
      const int c = uniform_int(rng, 0, n - 1);
      if (std::find(children.begin(), children.end(), c) == children.end()) children.push_back(c);
    }

    Production lexical;
    for (int s = uniform_int(rng, 1, 2); s > 0; --s) lexical.rhs.push_back({true, 0});
    lexical.weight = 0.5 + uniform_real(rng);
    rule.productions.push_back(lexical);

    const int extra = uniform_int(rng, 2, 3);
    for (int p = 0; p < extra; ++p) {
      Production prod;
      const int len = uniform_int(rng, 2, 3);
      for (int s = 0; s < len; ++s) {
        if (uniform_real(rng) < 0.35) {
          prod.rhs.push_back({true, 0});
        } else {
          prod.rhs.push_back({false, children[static_cast<std::size_t>(uniform_int(rng, 0, fanout - 1))]});
          used[static_cast<std::size_t>(x)].push_back(prod.rhs.back().label);
        }
      }
      prod.weight = 0.2 + uniform_real(rng);
      rule.productions.push_back(prod);
    }
  }

  // Splice every label unreachable from the root into a production of a
  // reachable one, so the whole label set occurs in sampled trees.
  for (;;) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const int x = queue.back();
      queue.pop_back();
      for (const int c : used[static_cast<std::size_t>(x)]) {
        if (!seen[static_cast<std::size_t>(c)]) {
          seen[static_cast<std::size_t>(c)] = true;
          queue.push_back(c);
        }
      }
    }
    const auto missing = std::find(seen.begin(), seen.end(), false);
    if (missing == seen.end()) break;
    const int orphan = static_cast<int>(missing - seen.begin());
    std::vector<int> reachable;
    for (int x = 0; x < n; ++x) {
      if (seen[static_cast<std::size_t>(x)]) reachable.push_back(x);
    }
    const int host = reachable[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(reachable.size()) - 1))];
    Rule& rule = rules_[static_cast<std::size_t>(host)];
    Production& prod = rule.productions[static_cast<std::size_t>(
        uniform_int(rng, 1, static_cast<int>(rule.productions.size()) - 1))];
    prod.rhs[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(prod.rhs.size()) - 1))] =
        Symbol{false, orphan};
    used[static_cast<std::size_t>(host)].push_back(orphan);
  }
}

Tree SyntheticGrammar::expand(int label, int depth, std::mt19937_64& rng) const {
  const Rule& rule = rules_[static_cast<std::size_t>(label)];
  std::size_t choice = 0;
  if (depth < options_.max_depth) {
    std::vector<double> weights;
    for (const auto& p : rule.productions) weights.push_back(p.weight);
    choice = std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
  }
  std::discrete_distribution<std::size_t> word(rule.lexicon_weights.begin(),
                                               rule.lexicon_weights.end());
  std::vector<Tree> children;
  for (const auto& sym : rule.productions[choice].rhs) {
    if (sym.terminal) {
      children.push_back(Tree::leaf(rule.lexicon[word(rng)]));
    } else {
      children.push_back(expand(sym.label, depth + 1, rng));
    }
  }
  return Tree::node(labels_[static_cast<std::size_t>(label)], std::move(children));
}

Tree SyntheticGrammar::sample(std::mt19937_64& rng) const {
  for (;;) {
    Tree t = expand(0, 0, rng);
    const int len = count_leaves(t);
    if (len >= options_.min_length && len <= options_.max_length) return t;
  }
}

std::vector<Tree> SyntheticGrammar::sample_corpus(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<Tree> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

}  // namespace genparse
