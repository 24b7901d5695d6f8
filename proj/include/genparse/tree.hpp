#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genparse/action.hpp"
#include "genparse/vocab.hpp"

namespace genparse {

// Rooted ordered tree. Internal nodes carry a nonterminal label and at least
// one child; leaves carry the surface word and have no children.
struct Tree {
  std::string label;
  std::vector<Tree> children;

  static Tree leaf(std::string word) { return Tree{std::move(word), {}}; }
  static Tree node(std::string label, std::vector<Tree> children) {
    return Tree{std::move(label), std::move(children)};
  }

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const Tree&, const Tree&) = default;
};

enum class PosHandling {
  // Strip preterminals when, in every tree read, each leaf sits alone under
  // a non-root parent, i.e. the input looks POS-tagged.
  Auto,
  Strip,
  Keep,
};

struct ReadOptions {
  PosHandling pos = PosHandling::Auto;
  // Delete -NONE- elements and the constituents they leave empty.
  bool drop_empty_elements = true;
  // NP-SBJ-1 -> NP, PP=2 -> PP. Labels starting with '-' are left alone.
  bool strip_function_tags = true;
};

// Reads every top-level bracketed expression in `text`. A PTB-style outer
// wrapper with an empty label, "( (S ...) )", is removed.
// Throws ParseError on unbalanced input and DataError on zero-child nodes.
std::vector<Tree> parse_bracketed(std::string_view text, const ReadOptions& options = {});

// Canonical single-line form, single spaces, no outer wrapper.
std::string serialize_bracketed(const Tree& tree);

std::vector<std::string> tree_words(const Tree& tree);
int count_internal(const Tree& tree);
int count_leaves(const Tree& tree);

// Depth-first left-to-right linearization. Words outside the vocabulary
// become Shift(<unk>); unknown nonterminals raise DataError.
std::vector<Action> tree_to_actions(const Tree& tree, const Vocabularies& vocab);

// Inverse of tree_to_actions. `surfaces`, when non-empty, supplies the leaf
// words (one per Shift); otherwise leaves take the vocabulary spelling.
// Throws ValidityError naming the first offending action.
Tree actions_to_tree(std::span<const Action> actions, const Vocabularies& vocab,
                     std::span<const std::string> surfaces = {});

// tree_to_actions over a whole treebank.
std::vector<std::vector<Action>> linearize_corpus(const std::vector<Tree>& trees,
                                                  const Vocabularies& vocab);

// Right-branching tree (X w1 (X w2 (X ... wn))) used when search fails.
Tree right_branching_tree(const std::string& label, const std::vector<std::string>& words);

}  // namespace genparse
