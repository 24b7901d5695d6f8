#include "genparse/tree.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "genparse/errors.hpp"

namespace genparse {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::optional<Tree> next() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    if (text_[pos_] != '(') throw ParseError("expected '(' to start a tree", pos_);
    return read_node();
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  // Iterative so that deep trees cannot exhaust the call stack.
  Tree read_node() {
    struct Frame {
      Tree node;
      std::size_t offset;
    };
    std::vector<Frame> stack;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        throw ParseError("unbalanced parentheses: unexpected end of input", pos_);
      }
      const char c = text_[pos_];
      if (c == '(') {
        const std::size_t offset = pos_++;
        skip_space();
        std::string label;
        if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') label = read_atom();
        stack.push_back({Tree{std::move(label), {}}, offset});
      } else if (c == ')') {
        if (stack.empty()) throw ParseError("unbalanced parentheses: unexpected ')'", pos_);
        ++pos_;
        Frame done = std::move(stack.back());
        stack.pop_back();
        if (done.node.children.empty()) {
          throw DataError("constituent '" + done.node.label + "' has no children at byte " +
                          std::to_string(done.offset));
        }
        if (stack.empty()) return std::move(done.node);
        stack.back().node.children.push_back(std::move(done.node));
      } else {
        if (stack.empty()) throw ParseError("word outside any constituent", pos_);
        stack.back().node.children.push_back(Tree::leaf(read_atom()));
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_preterminal(const Tree& t) { return t.children.size() == 1 && t.children[0].is_leaf(); }

bool all_leaves_under_preterminals(const Tree& t) {
  for (const auto& c : t.children) {
    if (c.is_leaf()) return false;
    if (!is_preterminal(c) && !all_leaves_under_preterminals(c)) return false;
  }
  return true;
}

void strip_preterminals(Tree& t) {
  for (auto& c : t.children) {
    if (is_preterminal(c)) {
      Tree word = std::move(c.children[0]);
      c = std::move(word);
    } else if (!c.is_leaf()) {
      strip_preterminals(c);
    }
  }
}

// Returns false when the node ends up with nothing left below it.
bool drop_empty_elements(Tree& t) {
  if (t.is_leaf()) return true;
  if (t.label == "-NONE-") return false;
  std::vector<Tree> kept;
  kept.reserve(t.children.size());
  for (auto& c : t.children) {
    if (drop_empty_elements(c)) kept.push_back(std::move(c));
  }
  t.children = std::move(kept);
  return !t.children.empty();
}

void strip_function_tags(Tree& t) {
  if (t.is_leaf()) return;
  if (!t.label.empty() && t.label.front() != '-') {
    const auto cut = t.label.find_first_of("-=");
    if (cut != std::string::npos) t.label.resize(cut);
  }
  for (auto& c : t.children) strip_function_tags(c);
}

Tree preprocess(Tree t, const ReadOptions& options) {
  while (t.label.empty()) {
    if (t.children.size() != 1 || t.children[0].is_leaf()) {
      throw DataError("unlabeled top-level bracket must wrap exactly one constituent");
    }
    Tree inner = std::move(t.children[0]);
    t = std::move(inner);
  }
  if (options.drop_empty_elements && !drop_empty_elements(t)) {
    throw DataError("tree '" + t.label + "' contains only empty elements");
  }
  if (options.strip_function_tags) strip_function_tags(t);
  return t;
}

bool looks_tagged(const Tree& t) { return !is_preterminal(t) && all_leaves_under_preterminals(t); }

void serialize_into(const Tree& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    serialize_into(c, out);
  }
  out += ')';
}

void collect_words(const Tree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) collect_words(c, out);
}

void linearize(const Tree& t, const Vocabularies& vocab, std::vector<Action>& out) {
  if (t.is_leaf()) {
    out.push_back(Action::shift(vocab.word_id(t.label)));
    return;
  }
  const std::int32_t nt = vocab.nonterminal_id(t.label);
  out.push_back(Action::open(nt));
  for (const auto& c : t.children) linearize(c, vocab, out);
  out.push_back(Action::close(nt));
}

}  // namespace

std::vector<Tree> parse_bracketed(std::string_view text, const ReadOptions& options) {
  BracketReader reader(text);
  std::vector<Tree> trees;
  while (auto t = reader.next()) trees.push_back(preprocess(std::move(*t), options));
  const bool strip = options.pos == PosHandling::Strip ||
                     (options.pos == PosHandling::Auto && !trees.empty() &&
                      std::all_of(trees.begin(), trees.end(), looks_tagged));
  if (strip) {
    for (auto& t : trees) {
      if (!is_preterminal(t)) strip_preterminals(t);
    }
  }
  return trees;
}

std::string serialize_bracketed(const Tree& tree) {
  std::string out;
  serialize_into(tree, out);
  return out;
}

std::vector<std::string> tree_words(const Tree& tree) {
  std::vector<std::string> out;
  collect_words(tree, out);
  return out;
}

int count_internal(const Tree& tree) {
  if (tree.is_leaf()) return 0;
  int n = 1;
  for (const auto& c : tree.children) n += count_internal(c);
  return n;
}

int count_leaves(const Tree& tree) {
  if (tree.is_leaf()) return 1;
  int n = 0;
  for (const auto& c : tree.children) n += count_leaves(c);
  return n;
}

std::vector<Action> tree_to_actions(const Tree& tree, const Vocabularies& vocab) {
  std::vector<Action> out;
  linearize(tree, vocab, out);
  return out;
}

std::vector<std::vector<Action>> linearize_corpus(const std::vector<Tree>& trees,
                                                  const Vocabularies& vocab) {
  std::vector<std::vector<Action>> out;
  out.reserve(trees.size());
  for (const auto& t : trees) out.push_back(tree_to_actions(t, vocab));
  return out;
}

Tree actions_to_tree(std::span<const Action> actions, const Vocabularies& vocab,
                     std::span<const std::string> surfaces) {
  const ActionSpace space = vocab.action_space();
  std::vector<Tree> stack;
  std::optional<Tree> root;
  std::size_t word = 0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const Action a = actions[t];
    if (!space.contains(a)) throw ValidityError("action id out of vocabulary range", t);
    if (root) throw ValidityError("action after the root constituent closed", t);
    switch (a.kind) {
      case ActionKind::Open:
        stack.push_back(Tree{vocab.nonterminals().label(a.id), {}});
        break;
      case ActionKind::Shift: {
        if (stack.empty()) throw ValidityError("shift outside any open constituent", t);
        std::string surface;
        if (!surfaces.empty()) {
          if (word >= surfaces.size()) throw ValidityError("more shifts than surface words", t);
          surface = surfaces[word];
        } else {
          surface = vocab.words().label(a.id);
        }
        ++word;
        stack.back().children.push_back(Tree::leaf(std::move(surface)));
        break;
      }
      case ActionKind::Close: {
        if (stack.empty()) throw ValidityError("premature close with no open constituent", t);
        if (stack.back().label != vocab.nonterminals().label(a.id)) {
          throw ValidityError("close label " + vocab.nonterminals().label(a.id) +
                                  " does not match open constituent " + stack.back().label,
                              t);
        }
        if (stack.back().children.empty()) throw ValidityError("zero-child constituent", t);
        Tree done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) {
          root = std::move(done);
        } else {
          stack.back().children.push_back(std::move(done));
        }
        break;
      }
    }
  }
  if (!stack.empty()) throw ValidityError("leftover open constituents", actions.size());
  if (!root) throw ValidityError("empty action sequence", 0);
  if (!surfaces.empty() && word != surfaces.size()) {
    throw ValidityError("fewer shifts than surface words", actions.size());
  }
  return std::move(*root);
}

Tree right_branching_tree(const std::string& label, const std::vector<std::string>& words) {
  if (words.empty()) throw DataError("cannot build a tree over an empty sentence");
  Tree node = Tree::node(label, {Tree::leaf(words.back())});
  for (std::size_t i = words.size() - 1; i-- > 0;) {
    node = Tree::node(label, {Tree::leaf(words[i]), std::move(node)});
  }
  return node;
}

}  // namespace genparse
