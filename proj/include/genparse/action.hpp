#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace genparse {

class Vocabularies;

enum class ActionKind : std::uint8_t { Open = 0, Close = 1, Shift = 2 };

// One shift-reduce action. `id` is a nonterminal id for Open/Close and a word
// id for Shift.
struct Action {
  ActionKind kind = ActionKind::Open;
  std::int32_t id = 0;

  static constexpr Action open(std::int32_t nt) { return {ActionKind::Open, nt}; }
  static constexpr Action close(std::int32_t nt) { return {ActionKind::Close, nt}; }
  static constexpr Action shift(std::int32_t word) { return {ActionKind::Shift, word}; }

  bool is_open() const { return kind == ActionKind::Open; }
  bool is_close() const { return kind == ActionKind::Close; }
  bool is_shift() const { return kind == ActionKind::Shift; }
  bool is_structural() const { return kind != ActionKind::Shift; }

  friend auto operator<=>(const Action&, const Action&) = default;
};

struct ActionHash {
  std::size_t operator()(const Action& a) const noexcept {
    return (static_cast<std::size_t>(a.id) << 2) ^ static_cast<std::size_t>(a.kind);
  }
};

// Dense indexing of the full action vocabulary:
//   [0, N)        Open(X)
//   [N, 2N)       Close(X)
//   [2N, 2N + W)  Shift(w)
class ActionSpace {
 public:
  ActionSpace() = default;
  ActionSpace(std::int32_t num_nonterminals, std::int32_t num_words)
      : num_nonterminals_(num_nonterminals), num_words_(num_words) {}

  std::int32_t num_nonterminals() const { return num_nonterminals_; }
  std::int32_t num_words() const { return num_words_; }
  std::int32_t size() const { return 2 * num_nonterminals_ + num_words_; }

  std::int32_t index(Action a) const {
    switch (a.kind) {
      case ActionKind::Open: return a.id;
      case ActionKind::Close: return num_nonterminals_ + a.id;
      case ActionKind::Shift: return 2 * num_nonterminals_ + a.id;
    }
    return -1;
  }

  Action action(std::int32_t index) const {
    if (index < num_nonterminals_) return Action::open(index);
    if (index < 2 * num_nonterminals_) return Action::close(index - num_nonterminals_);
    return Action::shift(index - 2 * num_nonterminals_);
  }

  bool contains(Action a) const {
    const std::int32_t bound = a.is_shift() ? num_words_ : num_nonterminals_;
    return a.id >= 0 && a.id < bound;
  }

  friend bool operator==(const ActionSpace&, const ActionSpace&) = default;

 private:
  std::int32_t num_nonterminals_ = 0;
  std::int32_t num_words_ = 0;
};

// Text rendering: Open(X) -> "(X", Close(X) -> "X)", Shift(w) -> "w".
std::string format_action(Action a, const Vocabularies& vocab);

// Renders a whole sequence on one line, tokens separated by single spaces.
// `surfaces`, when non-empty, supplies the original word for each Shift in order.
std::string format_actions(const std::vector<Action>& actions, const Vocabularies& vocab,
                           const std::vector<std::string>& surfaces = {});

// Inverse of format_actions. Unknown words map to the unknown-word id; unknown
// nonterminals raise DataError.
std::vector<Action> parse_actions(std::string_view line, const Vocabularies& vocab);

}  // namespace genparse
