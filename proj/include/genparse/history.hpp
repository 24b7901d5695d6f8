#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "genparse/action.hpp"

namespace genparse {

// Persistent (structurally shared) action sequence. Extending a history never
// copies its prefix, so sibling hypotheses share their common past.
class ActionHistory {
 public:
  ActionHistory() = default;

  ActionHistory push(Action a) const {
    ActionHistory out;
    out.tail_ = std::make_shared<const Node>(Node{a, tail_, size() + 1});
    return out;
  }

  std::size_t size() const { return tail_ ? tail_->length : 0; }
  bool empty() const { return !tail_; }
  Action back() const { return tail_->action; }

  // The last min(n, size()) actions, oldest first.
  std::vector<Action> suffix(std::size_t n) const {
    const std::size_t len = n < size() ? n : size();
    std::vector<Action> out(len);
    const Node* node = tail_.get();
    for (std::size_t i = len; i-- > 0; node = node->parent.get()) out[i] = node->action;
    return out;
  }

  std::vector<Action> to_vector() const { return suffix(size()); }

 private:
  struct Node {
    Action action;
    std::shared_ptr<const Node> parent;
    std::size_t length;
  };
  std::shared_ptr<const Node> tail_;
};

}  // namespace genparse
