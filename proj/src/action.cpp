#include "genparse/action.hpp"

#include "genparse/errors.hpp"
#include "genparse/vocab.hpp"

namespace genparse {

std::string format_action(Action a, const Vocabularies& vocab) {
  switch (a.kind) {
    case ActionKind::Open: return "(" + vocab.nonterminals().label(a.id);
    case ActionKind::Close: return vocab.nonterminals().label(a.id) + ")";
    case ActionKind::Shift: return vocab.words().label(a.id);
  }
  return {};
}

std::string format_actions(const std::vector<Action>& actions, const Vocabularies& vocab,
                           const std::vector<std::string>& surfaces) {
  std::string out;
  std::size_t word = 0;
  for (const auto& a : actions) {
    if (!out.empty()) out += ' ';
    if (a.is_shift() && word < surfaces.size()) {
      out += surfaces[word++];
    } else {
      out += format_action(a, vocab);
    }
  }
  return out;
}

std::vector<Action> parse_actions(std::string_view line, const Vocabularies& vocab) {
  std::vector<Action> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    std::string_view tok = line.substr(pos, end - pos);
    pos = end;
    if (tok.size() > 1 && tok.front() == '(') {
      out.push_back(Action::open(vocab.nonterminal_id(tok.substr(1))));
    } else if (tok.size() > 1 && tok.back() == ')') {
      out.push_back(Action::close(vocab.nonterminal_id(tok.substr(0, tok.size() - 1))));
    } else {
      out.push_back(Action::shift(vocab.word_id(tok)));
    }
  }
  return out;
}

}  // namespace genparse
