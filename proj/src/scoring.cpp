#include "genparse/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "genparse/errors.hpp"
#include "genparse/text_format.hpp"

namespace genparse {

double sequence_log_prob(const ActionScorer& scorer, std::span<const Action> actions) {
  ActionHistory history;
  double total = 0.0;
  double step = 0.0;
  for (const Action a : actions) {
    scorer.score(history, std::span<const Action>(&a, 1), std::span<double>(&step, 1));
    total += step;
    history = history.push(a);
  }
  return total;
}

// ---------------------------------------------------------------------------
// CountScorer

std::size_t CountScorer::ContextHash::operator()(const Context& c) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto v : c) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
    h *= 0x100000001b3ULL;
  }
  return h;
}

CountScorer::CountScorer(Vocabularies vocab, int order, double alpha)
    : vocab_(std::move(vocab)), space_(vocab_.action_space()), order_(order), alpha_(alpha) {
  if (order < 1) throw std::invalid_argument("count scorer order must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("count scorer smoothing alpha must be finite and > 0");
  }
}

CountScorer::Context CountScorer::context_of(std::span<const Action> previous) const {
  Context ctx(static_cast<std::size_t>(order_), begin_symbol());
  const std::size_t take = std::min(previous.size(), ctx.size());
  for (std::size_t i = 0; i < take; ++i) {
    ctx[ctx.size() - take + i] = space_.index(previous[previous.size() - take + i]);
  }
  return ctx;
}

void CountScorer::observe(std::span<const Action> sequence) {
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    if (!space_.contains(sequence[t])) throw DataError("action outside the scorer's vocabulary");
    auto& entry = counts_[context_of(sequence.subspan(0, t))];
    ++entry.total;
    ++entry.next[space_.index(sequence[t])];
  }
}

const CountScorer::ContextCounts* CountScorer::find(const Context& ctx) const {
  auto it = counts_.find(ctx);
  return it == counts_.end() ? nullptr : &it->second;
}

double CountScorer::log_prob_in(const ContextCounts* counts, std::int32_t action_index) const {
  double numerator = alpha_;
  double denominator = alpha_ * space_.size();
  if (counts) {
    auto it = counts->next.find(action_index);
    if (it != counts->next.end()) numerator += static_cast<double>(it->second);
    denominator += static_cast<double>(counts->total);
  }
  return std::log(numerator) - std::log(denominator);
}

double CountScorer::log_prob(std::span<const Action> context, Action a) const {
  return log_prob_in(find(context_of(context)), space_.index(a));
}

void CountScorer::score(const ActionHistory& history, std::span<const Action> candidates,
                        std::span<double> log_probs) const {
  const auto previous = history.suffix(static_cast<std::size_t>(order_));
  const ContextCounts* counts = find(context_of(previous));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    log_probs[i] = log_prob_in(counts, space_.index(candidates[i]));
  }
}

void CountScorer::save(std::ostream& out) const {
  out << "genparse-count-scorer 1\n";
  out << "order " << order_ << '\n';
  out << "alpha " << text::format_double(alpha_) << '\n';
  save_vocabularies(out, vocab_);

  std::vector<const std::pair<const Context, ContextCounts>*> entries;
  entries.reserve(counts_.size());
  for (const auto& e : counts_) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });

  out << "contexts " << entries.size() << '\n';
  for (const auto* e : entries) {
    for (std::size_t i = 0; i < e->first.size(); ++i) out << (i ? " " : "") << e->first[i];
    std::vector<std::pair<std::int32_t, std::int64_t>> next(e->second.next.begin(),
                                                            e->second.next.end());
    std::sort(next.begin(), next.end());
    out << '\t' << e->second.total << '\t';
    for (std::size_t i = 0; i < next.size(); ++i) {
      out << (i ? " " : "") << next[i].first << ':' << next[i].second;
    }
    out << '\n';
  }
}

CountScorer CountScorer::load(std::istream& in) {
  const std::string magic = text::read_line(in, "header");
  if (magic != "genparse-count-scorer 1") {
    throw DataError("not a count scorer file (header '" + magic + "')");
  }
  const int order = text::parse_int<int>(text::read_field(in, "order"));
  const double alpha = text::parse_double(text::read_field(in, "alpha"));
  CountScorer scorer(load_vocabularies(in), order, alpha);
  const std::int32_t symbols = scorer.space_.size() + 1;

  const auto n = text::parse_int<std::int64_t>(text::read_field(in, "contexts"));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::string line = text::read_line(in, "context record");
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw DataError("malformed context record '" + line + "'");

    Context ctx;
    std::istringstream ctx_in(line.substr(0, tab1));
    for (std::string tok; ctx_in >> tok;) ctx.push_back(text::parse_int<std::int32_t>(tok));
    if (ctx.size() != static_cast<std::size_t>(order)) throw DataError("context length != order");
    for (auto v : ctx) {
      if (v < 0 || v >= symbols) throw DataError("context symbol out of range");
    }

    ContextCounts counts;
    counts.total = text::parse_int<std::int64_t>(line.substr(tab1 + 1, tab2 - tab1 - 1));
    std::istringstream next_in(line.substr(tab2 + 1));
    std::int64_t sum = 0;
    for (std::string tok; next_in >> tok;) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw DataError("malformed count '" + tok + "'");
      const auto a = text::parse_int<std::int32_t>(std::string_view(tok).substr(0, colon));
      const auto c = text::parse_int<std::int64_t>(std::string_view(tok).substr(colon + 1));
      if (a < 0 || a >= scorer.space_.size()) throw DataError("action index out of range");
      counts.next[a] = c;
      sum += c;
    }
    if (sum != counts.total) throw DataError("context total does not match its counts");
    scorer.counts_.emplace(std::move(ctx), std::move(counts));
  }
  return scorer;
}

bool operator==(const CountScorer& a, const CountScorer& b) {
  if (!(a.vocab_ == b.vocab_) || a.order_ != b.order_ || a.alpha_ != b.alpha_ ||
      a.counts_.size() != b.counts_.size()) {
    return false;
  }
  for (const auto& [ctx, counts] : a.counts_) {
    const auto* other = b.find(ctx);
    if (!other || other->total != counts.total || other->next != counts.next) return false;
  }
  return true;
}

CountScorer train_count_scorer(const Vocabularies& vocab,
                               const std::vector<std::vector<Action>>& corpus, int order,
                               double alpha) {
  if (corpus.empty()) throw DataError("cannot train a scorer on an empty corpus");
  CountScorer scorer(vocab, order, alpha);
  for (const auto& seq : corpus) scorer.observe(seq);
  return scorer;
}

double perplexity(const ActionScorer& scorer, const std::vector<std::vector<Action>>& corpus) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& seq : corpus) {
    total += sequence_log_prob(scorer, seq);
    n += seq.size();
  }
  if (n == 0) throw DataError("perplexity of an empty corpus");
  return std::exp(-total / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// TableScorer

namespace {

void check_normalized(const TableScorer::Distribution& d) {
  double sum = 0.0;
  for (const auto& [a, p] : d) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability in table distribution");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("table distribution sums to " + text::format_double(sum));
  }
}

}  // namespace

TableScorer::TableScorer(Vocabularies vocab, Distribution default_distribution)
    : vocab_(std::move(vocab)), default_(std::move(default_distribution)) {
  check_normalized(default_);
}

void TableScorer::set(std::vector<Action> history, Distribution distribution) {
  check_normalized(distribution);
  table_[std::move(history)] = std::move(distribution);
}

const TableScorer::Distribution& TableScorer::lookup(const std::vector<Action>& history) const {
  auto it = table_.find(history);
  return it == table_.end() ? default_ : it->second;
}

void TableScorer::score(const ActionHistory& history, std::span<const Action> candidates,
                        std::span<double> log_probs) const {
  const Distribution& d = lookup(history.to_vector());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto it = d.find(candidates[i]);
    log_probs[i] = it == d.end() ? -std::numeric_limits<double>::infinity() : std::log(it->second);
  }
}

TableScorer::Distribution TableScorer::uniform(const ActionSpace& space) {
  Distribution d;
  const double p = 1.0 / space.size();
  for (std::int32_t i = 0; i < space.size(); ++i) d[space.action(i)] = p;
  return d;
}

}  // namespace genparse
