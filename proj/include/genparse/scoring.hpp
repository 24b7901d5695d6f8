#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "genparse/action.hpp"
#include "genparse/history.hpp"
#include "genparse/vocab.hpp"

namespace genparse {

// One scoring call: log P(candidate | history) for each candidate, written to
// `log_probs` (same length as `candidates`).
struct ScoringRequest {
  const ActionHistory* history = nullptr;
  std::span<const Action> candidates;
  std::span<double> log_probs;
};

// Generative action model P(a_t | a_1..a_{t-1}). Implementations must be
// normalized over the full action space and must be safe to call
// concurrently once constructed.
class ActionScorer {
 public:
  virtual ~ActionScorer() = default;

  virtual const Vocabularies& vocabularies() const = 0;

  virtual void score(const ActionHistory& history, std::span<const Action> candidates,
                     std::span<double> log_probs) const = 0;

  // Scores a whole successor pool. Neural scorers override this to batch.
  virtual void score_batch(std::span<const ScoringRequest> requests) const {
    for (const auto& r : requests) score(*r.history, r.candidates, r.log_probs);
  }

  ActionSpace action_space() const { return vocabularies().action_space(); }
};

// Sum of per-step log probabilities of a complete sequence.
double sequence_log_prob(const ActionScorer& scorer, std::span<const Action> actions);

// Additively smoothed order-m action n-gram model:
//   P(a | ctx) = (count(ctx, a) + alpha) / (count(ctx) + alpha * |actions|)
// where ctx is the previous m actions, padded with a begin symbol.
class CountScorer final : public ActionScorer {
 public:
  CountScorer(Vocabularies vocab, int order, double alpha);

  void observe(std::span<const Action> sequence);

  const Vocabularies& vocabularies() const override { return vocab_; }
  void score(const ActionHistory& history, std::span<const Action> candidates,
             std::span<double> log_probs) const override;

  double log_prob(std::span<const Action> context, Action a) const;

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  std::int32_t begin_symbol() const { return space_.size(); }

  // Versioned line-oriented text format. Reload is bit-exact.
  void save(std::ostream& out) const;
  static CountScorer load(std::istream& in);

  friend bool operator==(const CountScorer&, const CountScorer&);

 private:
  using Context = std::vector<std::int32_t>;
  struct ContextHash {
    std::size_t operator()(const Context& c) const noexcept;
  };
  struct ContextCounts {
    std::int64_t total = 0;
    std::unordered_map<std::int32_t, std::int64_t> next;
  };

  Context context_of(std::span<const Action> previous) const;
  double log_prob_in(const ContextCounts* counts, std::int32_t action_index) const;
  const ContextCounts* find(const Context& ctx) const;

  Vocabularies vocab_;
  ActionSpace space_;
  int order_;
  double alpha_;
  std::unordered_map<Context, ContextCounts, ContextHash> counts_;
};

// Trains on linearized gold sequences. Throws DataError on an empty corpus
// and std::invalid_argument for order < 1 or alpha <= 0.
CountScorer train_count_scorer(const Vocabularies& vocab,
                               const std::vector<std::vector<Action>>& corpus, int order,
                               double alpha);

// exp of the mean negative log probability per action over the corpus.
double perplexity(const ActionScorer& scorer, const std::vector<std::vector<Action>>& corpus);

// Explicit per-history distributions with a default for unlisted histories.
// Actions missing from a distribution have probability zero.
class TableScorer final : public ActionScorer {
 public:
  using Distribution = std::map<Action, double>;

  TableScorer(Vocabularies vocab, Distribution default_distribution);

  // Throws std::invalid_argument if the distribution does not sum to 1 +- 1e-9.
  void set(std::vector<Action> history, Distribution distribution);

  const Vocabularies& vocabularies() const override { return vocab_; }
  void score(const ActionHistory& history, std::span<const Action> candidates,
             std::span<double> log_probs) const override;

  static Distribution uniform(const ActionSpace& space);

 private:
  const Distribution& lookup(const std::vector<Action>& history) const;

  Vocabularies vocab_;
  Distribution default_;
  std::map<std::vector<Action>, Distribution> table_;
};

}  // namespace genparse
