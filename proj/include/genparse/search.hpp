#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genparse/action.hpp"
#include "genparse/history.hpp"
#include "genparse/scoring.hpp"
#include "genparse/tree.hpp"
#include "genparse/vocab.hpp"

namespace genparse {

struct OpenFrame {
  std::int32_t nonterminal = 0;
  bool has_child = false;

  friend bool operator==(const OpenFrame&, const OpenFrame&) = default;
};

// A partial parse. The bucket coordinates are (word_index, struct_index):
// the number of Shifts taken and the number of actions since the last Shift.
struct Hypothesis {
  ActionHistory actions;
  double log_prob = 0.0;
  int word_index = 0;
  int struct_index = 0;
  std::vector<OpenFrame> open_stack;
  bool complete = false;
  std::uint64_t insertion_seq = 0;
  // Instrumentation only: the actions so far are a prefix of the gold sequence.
  bool on_gold = false;

  std::optional<Action> last_action() const {
    if (actions.empty()) return std::nullopt;
    return actions.back();
  }
};

Hypothesis advance(const Hypothesis& h, Action a, double step_log_prob, std::uint64_t seq);

struct SearchLimits {
  int max_open = 100;
  int max_struct_per_word = 40;
};

// Successors that keep the prefix extendable to a tree over `sentence`, in the
// order Open(0..N-1), Close, Shift.
std::vector<Action> valid_successors(const Hypothesis& h, const Sentence& sentence,
                                     const SearchLimits& limits, std::int32_t num_nonterminals);

// One would-be Open successor in a pooled successor set.
struct OpenCandidate {
  const Hypothesis* hypothesis = nullptr;
  Action action;
};

struct PruneDecision {
  std::vector<bool> keep;  // parallel to the candidate list
  bool floor_override = false;  // kept one item although floor(p * N) == 0
};

// Filters pooled Open successors before the main scorer sees them. Close and
// Shift successors never reach the pruner.
class OpenPruner {
 public:
  virtual ~OpenPruner() = default;
  virtual PruneDecision select(std::span<const OpenCandidate> candidates,
                               const Sentence& sentence) const = 0;
};

struct SearchConfig {
  int k = 2000;
  int k_w = 200;
  int k_s = 20;
  SearchLimits limits;
  // Truncate bucket (i+1, 0) to k_w before position i+1 starts; otherwise
  // k_w is only the stopping signal.
  bool truncate_word_beam = true;
  const OpenPruner* pruner = nullptr;

  // Throws std::invalid_argument unless 1 <= k_w <= k, 0 <= k_s <= k_w and
  // both caps are >= 1.
  void validate() const;
};

enum class SearchStatus { Ok, NoCompleteHypothesis };

// Where the gold prefix dropped out of the beam, when a gold sequence is traced.
struct GoldLoss {
  std::size_t step = 0;  // length of the last surviving gold prefix
  Action next_gold;      // the gold action that failed to survive
  int word_index = 0;
  int struct_index = 0;
};

struct SearchStats {
  std::int64_t states_expanded = 0;  // successors scored by the main scorer
  std::int64_t buckets_visited = 0;  // pools formed (steps, for action-level)
  std::int64_t fast_tracked = 0;
  std::int64_t prune_floor_overrides = 0;
  std::size_t completed = 0;
  int max_depth = 0;  // deepest open stack among surviving hypotheses
  std::optional<GoldLoss> gold_lost;
};

struct SearchResult {
  SearchStatus status = SearchStatus::NoCompleteHypothesis;
  std::vector<Hypothesis> hypotheses;  // complete, best first
  SearchStats stats;

  bool ok() const { return status == SearchStatus::Ok; }
};

// Conventional beam search over action-history length with beam size `k`.
// `gold`, when given, is traced and the point where it leaves the beam is
// recorded in stats.gold_lost.
SearchResult action_level_search(const Sentence& sentence, const ActionScorer& scorer, int k,
                                 const SearchLimits& limits = {},
                                 const OpenPruner* pruner = nullptr,
                                 std::span<const Action> gold = {});

// Word-synchronous bucketed search with word beam k_w and fast-track k_s.
SearchResult word_level_search(const Sentence& sentence, const ActionScorer& scorer,
                               const SearchConfig& config, std::span<const Action> gold = {});

enum class SearchVariant { Action, Word };

std::string to_string(SearchVariant v);

struct DecodeOptions {
  SearchVariant variant = SearchVariant::Word;
  SearchConfig config;
  // Root label of the fallback tree; empty means the scorer's most probable
  // first Open.
  std::string fallback_label;
  int jobs = 1;
};

struct SentenceDiagnostics {
  std::size_t sentence_id = 0;
  std::size_t length = 0;
  SearchVariant variant = SearchVariant::Word;
  std::int64_t states_expanded = 0;
  std::int64_t buckets_visited = 0;
  std::size_t completed = 0;
  bool failed = false;
  double log_prob = 0.0;  // of the returned parse; 0 when failed
  std::string error;
};

struct DecodeOutput {
  std::vector<Tree> trees;
  std::vector<SentenceDiagnostics> diagnostics;
};

// Decodes each sentence and converts its best hypothesis to a tree. Failed
// sentences get a right-branching fallback tree and failed = true. Output
// order matches input order for any number of jobs.
DecodeOutput decode_corpus(const std::vector<std::vector<std::string>>& sentences,
                           const ActionScorer& scorer, const DecodeOptions& options);

void write_diagnostics(std::ostream& out, const std::vector<SentenceDiagnostics>& diagnostics);

}  // namespace genparse
