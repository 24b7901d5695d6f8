#include "genparse/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "genparse/errors.hpp"
#include "genparse/text_format.hpp"

namespace genparse {

Hypothesis advance(const Hypothesis& h, Action a, double step_log_prob, std::uint64_t seq) {
  Hypothesis next;
  next.actions = h.actions.push(a);
  next.log_prob = h.log_prob + step_log_prob;
  next.word_index = h.word_index;
  next.struct_index = h.struct_index + 1;
  next.open_stack = h.open_stack;
  next.insertion_seq = seq;
  switch (a.kind) {
    case ActionKind::Open:
      next.open_stack.push_back({a.id, false});
      break;
    case ActionKind::Close:
      next.open_stack.pop_back();
      if (next.open_stack.empty()) {
        next.complete = true;
      } else {
        next.open_stack.back().has_child = true;
      }
      break;
    case ActionKind::Shift:
      ++next.word_index;
      next.struct_index = 0;
      next.open_stack.back().has_child = true;
      break;
  }
  return next;
}

std::vector<Action> valid_successors(const Hypothesis& h, const Sentence& sentence,
                                     const SearchLimits& limits, std::int32_t num_nonterminals) {
  std::vector<Action> out;
  if (h.complete) return out;
  const int n = static_cast<int>(sentence.size());
  const bool words_left = h.word_index < n;
  const int depth = static_cast<int>(h.open_stack.size());

  if (words_left && depth < limits.max_open && h.struct_index < limits.max_struct_per_word) {
    for (std::int32_t y = 0; y < num_nonterminals; ++y) out.push_back(Action::open(y));
  }
  if (depth > 0) {
    const OpenFrame& top = h.open_stack.back();
    if (top.has_child && (depth > 1 || !words_left)) out.push_back(Action::close(top.nonterminal));
    if (words_left) out.push_back(Action::shift(sentence[static_cast<std::size_t>(h.word_index)].id));
  }
  return out;
}

void SearchConfig::validate() const {
  if (k < 1) throw std::invalid_argument("beam size k must be >= 1");
  if (k_w < 1 || k_w > k) throw std::invalid_argument("word beam k_w must satisfy 1 <= k_w <= k");
  if (k_s < 0 || k_s > k_w) throw std::invalid_argument("fast-track k_s must satisfy 0 <= k_s <= k_w");
  if (limits.max_open < 1 || limits.max_struct_per_word < 1) {
    throw std::invalid_argument("structural caps must be >= 1");
  }
}

std::string to_string(SearchVariant v) { return v == SearchVariant::Action ? "action" : "word"; }

namespace {

struct Candidate {
  std::uint32_t parent = 0;
  Action action;
  double step = 0.0;
  double score = 0.0;
  std::uint64_t seq = 0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.seq < b.seq;
}

bool better_hyp(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.insertion_seq < b.insertion_seq;
}

void sort_hypotheses(std::vector<Hypothesis>& hyps) {
  std::sort(hyps.begin(), hyps.end(), better_hyp);
}

// Expands hypothesis pools into scored successor candidates and materializes
// the ones that survive selection. Owns the insertion counter.
class Expander {
 public:
  Expander(const Sentence& sentence, const ActionScorer& scorer, const SearchLimits& limits,
           const OpenPruner* pruner, std::span<const Action> gold, SearchStats& stats)
      : sentence_(sentence),
        scorer_(scorer),
        limits_(limits),
        pruner_(pruner),
        gold_(gold),
        stats_(stats),
        num_nonterminals_(scorer.vocabularies().nonterminals().size()) {}

  Hypothesis initial() const {
    Hypothesis h;
    h.on_gold = !gold_.empty();
    return h;
  }

  std::vector<Candidate> expand(const std::vector<Hypothesis>& parents) {
    std::vector<Candidate> pool;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      for (const Action a : valid_successors(parents[p], sentence_, limits_, num_nonterminals_)) {
        pool.push_back({static_cast<std::uint32_t>(p), a, 0.0, 0.0, next_seq_++});
      }
    }
    if (pruner_) prune(parents, pool);

    std::vector<Action> actions(pool.size());
    std::vector<double> scores(pool.size());
    std::vector<ScoringRequest> requests;
    for (std::size_t i = 0; i < pool.size();) {
      std::size_t j = i;
      while (j < pool.size() && pool[j].parent == pool[i].parent) {
        actions[j] = pool[j].action;
        ++j;
      }
      requests.push_back({&parents[pool[i].parent].actions,
                          std::span<const Action>(actions).subspan(i, j - i),
                          std::span<double>(scores).subspan(i, j - i)});
      i = j;
    }
    try {
      scorer_.score_batch(requests);
    } catch (const std::exception& e) {
      const auto id = parents.empty() ? 0 : parents.front().insertion_seq;
      throw std::runtime_error("scorer failed on pool starting at hypothesis " +
                               std::to_string(id) + ": " + e.what());
    }
    stats_.states_expanded += static_cast<std::int64_t>(pool.size());

    std::vector<Candidate> scored;
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      // Zero-probability successors can never be part of a finite-scoring parse.
      if (!std::isfinite(scores[i])) continue;
      Candidate c = pool[i];
      c.step = scores[i];
      c.score = parents[c.parent].log_prob + c.step;
      scored.push_back(c);
    }
    return scored;
  }

  Hypothesis materialize(const std::vector<Hypothesis>& parents, const Candidate& c) {
    const Hypothesis& parent = parents[c.parent];
    Hypothesis h = advance(parent, c.action, c.step, c.seq);
    const std::size_t len = parent.actions.size();
    h.on_gold = parent.on_gold && len < gold_.size() && gold_[len] == c.action;
    stats_.max_depth = std::max(stats_.max_depth, static_cast<int>(h.open_stack.size()));
    return h;
  }

  // Records the first point at which a gold-prefix hypothesis was discarded.
  void note_dropped(const Hypothesis& h) {
    if (!h.on_gold || stats_.gold_lost) return;
    const std::size_t step = h.actions.size();
    stats_.gold_lost = GoldLoss{step, step < gold_.size() ? gold_[step] : gold_.back(),
                                h.word_index, h.struct_index};
  }

  void note_pool_survivors(const std::vector<Hypothesis>& parents,
                           std::span<const Hypothesis* const> survivors) {
    if (gold_.empty() || stats_.gold_lost) return;
    const Hypothesis* gold_parent = nullptr;
    for (const auto& p : parents) {
      if (p.on_gold) gold_parent = &p;
    }
    if (!gold_parent) return;
    for (const auto* s : survivors) {
      if (s->on_gold) return;
    }
    note_dropped(*gold_parent);
  }

  bool tracing() const { return !gold_.empty(); }

 private:
  void prune(const std::vector<Hypothesis>& parents, std::vector<Candidate>& pool) {
    std::vector<OpenCandidate> opens;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].action.is_open()) {
        opens.push_back({&parents[pool[i].parent], pool[i].action});
        where.push_back(i);
      }
    }
    if (opens.empty()) return;
    const PruneDecision decision = pruner_->select(opens, sentence_);
    if (decision.floor_override) ++stats_.prune_floor_overrides;
    std::vector<bool> drop(pool.size(), false);
    for (std::size_t i = 0; i < opens.size(); ++i) drop[where[i]] = !decision.keep.at(i);
    std::size_t out = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!drop[i]) pool[out++] = pool[i];
    }
    pool.resize(out);
  }

  const Sentence& sentence_;
  const ActionScorer& scorer_;
  SearchLimits limits_;
  const OpenPruner* pruner_;
  std::span<const Action> gold_;
  SearchStats& stats_;
  std::int32_t num_nonterminals_;
  std::uint64_t next_seq_ = 1;
};

// Moves the top `keep` candidates (under `better`) to the front, sorted.
void select_top(std::vector<Candidate>& pool, std::size_t keep) {
  keep = std::min(keep, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(),
                    better);
  pool.resize(keep);
}

void truncate(std::vector<Hypothesis>& hyps, std::size_t keep, Expander& ex) {
  if (hyps.size() <= keep) return;
  for (std::size_t i = keep; i < hyps.size(); ++i) ex.note_dropped(hyps[i]);
  hyps.resize(keep);
}

void finish(SearchResult& result, std::vector<Hypothesis> completed) {
  sort_hypotheses(completed);
  result.stats.completed = completed.size();
  result.status = completed.empty() ? SearchStatus::NoCompleteHypothesis : SearchStatus::Ok;
  result.hypotheses = std::move(completed);
}

}  // namespace

SearchResult action_level_search(const Sentence& sentence, const ActionScorer& scorer, int k,
                                 const SearchLimits& limits, const OpenPruner* pruner,
                                 std::span<const Action> gold) {
  if (k < 1) throw std::invalid_argument("beam size k must be >= 1");
  SearchResult result;
  Expander ex(sentence, scorer, limits, pruner, gold, result.stats);

  const std::size_t n = sentence.size();
  const std::size_t step_cap =
      n + (n + 1) * static_cast<std::size_t>(limits.max_struct_per_word + limits.max_open) + 2;

  std::vector<Hypothesis> beam{ex.initial()};
  std::vector<Hypothesis> finished;
  for (std::size_t t = 0; !beam.empty() && t < step_cap; ++t) {
    ++result.stats.buckets_visited;
    auto pool = ex.expand(beam);
    select_top(pool, static_cast<std::size_t>(k));

    std::vector<Hypothesis> next;
    std::vector<const Hypothesis*> survivors;
    for (const auto& c : pool) {
      Hypothesis h = ex.materialize(beam, c);
      (h.complete ? finished : next).push_back(std::move(h));
    }
    if (ex.tracing()) {
      for (const auto& h : next) survivors.push_back(&h);
      for (const auto& h : finished) survivors.push_back(&h);
      ex.note_pool_survivors(beam, survivors);
    }
    beam = std::move(next);
  }
  finish(result, std::move(finished));
  return result;
}

SearchResult word_level_search(const Sentence& sentence, const ActionScorer& scorer,
                               const SearchConfig& config, std::span<const Action> gold) {
  config.validate();
  SearchResult result;
  Expander ex(sentence, scorer, config.limits, config.pruner, gold, result.stats);

  const int n = static_cast<int>(sentence.size());
  const auto k = static_cast<std::size_t>(config.k);
  const auto k_w = static_cast<std::size_t>(config.k_w);
  const auto k_s = static_cast<std::size_t>(config.k_s);

  std::vector<Hypothesis> current{ex.initial()};
  std::vector<Hypothesis> completed;
  for (int i = 0; i <= n && !current.empty(); ++i) {
    const bool last = i == n;
    std::vector<Hypothesis> next_word;
    std::vector<Hypothesis> bucket = std::move(current);
    while (!bucket.empty()) {
      ++result.stats.buckets_visited;
      auto pool = ex.expand(bucket);

      // Fast-track: the best k_s Shift successors skip the top-k filter.
      std::vector<Candidate> fast;
      if (k_s > 0 && !last) {
        std::vector<Candidate> rest;
        for (const auto& c : pool) (c.action.is_shift() ? fast : rest).push_back(c);
        if (fast.size() > k_s) {
          std::partial_sort(fast.begin(), fast.begin() + static_cast<std::ptrdiff_t>(k_s),
                            fast.end(), better);
          rest.insert(rest.end(), fast.begin() + static_cast<std::ptrdiff_t>(k_s), fast.end());
          fast.resize(k_s);
        }
        pool = std::move(rest);
      }
      result.stats.fast_tracked += static_cast<std::int64_t>(fast.size());
      select_top(pool, k);

      std::vector<Hypothesis> next_bucket;
      const std::size_t word_before = next_word.size();
      const std::size_t completed_before = completed.size();
      for (const auto& c : fast) next_word.push_back(ex.materialize(bucket, c));
      for (const auto& c : pool) {
        Hypothesis h = ex.materialize(bucket, c);
        if (c.action.is_shift()) {
          next_word.push_back(std::move(h));
        } else if (h.complete) {
          completed.push_back(std::move(h));
        } else {
          next_bucket.push_back(std::move(h));
        }
      }
      if (ex.tracing()) {
        std::vector<const Hypothesis*> survivors;
        for (std::size_t s = word_before; s < next_word.size(); ++s) survivors.push_back(&next_word[s]);
        for (std::size_t s = completed_before; s < completed.size(); ++s) survivors.push_back(&completed[s]);
        for (const auto& h : next_bucket) survivors.push_back(&h);
        ex.note_pool_survivors(bucket, survivors);
      }
      bucket = std::move(next_bucket);
      if ((last ? completed.size() : next_word.size()) >= k_w) break;
    }
    for (const auto& h : bucket) ex.note_dropped(h);

    sort_hypotheses(completed);
    truncate(completed, k_w, ex);
    if (!last) {
      sort_hypotheses(next_word);
      if (config.truncate_word_beam) truncate(next_word, k_w, ex);
    }
    current = std::move(next_word);
  }
  finish(result, std::move(completed));
  return result;
}

namespace {

std::string most_probable_root(const ActionScorer& scorer) {
  const std::int32_t n = scorer.vocabularies().nonterminals().size();
  if (n == 0) throw DataError("scorer has no nonterminals");
  std::vector<Action> opens;
  for (std::int32_t y = 0; y < n; ++y) opens.push_back(Action::open(y));
  std::vector<double> scores(opens.size());
  scorer.score(ActionHistory{}, opens, scores);
  const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
  return scorer.vocabularies().nonterminals().label(static_cast<std::int32_t>(best));
}

void decode_one(std::size_t id, const std::vector<std::string>& words, const ActionScorer& scorer,
                const DecodeOptions& options, const std::string& fallback, Tree& tree,
                SentenceDiagnostics& diag) {
  diag.sentence_id = id;
  diag.length = words.size();
  diag.variant = options.variant;
  try {
    const Sentence sentence = scorer.vocabularies().encode_sentence(words);
    SearchResult result =
        options.variant == SearchVariant::Word
            ? word_level_search(sentence, scorer, options.config)
            : action_level_search(sentence, scorer, options.config.k, options.config.limits,
                                  options.config.pruner);
    diag.states_expanded = result.stats.states_expanded;
    diag.buckets_visited = result.stats.buckets_visited;
    diag.completed = result.stats.completed;
    if (result.ok()) {
      const Hypothesis& best = result.hypotheses.front();
      const auto actions = best.actions.to_vector();
      tree = actions_to_tree(actions, scorer.vocabularies(), words);
      diag.log_prob = best.log_prob;
      return;
    }
    diag.error = "no complete hypothesis";
  } catch (const std::exception& e) {
    diag.error = e.what();
  }
  diag.failed = true;
  tree = right_branching_tree(fallback, words);
}

}  // namespace

DecodeOutput decode_corpus(const std::vector<std::vector<std::string>>& sentences,
                           const ActionScorer& scorer, const DecodeOptions& options) {
  if (sentences.empty()) throw DataError("nothing to decode");
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].empty()) throw DataError("sentence " + std::to_string(i) + " is empty");
  }
  if (options.variant == SearchVariant::Word) options.config.validate();
  const std::string fallback =
      options.fallback_label.empty() ? most_probable_root(scorer) : options.fallback_label;

  DecodeOutput out;
  out.trees.resize(sentences.size());
  out.diagnostics.resize(sentences.size());

  const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      decode_one(i, sentences[i], scorer, options, fallback, out.trees[i], out.diagnostics[i]);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < std::min(jobs, sentences.size()); ++j) pool.emplace_back(worker);
  }
  return out;
}

void write_diagnostics(std::ostream& out, const std::vector<SentenceDiagnostics>& diagnostics) {
  out << "sentence_id\tlength\tsearch\tstates_expanded\tbuckets_visited\tcompleted\tfailed\tlog_prob\n";
  for (const auto& d : diagnostics) {
    out << d.sentence_id << '\t' << d.length << '\t' << to_string(d.variant) << '\t'
        << d.states_expanded << '\t' << d.buckets_visited << '\t' << d.completed << '\t'
        << (d.failed ? 1 : 0) << '\t' << text::format_double(d.log_prob) << '\n';
  }
}

}  // namespace genparse
