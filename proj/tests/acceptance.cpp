// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "genparse/eval.hpp"
#include "genparse/pruning.hpp"
#include "genparse/scoring.hpp"
#include "genparse/search.hpp"
#include "genparse/synthetic.hpp"
#include "genparse/tree.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace genparse;

namespace {

// Pinned tolerances and budgets.
constexpr double kSearchTolerance = 1e-9;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientStep = 1e-4;
constexpr double kEvalTolerance = 0.01;
constexpr double kMaxStateRatio = 0.50;
constexpr double kMaxF1Drop = 1.0;
constexpr double kMonotoneShare = 0.90;
constexpr double kRoundtripSeconds = 5;
constexpr double kExhaustiveSeconds = 30;
constexpr double kGradientSeconds = 10;
constexpr double kImbalanceSeconds = 60;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("[%s] %2d %-22s %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

// Runs `body`, which fills `detail` and returns pass/fail; exceptions fail.
void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, pass, detail, s);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// The desk-scale benchmark shared by the search and pruning criteria.
struct Benchmark {
  SyntheticGrammar grammar;
  std::vector<Tree> train, dev;
  Vocabularies vocab;
  std::vector<std::vector<Action>> train_actions;
  CountScorer scorer;
  std::vector<std::vector<std::string>> sentences;

  Benchmark()
      : train(grammar.sample_corpus(2000, 11)),
        dev(grammar.sample_corpus(100, 12)),
        vocab(build_vocab(train, 1)),
        train_actions(linearize_corpus(train, vocab)),
        scorer(train_count_scorer(vocab, train_actions, 3, 0.001)) {
    for (const auto& t : dev) sentences.push_back(tree_words(t));
  }

  DecodeOptions options(SearchVariant v, int k, int k_s) const {
    DecodeOptions o;
    o.variant = v;
    o.config.k = k;
    o.config.k_w = k;
    o.config.k_s = k_s;
    o.config.limits.max_open = 10;
    return o;
  }

  struct Run {
    double f1 = 0;
    double states_per_sentence = 0;
    DecodeOutput output;
  };

  Run run(const DecodeOptions& o) const {
    Run r;
    r.output = decode_corpus(sentences, scorer, o);
    r.f1 = score_corpus(r.output.trees, dev).f1;
    double states = 0;
    for (const auto& d : r.output.diagnostics) states += static_cast<double>(d.states_expanded);
    r.states_per_sentence = states / static_cast<double>(sentences.size());
    return r;
  }
};

int fast_track_for(int k) { return std::max(1, k / 100); }

std::string serialize_all(const DecodeOutput& out) {
  std::ostringstream ss;
  for (const auto& t : out.trees) ss << serialize_bracketed(t) << '\n';
  write_diagnostics(ss, out.diagnostics);
  return ss.str();
}

}  // namespace

int main() {
  // 1. Roundtrip.
  criterion(1, "roundtrip", [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    const auto vocab = testutil::vocab_for_random_trees(6, 10);
    ReadOptions keep;
    keep.pos = PosHandling::Keep;
    int ok = 0;
    for (int i = 0; i < 1000; ++i) {
      const int len = std::uniform_int_distribution<int>(1, 12)(rng);
      const Tree t = testutil::random_tree(rng, len, 6, 10);
      const bool actions_ok = actions_to_tree(tree_to_actions(t, vocab), vocab) == t;
      const auto reread = parse_bracketed(serialize_bracketed(t), keep);
      ok += actions_ok && reread.size() == 1 && reread[0] == t;
    }
    const double s = seconds_since(start);
    detail = std::to_string(ok) + "/1000 identical, budget " + fmt("%.0f s", kRoundtripSeconds);
    return ok == 1000 && s < kRoundtripSeconds;
  });

  // 2. Exhaustive-search oracle.
  criterion(2, "exhaustive search", [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto vocab = testutil::make_vocab({"X", "Y"}, {"a", "b"});
    std::vector<std::vector<std::string>> sentences;
    for (int len = 1; len <= 3; ++len) {
      for (int mask = 0; mask < (1 << len); ++mask) {
        std::vector<std::string> s;
        for (int j = 0; j < len; ++j) s.push_back((mask >> j) & 1 ? "b" : "a");
        sentences.push_back(s);
      }
    }
    SearchConfig cfg;
    cfg.k = cfg.k_w = 10000;
    cfg.k_s = 0;
    cfg.limits.max_open = 3;
    std::mt19937_64 rng(202);
    int cases = 0, matched = 0;
    double worst = 0;
    for (const auto& words : sentences) {
      const Sentence s = vocab.encode_sentence(words);
      for (int trial = 0; trial <= 20; ++trial) {
        const TableScorer scorer =
            trial == 0 ? TableScorer(vocab, TableScorer::uniform(vocab.action_space()))
                       : testutil::random_table_scorer(vocab, s, 3, rng);
        double best = -INFINITY;
        testutil::enumerate_sequences(s, 2, 3, [&](const std::vector<Action>& seq) {
          best = std::max(best, sequence_log_prob(scorer, seq));
        });
        const auto r = word_level_search(s, scorer, cfg);
        ++cases;
        if (!r.ok()) continue;
        const double err = std::abs(r.hypotheses.front().log_prob - best);
        worst = std::max(worst, err);
        matched += err <= kSearchTolerance;
      }
    }
    const double secs = seconds_since(start);
    detail = std::to_string(matched) + "/" + std::to_string(cases) + " match, max |diff| " +
             fmt("%.2e", worst) + ", " + std::to_string(sentences.size()) + " sentences";
    return matched == cases && secs < kExhaustiveSeconds;
  });

  const auto bench_start = std::chrono::steady_clock::now();
  const Benchmark bench;
  PruneTrainOptions prune_opts;  // order-2 context, defaults otherwise
  const PruneModel pruner = prune_train(bench.vocab, bench.train_actions, prune_opts).model;
  std::printf("       benchmark: %zu train / %zu dev trees, %d nonterminals, pruner trained (%.1f s)\n",
              bench.train.size(), bench.dev.size(), bench.vocab.nonterminals().size(),
              seconds_since(bench_start));

  // 3. Pruning no-op.
  criterion(3, "pruning no-op", [&](std::string& detail) {
    auto o = bench.options(SearchVariant::Word, 50, 1);
    const std::string plain = serialize_all(bench.run(o).output);
    const CoarsePruner noop(pruner, 1.0);
    o.config.pruner = &noop;
    const std::string pruned = serialize_all(bench.run(o).output);
    detail = "100 sentences, trees and diagnostics " +
             std::string(plain == pruned ? "byte-identical" : "differ");
    return plain == pruned;
  });

  // 4. Pruning cap property.
  criterion(4, "pruning cap", [](std::string& detail) {
    const auto vocab = testutil::vocab_for_random_trees(6, 5);
    std::mt19937_64 rng(404);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    PruneModel model(vocab, 2, 4, 6);
    int ok = 0, tied_pools = 0;
    for (int pool_id = 0; pool_id < 1000; ++pool_id) {
      // One pool in five uses an all-zero model so every score ties.
      model = PruneModel(vocab, 2, 4, 6);
      if (pool_id % 5 != 0) oracle::randomize(model, rng);
      else ++tied_pools;
      std::vector<std::string> words;
      for (int j = pick(1, 6); j > 0; --j) words.push_back("w" + std::to_string(pick(0, 5)));
      const Sentence s = vocab.encode_sentence(words);

      // Hypotheses from random valid walks that can still open.
      std::vector<Hypothesis> hyps;
      SearchLimits limits;
      limits.max_open = 4;
      for (int h = pick(1, 4); h > 0; --h) {
        Hypothesis hyp;
        for (int steps = pick(0, 8); steps > 0; --steps) {
          const auto succ = valid_successors(hyp, s, limits, 6);
          if (succ.empty()) break;
          hyp = advance(hyp, succ[static_cast<std::size_t>(pick(0, static_cast<int>(succ.size()) - 1))], 0.0, 0);
        }
        const auto succ = valid_successors(hyp, s, limits, 6);
        if (std::any_of(succ.begin(), succ.end(), [](Action a) { return a.kind == ActionKind::Open; })) {
          hyps.push_back(std::move(hyp));
        }
      }
      if (hyps.empty()) hyps.emplace_back();
      std::vector<OpenCandidate> pool;
      for (const auto& h : hyps) {
        for (std::int32_t x = 0; x < 6; ++x) {
          if (pick(0, 3) != 0) pool.push_back({&h, Action::open(x)});
        }
      }
      if (pool.empty()) pool.push_back({&hyps[0], Action::open(0)});

      const double p = static_cast<double>(pick(1, 26)) / 26.0;
      const PruneDecision d = prune_open_successors(model, p, pool, s);
      std::vector<double> scores;
      for (const auto& c : pool) {
        const auto in = prune_input(c.hypothesis->actions.to_vector(),
                                    s[static_cast<std::size_t>(c.hypothesis->word_index)].id,
                                    model.space(), 2);
        scores.push_back(model.forward(in)(c.action.id));
      }
      const std::size_t n = pool.size();
      const std::size_t survivors = static_cast<std::size_t>(std::count(d.keep.begin(), d.keep.end(), true));
      const std::size_t cap = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9)));
      ok += d.keep.size() == n && survivors <= cap && d.keep == oracle::top_fraction(scores, p);
    }
    detail = std::to_string(ok) + "/1000 pools (" + std::to_string(tied_pools) + " fully tied)";
    return ok == 1000;
  });

  // 5. Gradient check.
  criterion(5, "gradient check", [](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto vocab = testutil::make_vocab({"X", "Y", "Z"}, {"a", "b", "c"});
    std::mt19937_64 rng(505);
    double worst = 0;
    int ok = 0;
    for (int draw = 0; draw < 50; ++draw) {
      PruneModel m(vocab, 2, 3, 5);
      std::vector<PruneExample> batch;
      // Resample draws with a hidden unit within 1e-3 of the ReLU kink.
      do {
        oracle::randomize(m, rng);
        batch.clear();
        for (int i = 0; i < 6; ++i) {
          PruneInput in;
          for (int j = 0; j < 2; ++j) {
            in.context.push_back(std::uniform_int_distribution<std::int32_t>(0, m.space().input_size() - 1)(rng));
          }
          in.word = std::uniform_int_distribution<std::int32_t>(0, m.end_of_sentence())(rng);
          batch.push_back({in, std::uniform_int_distribution<std::int32_t>(0, m.space().size() - 1)(rng)});
        }
      } while (oracle::min_preactivation(m, batch) < 1e-3);
      const double err = oracle::gradient_check(m, batch, kGradientStep);
      worst = std::max(worst, err);
      ok += err <= kGradientTolerance;
    }
    const double s = seconds_since(start);
    detail = std::to_string(ok) + "/50 draws, max rel err " + fmt("%.2e", worst);
    return ok == 50 && s < kGradientSeconds;
  });

  // 6. Lower bound from the published cumulative table.
  criterion(6, "lower bound p", [](std::string& detail) {
    const std::vector<std::vector<double>> rows{
        {20.0, 58.4, 82.4, 91.0, 94.9, 96.8, 97.9, 98.6, 98.9, 99.2},
        {54.9, 80.5, 91.1, 95.9, 97.7, 98.8, 99.5, 99.8, 99.9, 100.0},
        {61.2, 85.0, 93.8, 97.4, 98.6, 99.5, 99.8, 99.9, 100.0, 100.0}};
    const int expected[] = {10, 7, 6};
    bool pass = true;
    for (int c = 0; c < 3; ++c) {
      const PruneBound b = lower_bound_p(rows[static_cast<std::size_t>(c)], 0.99, 26);
      detail += "c=" + std::to_string(c) + ":" + std::to_string(b.n) + "/26 ";
      pass = pass && b.n == expected[c];
    }
    return pass;
  });

  // 7. Stats oracle.
  criterion(7, "stats oracle", [&](std::string& detail) {
    const auto trees = bench.grammar.sample_corpus(200, 707);
    const auto vocab = build_vocab(trees, 1);
    const auto corpus = linearize_corpus(trees, vocab);
    const int n = vocab.nonterminals().size();
    bool pass = true;
    for (int c = 0; c <= 2; ++c) {
      const auto table = corpus_open_stats(vocab, corpus, c, 1);
      const auto naive = oracle::naive_open_stats(corpus, n, c, 1);
      bool same = table.inputs == naive.inputs &&
                  table.cumulative_percent.size() == naive.at_most.size();
      for (std::size_t j = 0; same && j < naive.at_most.size(); ++j) {
        same = table.cumulative_percent[j] ==
               100.0 * static_cast<double>(naive.at_most[j]) / static_cast<double>(naive.inputs);
      }
      detail += "c=" + std::to_string(c) + (same ? " equal" : " DIFFER") + " (" +
                std::to_string(table.inputs) + " inputs) ";
      pass = pass && same;
    }
    return pass;
  });

  // 8. Imbalance: Shift steps are the least probable on gold sequences.
  criterion(8, "imbalance", [&](std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    double sum[3] = {0, 0, 0};
    double count[3] = {0, 0, 0};
    for (const auto& tree : bench.dev) {
      const auto gold = tree_to_actions(tree, bench.vocab);
      ActionHistory h;
      for (const Action a : gold) {
        double lp = 0;
        bench.scorer.score(h, std::span<const Action>(&a, 1), std::span<double>(&lp, 1));
        const int kind = static_cast<int>(a.kind);
        sum[kind] += lp;
        count[kind] += 1;
        h = h.push(a);
      }
    }
    const double open = sum[static_cast<int>(ActionKind::Open)] / count[static_cast<int>(ActionKind::Open)];
    const double close = sum[static_cast<int>(ActionKind::Close)] / count[static_cast<int>(ActionKind::Close)];
    const double shift = sum[static_cast<int>(ActionKind::Shift)] / count[static_cast<int>(ActionKind::Shift)];
    detail = "mean log P Open " + fmt("%.3f", open) + " Close " + fmt("%.3f", close) + " Shift " +
             fmt("%.3f", shift) + " (m=3, " + std::to_string(bench.train.size()) + " train trees)";
    return shift < open && shift < close && seconds_since(start) < kImbalanceSeconds;
  });

  // 9. Search regimes.
  criterion(9, "search regimes", [&](std::string& detail) {
    bool a_ok = true, b_ok = true;
    std::string a_text = "(a)", b_text = " (b)";
    for (const int k : {20, 50, 100}) {
      const double action = bench.run(bench.options(SearchVariant::Action, k, 0)).f1;
      const double plain = bench.run(bench.options(SearchVariant::Word, k, 0)).f1;
      const double fast = bench.run(bench.options(SearchVariant::Word, k, fast_track_for(k))).f1;
      a_ok = a_ok && fast > action;
      b_ok = b_ok && fast >= plain;
      a_text += " k=" + std::to_string(k) + " word " + fmt("%.2f", fast) + " > action " + fmt("%.2f", action) + ";";
      b_text += " k=" + std::to_string(k) + " " + fmt("%.2f", fast) + " >= " + fmt("%.2f", plain) + ";";
    }
    const std::vector<int> grid{5, 10, 20, 40, 80, 160, 320};
    std::vector<double> f1;
    std::string c_text = " (c) F1 over k";
    for (const int k : grid) {
      f1.push_back(bench.run(bench.options(SearchVariant::Word, k, fast_track_for(k))).f1);
      c_text += " " + fmt("%.2f", f1.back());
    }
    int nondecreasing = 0;
    for (std::size_t i = 1; i < f1.size(); ++i) nondecreasing += f1[i] >= f1[i - 1];
    const double share = static_cast<double>(nondecreasing) / static_cast<double>(f1.size() - 1);
    const bool c_ok = share >= kMonotoneShare;
    detail = a_text + b_text + c_text + ", " + std::to_string(nondecreasing) + "/" +
             std::to_string(f1.size() - 1) + " pairs nondecreasing";
    return a_ok && b_ok && c_ok;
  });

  // 10. Pruning cost/quality trade.
  criterion(10, "pruning trade", [&](std::string& detail) {
    auto o = bench.options(SearchVariant::Word, 100, 1);
    const auto full = bench.run(o);
    const CoarsePruner pruned_hook(pruner, 8.0 / 26.0);
    o.config.pruner = &pruned_hook;
    const auto pruned = bench.run(o);
    const double ratio = pruned.states_per_sentence / full.states_per_sentence;
    const double drop = full.f1 - pruned.f1;
    detail = "states/sentence " + fmt("%.0f", pruned.states_per_sentence) + " vs " +
             fmt("%.0f", full.states_per_sentence) + " (" + fmt("%.1f%%", 100 * ratio) + "), F1 " +
             fmt("%.2f", pruned.f1) + " vs " + fmt("%.2f", full.f1);
    return ratio <= kMaxStateRatio && drop <= kMaxF1Drop;
  });

  // 11. Evaluation.
  criterion(11, "eval", [&](std::string& detail) {
    const Tree fig = testutil::figure_one();
    const Tree flat = parse_bracketed("(S (NP He) (VP had an idea) .)").at(0);
    const auto s = score_corpus({fig}, {flat});
    const bool fig_ok = format_percent(s.recall) == "100.00" && format_percent(s.precision) == "75.00" &&
                        format_percent(s.f1) == "85.71";
    const auto id = score_corpus(bench.dev, bench.dev);
    const bool id_ok = format_percent(id.f1) == "100.00";
    const auto pred = bench.run(bench.options(SearchVariant::Word, 5, 1)).output.trees;
    const std::vector<Tree> pred50(pred.begin(), pred.begin() + 50);
    const std::vector<Tree> gold50(bench.dev.begin(), bench.dev.begin() + 50);
    const auto fast = score_corpus(pred50, gold50);
    const auto naive = oracle::naive_score(pred50, gold50);
    const double diff = std::max({std::abs(fast.recall - naive.recall), std::abs(fast.precision - naive.precision),
                                  std::abs(fast.f1 - naive.f1)});
    detail = "figure " + format_percent(s.recall) + "/" + format_percent(s.precision) + "/" +
             format_percent(s.f1) + ", identity " + format_percent(id.f1) + ", 50-tree diff " +
             fmt("%.2e", diff) + " at F1 " + format_percent(fast.f1);
    return fig_ok && id_ok && diff <= kEvalTolerance;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
