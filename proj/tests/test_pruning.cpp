#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "genparse/errors.hpp"
#include "genparse/pruning.hpp"
#include "genparse/synthetic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace genparse;

namespace {

PruneInput random_input(const PruneModel& m, std::mt19937_64& rng) {
  PruneInput in;
  std::uniform_int_distribution<std::int32_t> act(0, m.space().input_size() - 1);
  std::uniform_int_distribution<std::int32_t> word(0, m.end_of_sentence());
  for (int j = 0; j < m.context(); ++j) in.context.push_back(act(rng));
  in.word = word(rng);
  return in;
}

std::vector<std::string> label_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("L" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("collapsed inputs") {
  const auto vocab = build_vocab({testutil::figure_one()}, 1);
  const CollapsedSpace space(vocab.nonterminals().size());
  CHECK(space.size() == 7);
  const auto gold = tree_to_actions(testutil::figure_one(), vocab);
  const auto ex = pruning_examples(gold, vocab, 2);
  REQUIRE(ex.size() == gold.size());
  CHECK(ex[0].input.context == std::vector<std::int32_t>{space.begin_symbol(), space.begin_symbol()});
  CHECK(ex[0].input.word == vocab.word_id("He"));
  CHECK(ex[3].input.context == std::vector<std::int32_t>{space.index(gold[1]), space.shift_any()});
  CHECK(ex[3].input.word == vocab.word_id("had"));
  CHECK(ex.back().input.word == vocab.words().size());
  CHECK(ex.back().target == space.index(gold.back()));
}

TEST_CASE("forward pass") {
  const auto vocab = testutil::make_vocab({"X", "Y"}, {"a", "b"});
  PruneModel m(vocab, 2, 3, 4);
  std::mt19937_64 rng(3);
  const Eigen::VectorXd zero = m.forward(random_input(m, rng));
  for (Eigen::Index i = 0; i < zero.size(); ++i) CHECK(zero(i) == 1.0 / 5.0);
  oracle::randomize(m, rng, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd p = m.forward(random_input(m, rng));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.minCoeff() > 0.0);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  // 2 nonterminals -> 5 collapsed actions; 3 words including <unk>.
  const auto vocab = testutil::make_vocab({"X", "Y"}, {"a", "b"});
  std::mt19937_64 rng(17);
  for (int draw = 0; draw < 10; ++draw) {
    PruneModel m(vocab, 2, 3, 4);
    std::vector<PruneExample> batch;
    do {
      oracle::randomize(m, rng);
      batch.clear();
      for (int i = 0; i < 6; ++i) {
        batch.push_back({random_input(m, rng), std::uniform_int_distribution<std::int32_t>(0, 4)(rng)});
      }
    } while (oracle::min_preactivation(m, batch) < 1e-3);
    CHECK(oracle::gradient_check(m, batch) <= 1e-4);
  }
}

TEST_CASE("training") {
  const std::string text =
      "(S (NP He) (VP ran))\n(S (NP He) (VP sat) (PP on (NP it)))\n(S (VP ran) (NP it))\n";
  std::string corpus_text;
  for (int i = 0; i < 20; ++i) corpus_text += text;
  const auto trees = parse_bracketed(corpus_text);
  const auto vocab = build_vocab(trees, 1);
  const auto corpus = linearize_corpus(trees, vocab);
  PruneTrainOptions opts;
  opts.context = 2;
  opts.embed_dim = 8;
  opts.hidden_dim = 16;
  opts.batch_size = 8;
  opts.epochs = 30;
  opts.learning_rate = 0.1;
  const auto result = prune_train(vocab, corpus, opts);
  CHECK(result.epoch_losses.size() == 31);
  CHECK(result.epoch_losses[5] < result.epoch_losses[0]);

  const CollapsedSpace space(vocab.nonterminals().size());
  const Action open_s = Action::open(vocab.nonterminal_id("S"));
  const PruneInput in = prune_input(std::vector<Action>{open_s}, vocab.word_id("He"), space, 2);
  CHECK(result.model.forward(in)(vocab.nonterminal_id("NP")) > 0.9);

  SUBCASE("same seed, same bytes") {
    std::ostringstream a, b;
    result.model.save(a);
    prune_train(vocab, corpus, opts).model.save(b);
    CHECK(a.str() == b.str());
    std::istringstream in_stream(a.str());
    const PruneModel loaded = PruneModel::load(in_stream);
    CHECK(loaded == result.model);
    std::ostringstream c;
    loaded.save(c);
    CHECK(c.str() == a.str());
  }
  CHECK_THROWS_AS(prune_train(vocab, {}, opts), DataError);
}

TEST_CASE("held-out accuracy beats chance") {
  const SyntheticGrammar g;
  const auto train = g.sample_corpus(300, 21);
  const auto dev = g.sample_corpus(50, 22);
  const auto vocab = build_vocab(train, 1);
  PruneTrainOptions opts;
  opts.embed_dim = 16;
  opts.hidden_dim = 32;
  opts.epochs = 3;
  const auto result = prune_train(vocab, linearize_corpus(train, vocab), opts);
  std::size_t right = 0, total = 0;
  for (const auto& seq : linearize_corpus(dev, vocab)) {
    for (const auto& ex : pruning_examples(seq, vocab, opts.context)) {
      Eigen::Index best = 0;
      result.model.forward(ex.input).maxCoeff(&best);
      right += best == ex.target;
      ++total;
    }
  }
  CHECK(static_cast<double>(right) / total > 1.0 / CollapsedSpace(vocab.nonterminals().size()).size());
}

TEST_CASE("keep count") {
  CHECK(prune_keep_count(8.0 / 26, 26) == 8);
  CHECK(prune_keep_count(6.0 / 26, 26) == 6);
  CHECK(prune_keep_count(1.0, 26) == 26);
  CHECK(prune_keep_count(0.1, 5) == 1);
  CHECK(prune_keep_count(0.5, 0) == 0);
}

TEST_CASE("quantile pruning keeps the top Open successors") {
  const auto vocab = testutil::make_vocab(label_names(26), {"a"});
  PruneModel m(vocab, 2, 4, 8);
  std::mt19937_64 rng(5);
  oracle::randomize(m, rng);
  const Sentence s = vocab.encode_sentence({"a"});
  const Hypothesis h = testutil::replay({Action::open(3)});
  std::vector<OpenCandidate> pool;
  for (std::int32_t y = 0; y < 26; ++y) pool.push_back({&h, Action::open(y)});

  const PruneDecision d = prune_open_successors(m, 8.0 / 26, pool, s);
  CHECK(std::count(d.keep.begin(), d.keep.end(), true) == 8);
  const Eigen::VectorXd probs =
      m.forward(prune_input(std::vector<Action>{Action::open(3)}, vocab.word_id("a"), m.space(), 2));
  std::vector<double> scores(26);
  for (int y = 0; y < 26; ++y) scores[static_cast<std::size_t>(y)] = probs(y);
  CHECK(d.keep == oracle::top_fraction(scores, 8.0 / 26));

  const PruneDecision all = prune_open_successors(m, 1.0, pool, s);
  CHECK(std::count(all.keep.begin(), all.keep.end(), true) == 26);
  CHECK_THROWS_AS(prune_open_successors(m, 0.0, pool, s), std::invalid_argument);
}

TEST_CASE("pruning in search lowers the work done") {
  const SyntheticGrammar g;
  const auto train = g.sample_corpus(300, 31);
  const auto vocab = build_vocab(train, 1);
  const auto corpus = linearize_corpus(train, vocab);
  const auto scorer = train_count_scorer(vocab, corpus, 3, 0.01);
  PruneTrainOptions opts;
  opts.embed_dim = 8;
  opts.hidden_dim = 16;
  opts.epochs = 2;
  const auto model = prune_train(vocab, corpus, opts).model;
  std::vector<std::vector<std::string>> sents;
  for (const auto& t : g.sample_corpus(8, 32)) sents.push_back(tree_words(t));
  DecodeOptions base;
  base.config.k = base.config.k_w = 20;
  base.config.k_s = 1;
  base.config.limits.max_open = 8;
  const auto plain = decode_corpus(sents, scorer, base);

  const CoarsePruner noop(model, 1.0);
  DecodeOptions with_noop = base;
  with_noop.config.pruner = &noop;
  const auto same = decode_corpus(sents, scorer, with_noop);
  const CoarsePruner pruner(model, 8.0 / 26);
  DecodeOptions pruned = base;
  pruned.config.pruner = &pruner;
  const auto fewer = decode_corpus(sents, scorer, pruned);
  for (std::size_t i = 0; i < sents.size(); ++i) {
    CHECK(serialize_bracketed(same.trees[i]) == serialize_bracketed(plain.trees[i]));
    CHECK(same.diagnostics[i].states_expanded == plain.diagnostics[i].states_expanded);
    CHECK(fewer.diagnostics[i].states_expanded < plain.diagnostics[i].states_expanded);
  }
}

TEST_CASE("open statistics") {
  SUBCASE("agrees with a naive recount") {
    SyntheticGrammarOptions go;
    go.seed = 99;
    const SyntheticGrammar g(go);
    const auto trees = g.sample_corpus(200, 7);
    const auto vocab = build_vocab(trees, 1);
    const auto corpus = linearize_corpus(trees, vocab);
    const int n = vocab.nonterminals().size();
    for (int c : {0, 1, 2}) {
      for (int min_occ : {1, 5}) {
        const auto table = corpus_open_stats(vocab, corpus, c, min_occ);
        const auto naive = oracle::naive_open_stats(corpus, n, c, min_occ);
        REQUIRE(table.inputs == naive.inputs);
        REQUIRE(table.cumulative_percent.size() == static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
          CHECK(table.cumulative_percent[static_cast<std::size_t>(k)] ==
                100.0 * static_cast<double>(naive.at_most[static_cast<std::size_t>(k)]) / naive.inputs);
        }
        CHECK(table.cumulative_percent.back() == 100.0);
      }
    }
  }
  SUBCASE("one Open type per input") {
    const auto trees = parse_bracketed("(S (NP a) b)\n(S (NP a) c)");
    const auto vocab = build_vocab(trees, 1);
    const auto table = corpus_open_stats(vocab, linearize_corpus(trees, vocab), 1, 1);
    CHECK(table.cumulative_percent.front() == 100.0);
    std::ostringstream out;
    write_stats_table(out, {table});
    CHECK(out.str() == "  c ||      1      2\n  1 ||  100.0  100.0\n");
  }
  SUBCASE("errors") {
    const auto vocab = build_vocab({testutil::figure_one()}, 1);
    CHECK_THROWS_AS(corpus_open_stats(vocab, {}, 1, 1), DataError);
    CHECK_THROWS_AS(corpus_open_stats(vocab, {tree_to_actions(testutil::figure_one(), vocab)}, 1, 20),
                    DataError);
  }
}

TEST_CASE("lower bound on p") {
  const std::vector<double> c0{20.0, 58.4, 82.4, 91.0, 94.9, 96.8, 97.9, 98.6, 98.9, 99.2};
  const std::vector<double> c1{54.9, 80.5, 91.1, 95.9, 97.7, 98.8, 99.5, 99.8, 99.9, 100.0};
  const std::vector<double> c2{61.2, 85.0, 93.8, 97.4, 98.6, 99.5, 99.8, 99.9, 100.0, 100.0};
  CHECK(lower_bound_p(c0, 0.99, 26).n == 10);
  CHECK(lower_bound_p(c1, 0.99, 26).n == 7);
  CHECK(lower_bound_p(c2, 0.99, 26).n == 6);
  CHECK(lower_bound_p(c2, 0.99, 26).fraction() == doctest::Approx(6.0 / 26));
  CHECK(lower_bound_p(std::vector<double>{100.0, 100.0}, 0.99, 2).n == 1);
  CHECK_THROWS_AS(lower_bound_p(c0, 0.995, 26), DataError);
  CHECK_THROWS_AS(lower_bound_p(std::vector<double>{50.0, 40.0}, 0.3, 2), std::invalid_argument);
  int prev = 0;
  for (double cov : {0.5, 0.8, 0.9, 0.95, 0.99, 1.0}) {
    const int n = lower_bound_p(c2, cov, 26).n;
    CHECK(n >= prev);
    prev = n;
  }
}
