#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "genparse/errors.hpp"
#include "genparse/eval.hpp"
#include "genparse/pruning.hpp"
#include "genparse/scoring.hpp"
#include "genparse/search.hpp"
#include "genparse/synthetic.hpp"
#include "genparse/text_format.hpp"
#include "genparse/tree.hpp"

namespace genparse::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

PosHandling parse_pos(const std::string& s) {
  if (s == "auto") return PosHandling::Auto;
  if (s == "strip") return PosHandling::Strip;
  if (s == "keep") return PosHandling::Keep;
  throw std::invalid_argument("--pos must be auto, strip or keep");
}

std::vector<Tree> read_treebank(const std::string& path, const std::string& pos) {
  ReadOptions opts;
  opts.pos = parse_pos(pos);
  auto trees = parse_bracketed(read_file(path), opts);
  if (trees.empty()) throw DataError("no trees in '" + path + "'");
  return trees;
}

// Bracketed trees when the file starts with '(', otherwise one whitespace
// tokenized sentence per non-blank line.
std::vector<std::vector<std::string>> read_sentences(const std::string& path, const std::string& pos) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<std::vector<std::string>> out;
  if (first != std::string::npos && text[first] == '(') {
    for (const auto& t : read_treebank(path, pos)) out.push_back(tree_words(t));
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::vector<std::string> s;
    for (std::string w; words >> w;) s.push_back(w);
    if (!s.empty()) out.push_back(std::move(s));
  }
  if (out.empty()) throw DataError("no sentences in '" + path + "'");
  return out;
}

CountScorer load_scorer(const std::string& path) {
  std::istringstream in(read_file(path));
  return CountScorer::load(in);
}

PruneModel load_pruner(const std::string& path) {
  std::istringstream in(read_file(path));
  return PruneModel::load(in);
}

std::string fraction_label(const std::string& p) {
  return p.empty() ? "1" : p;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t sentences = 2000;
  std::uint64_t seed = 11;
  std::uint64_t grammar_seed = SyntheticGrammarOptions{}.seed;
  SyntheticGrammarOptions grammar;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticGrammarOptions g = a.grammar;
  g.seed = a.grammar_seed;
  const SyntheticGrammar grammar(g);
  auto file = open_output(a.out);
  for (const auto& t : grammar.sample_corpus(a.sentences, a.seed)) file << serialize_bracketed(t) << '\n';
  out << "wrote " << a.sentences << " trees to " << a.out << '\n';
  return kOk;
}

struct TrainScorerArgs {
  std::string treebank, out, pos = "auto";
  int order = 3;
  double alpha = 0.001;
  int min_count = 1;
};

int cmd_train_scorer(const TrainScorerArgs& a, std::ostream& out) {
  const auto trees = read_treebank(a.treebank, a.pos);
  const auto vocab = build_vocab(trees, a.min_count);
  const auto corpus = linearize_corpus(trees, vocab);
  const auto scorer = train_count_scorer(vocab, corpus, a.order, a.alpha);
  auto file = open_output(a.out);
  scorer.save(file);
  std::size_t actions = 0;
  for (const auto& s : corpus) actions += s.size();
  out << "trees " << trees.size() << "\nnonterminals " << vocab.nonterminals().size() << "\nwords "
      << vocab.words().size() << "\nactions " << actions << "\nperplexity "
      << text::format_double(perplexity(scorer, corpus)) << '\n';
  return kOk;
}

struct TrainPrunerArgs {
  std::string treebank, out, scorer, pos = "auto";
  int min_count = 1;
  PruneTrainOptions train;
};

int cmd_train_pruner(const TrainPrunerArgs& a, std::ostream& out) {
  const auto trees = read_treebank(a.treebank, a.pos);
  // Reusing the scorer's vocabulary keeps word ids consistent at decode time.
  const Vocabularies vocab =
      a.scorer.empty() ? build_vocab(trees, a.min_count) : load_scorer(a.scorer).vocabularies();
  const auto result = prune_train(vocab, linearize_corpus(trees, vocab), a.train);
  auto file = open_output(a.out);
  result.model.save(file);
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) {
    out << "epoch " << e << " loss " << text::format_double(result.epoch_losses[e]) << '\n';
  }
  out << "final loss " << text::format_double(result.final_loss()) << '\n';
  return kOk;
}

struct SearchArgs {
  std::string search = "word";
  std::string k_w = "k/10";
  std::string k_s = "k/100";
  std::string p = "1";
  std::string prune_model;
  int k = 2000;
  int max_open = SearchLimits{}.max_open;
  int max_struct = SearchLimits{}.max_struct_per_word;
  bool no_truncate = false;
  int jobs = 1;
};

SearchVariant parse_variant(const std::string& s) {
  if (s == "word") return SearchVariant::Word;
  if (s == "action") return SearchVariant::Action;
  throw std::invalid_argument("--search must be word or action");
}

// Owns the pruner referenced from the returned options.
struct PreparedSearch {
  DecodeOptions options;
  std::unique_ptr<CoarsePruner> pruner;
};

PreparedSearch prepare_search(const SearchArgs& a, int k, const std::string& k_w,
                              const std::string& k_s, const std::string& p,
                              const CountScorer& scorer, const std::optional<PruneModel>& model) {
  PreparedSearch out;
  out.options.variant = parse_variant(a.search);
  out.options.jobs = a.jobs;
  SearchConfig& c = out.options.config;
  c.k = k;
  c.k_w = std::max(1, resolve_beam(k_w, k));
  c.k_s = resolve_beam(k_s, k);
  c.limits.max_open = a.max_open;
  c.limits.max_struct_per_word = a.max_struct;
  c.truncate_word_beam = !a.no_truncate;
  const double frac = parse_fraction(p);
  if (frac < 1.0 && !model) throw std::invalid_argument("--p below 1 needs --prune-model");
  if (model) {
    if (!(model->vocabularies() == scorer.vocabularies())) {
      throw DataError("pruning model and scorer were built with different vocabularies");
    }
    out.pruner = std::make_unique<CoarsePruner>(*model, frac);
    c.pruner = out.pruner.get();
  }
  c.validate();
  return out;
}

struct DecodeArgs {
  SearchArgs search;
  std::string input, scorer, out, diagnostics, gold, pos = "auto";
};

int cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const auto sentences = read_sentences(a.input, a.pos);
  const CountScorer scorer = load_scorer(a.scorer);
  std::optional<PruneModel> model;
  if (!a.search.prune_model.empty()) model = load_pruner(a.search.prune_model);
  const auto prepared = prepare_search(a.search, a.search.k, a.search.k_w, a.search.k_s,
                                       a.search.p, scorer, model);
  const auto result = decode_corpus(sentences, scorer, prepared.options);

  auto trees = open_output(a.out);
  for (const auto& t : result.trees) trees << serialize_bracketed(t) << '\n';
  auto diag = open_output(a.diagnostics.empty() ? a.out + ".diag.tsv" : a.diagnostics);
  write_diagnostics(diag, result.diagnostics);

  std::size_t failed = 0;
  std::int64_t states = 0;
  for (const auto& d : result.diagnostics) {
    failed += d.failed;
    states += d.states_expanded;
  }
  out << "sentences " << sentences.size() << "\nfailed " << failed << "\nstates_expanded " << states
      << '\n';
  if (!a.gold.empty()) write_report(out, score_corpus(result.trees, read_treebank(a.gold, a.pos)));
  return kOk;
}

struct StatsArgs {
  std::string treebank, cumulative, pos = "auto";
  std::vector<int> contexts{0, 1, 2};
  int min_occurrences = 20;
  double coverage = 0.99;
  int min_count = 1;
  int num_nonterminals = 26;
};

// Rows "c v1 v2 ... vN" of cumulative percentages, as published tables give them.
std::vector<OpenStatsTable> read_cumulative(const std::string& path) {
  std::vector<OpenStatsTable> tables;
  std::istringstream lines(read_file(path));
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok) || tok.front() == '#') continue;
    OpenStatsTable t;
    t.context = text::parse_int<int>(tok);
    while (fields >> tok) t.cumulative_percent.push_back(text::parse_double(tok));
    if (t.cumulative_percent.empty()) throw DataError("row for c=" + std::to_string(t.context) + " has no values");
    tables.push_back(std::move(t));
  }
  if (tables.empty()) throw DataError("no rows in '" + path + "'");
  return tables;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  if (a.treebank.empty() == a.cumulative.empty()) {
    throw std::invalid_argument("give exactly one of --treebank and --cumulative");
  }
  std::vector<OpenStatsTable> tables;
  int n = a.num_nonterminals;
  if (!a.treebank.empty()) {
    const auto trees = read_treebank(a.treebank, a.pos);
    const auto vocab = build_vocab(trees, a.min_count);
    const auto corpus = linearize_corpus(trees, vocab);
    n = vocab.nonterminals().size();
    for (const int c : a.contexts) tables.push_back(corpus_open_stats(vocab, corpus, c, a.min_occurrences));
  } else {
    tables = read_cumulative(a.cumulative);
  }
  write_stats_table(out, tables);
  for (const auto& t : tables) {
    const PruneBound b = lower_bound_p(t.cumulative_percent, a.coverage, n);
    out << "c=" << t.context << " p_min " << b.n << '/' << b.num_nonterminals << ' '
        << std::fixed << std::setprecision(3) << b.fraction() << std::defaultfloat;
    if (t.inputs > 0) out << " inputs " << t.inputs;
    out << '\n';
  }
  return kOk;
}

struct EvalArgs {
  std::string pred, gold, per_sentence, pos = "auto";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto score = score_corpus(read_treebank(a.pred, a.pos), read_treebank(a.gold, a.pos));
  write_report(out, score);
  if (!a.per_sentence.empty()) {
    auto file = open_output(a.per_sentence);
    write_sentence_scores(file, score);
  }
  return kOk;
}

struct SweepArgs {
  SearchArgs search;
  std::string dev, scorer, out, pos = "auto";
  std::vector<std::string> searches{"word"};
  std::vector<int> ks{200};
  std::vector<std::string> k_ws{"k/10"};
  std::vector<std::string> k_ss{"k/100"};
  std::vector<std::string> ps{"1"};
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto gold = read_treebank(a.dev, a.pos);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& t : gold) sentences.push_back(tree_words(t));
  const CountScorer scorer = load_scorer(a.scorer);
  std::optional<PruneModel> model;
  if (!a.search.prune_model.empty()) model = load_pruner(a.search.prune_model);

  std::ofstream file;
  if (!a.out.empty()) file = open_output(a.out);
  std::ostream& tsv = a.out.empty() ? out : file;
  tsv << "search\tk\tk_w\tk_s\tp\tLR\tLP\tF1\tstates_per_sentence\tfailed\tstatus\n";
  for (const auto& g : expand_grid(a.searches, a.ks, a.k_ws, a.k_ss, a.ps)) {
    tsv << g.search << '\t' << g.k;
    try {
      SearchArgs s = a.search;
      s.search = g.search;
      const auto prepared = prepare_search(s, g.k, g.k_w, g.k_s, g.p, scorer, model);
      const auto& c = prepared.options.config;
      const auto result = decode_corpus(sentences, scorer, prepared.options);
      const auto score = score_corpus(result.trees, gold);
      std::int64_t states = 0;
      std::size_t failed = 0;
      for (const auto& d : result.diagnostics) {
        states += d.states_expanded;
        failed += d.failed;
      }
      tsv << '\t' << c.k_w << '\t' << c.k_s << '\t' << fraction_label(g.p) << '\t'
          << format_percent(score.recall) << '\t' << format_percent(score.precision) << '\t'
          << format_percent(score.f1) << '\t' << std::fixed << std::setprecision(1)
          << static_cast<double>(states) / static_cast<double>(sentences.size())
          << std::defaultfloat << '\t' << failed << "\tok\n";
    } catch (const std::exception& e) {
      tsv << '\t' << g.k_w << '\t' << g.k_s << '\t' << fraction_label(g.p) << "\t-\t-\t-\t-\t-\terror: "
          << e.what() << '\n';
      err << "grid point failed: " << e.what() << '\n';
    }
    tsv.flush();
  }
  return kOk;
}

void add_search_options(CLI::App* app, SearchArgs& s) {
  app->add_option("--search", s.search, "word or action")->capture_default_str();
  app->add_option("--k", s.k, "beam size")->capture_default_str();
  app->add_option("--kw", s.k_w, "word beam: integer, k or k/N")->capture_default_str();
  app->add_option("--ks", s.k_s, "fast-track count: integer, k or k/N")->capture_default_str();
  app->add_option("--prune-model", s.prune_model, "coarse pruning model file");
  app->add_option("--p", s.p, "pruning fraction, e.g. 0.3 or 8/26")->capture_default_str();
  app->add_option("--max-open", s.max_open, "cap on unclosed constituents")->capture_default_str();
  app->add_option("--max-struct", s.max_struct, "cap on structural actions per word")->capture_default_str();
  app->add_flag("--no-word-beam-truncation", s.no_truncate,
                "use k_w only as the stopping signal for each word step");
  app->add_option("--jobs", s.jobs, "sentences decoded in parallel")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_config(CLI::App* app) {
  // Expanded by expand_config before parsing; declared so it shows in --help.
  app->add_option("--config", "key=value file; command-line flags take precedence");
}

bool has_flag(const std::vector<std::string>& args, const std::string& name) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == name || a.compare(0, name.size() + 1, name + "=") == 0;
  });
}

// Replaces "--config FILE" with one "--key=value" per line of FILE whose key
// was not given on the command line. Blank lines and '#' comments are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::istringstream lines(read_file(path));
  std::string line;
  for (int number = 1; std::getline(lines, line); ++number) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    auto trim = [](std::string v) {
      v.erase(0, v.find_first_not_of(" \t\r"));
      v.erase(v.find_last_not_of(" \t\r") + 1);
      return v;
    };
    const std::string flag = "--" + trim(line.substr(0, eq));
    if (!has_flag(out, flag)) out.push_back(flag + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

}  // namespace

double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  double v = 0;
  try {
    if (slash == std::string::npos) {
      v = genparse::text::parse_double(text);
    } else {
      const double num = genparse::text::parse_double(text.substr(0, slash));
      const double den = genparse::text::parse_double(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      v = num / den;
    }
  } catch (const DataError&) {
    throw std::invalid_argument("malformed fraction '" + text + "'");
  }
  if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("fraction '" + text + "' is not in (0, 1]");
  return v;
}

int resolve_beam(const std::string& expr, int k) {
  try {
    if (expr == "k") return k;
    if (expr.size() > 2 && expr.compare(0, 2, "k/") == 0) {
      const int d = genparse::text::parse_int<int>(expr.substr(2));
      if (d < 1) throw std::invalid_argument("divisor must be >= 1");
      return k / d;
    }
    const int v = genparse::text::parse_int<int>(expr);
    if (v < 0) throw std::invalid_argument("negative beam size");
    return v;
  } catch (const DataError&) {
    throw std::invalid_argument("malformed beam expression '" + expr + "'");
  }
}

std::vector<GridPoint> expand_grid(const std::vector<std::string>& search, const std::vector<int>& k,
                                   const std::vector<std::string>& k_w,
                                   const std::vector<std::string>& k_s,
                                   const std::vector<std::string>& p) {
  std::vector<GridPoint> out;
  for (const auto& s : search)
    for (const int kk : k)
      for (const auto& w : k_w)
        for (const auto& f : k_s)
          for (const auto& pp : p) out.push_back({s, kk, w, f, pp});
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Generative shift-reduce parsing: training, decoding, pruning and evaluation",
               args.empty() ? "genparse" : args.front());
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "sample a treebank from a random synthetic grammar");
  s_synth->add_option("--out", synth.out, "output treebank")->required();
  s_synth->add_option("--sentences", synth.sentences)->capture_default_str();
  s_synth->add_option("--seed", synth.seed, "sampling seed")->capture_default_str();
  s_synth->add_option("--grammar-seed", synth.grammar_seed, "grammar construction seed")->capture_default_str();
  s_synth->add_option("--nonterminals", synth.grammar.num_nonterminals)->capture_default_str();
  s_synth->add_option("--private-words", synth.grammar.private_words)->capture_default_str();
  s_synth->add_option("--shared-words", synth.grammar.shared_words)->capture_default_str();
  s_synth->add_option("--max-depth", synth.grammar.max_depth)->capture_default_str();
  s_synth->add_option("--min-length", synth.grammar.min_length)->capture_default_str();
  s_synth->add_option("--max-length", synth.grammar.max_length)->capture_default_str();
  add_config(s_synth);

  TrainScorerArgs ts;
  auto* s_ts = app.add_subcommand("train-scorer", "train a count-based action scorer");
  s_ts->add_option("--treebank", ts.treebank)->required();
  s_ts->add_option("--out", ts.out)->required();
  s_ts->add_option("--order", ts.order, "n-gram order m over actions")->capture_default_str();
  s_ts->add_option("--alpha", ts.alpha, "additive smoothing")->capture_default_str();
  s_ts->add_option("--min-count", ts.min_count, "word frequency threshold")->capture_default_str();
  s_ts->add_option("--pos", ts.pos, "preterminal handling: auto, strip, keep")->capture_default_str();
  add_config(s_ts);

  TrainPrunerArgs tp;
  auto* s_tp = app.add_subcommand("train-pruner", "train the coarse Open-pruning model");
  s_tp->add_option("--treebank", tp.treebank)->required();
  s_tp->add_option("--out", tp.out)->required();
  s_tp->add_option("--scorer", tp.scorer, "take the vocabulary from this scorer file");
  s_tp->add_option("--min-count", tp.min_count)->capture_default_str();
  s_tp->add_option("--context", tp.train.context, "context size c")->capture_default_str();
  s_tp->add_option("--embed-dim", tp.train.embed_dim)->capture_default_str();
  s_tp->add_option("--hidden-dim", tp.train.hidden_dim)->capture_default_str();
  s_tp->add_option("--learning-rate", tp.train.learning_rate)->capture_default_str();
  s_tp->add_option("--batch-size", tp.train.batch_size)->capture_default_str();
  s_tp->add_option("--epochs", tp.train.epochs)->capture_default_str();
  s_tp->add_option("--seed", tp.train.seed)->capture_default_str();
  s_tp->add_option("--pos", tp.pos)->capture_default_str();
  add_config(s_tp);

  DecodeArgs dec;
  auto* s_dec = app.add_subcommand("decode", "parse sentences with beam search");
  s_dec->add_option("--input", dec.input, "treebank or one sentence per line")->required();
  s_dec->add_option("--scorer", dec.scorer)->required();
  s_dec->add_option("--out", dec.out, "bracketed output trees")->required();
  s_dec->add_option("--diagnostics", dec.diagnostics, "per-sentence TSV (default <out>.diag.tsv)");
  s_dec->add_option("--gold", dec.gold, "score the output against this treebank");
  s_dec->add_option("--pos", dec.pos)->capture_default_str();
  add_search_options(s_dec, dec.search);
  add_config(s_dec);

  StatsArgs st;
  auto* s_st = app.add_subcommand("stats", "Open-output statistics and lower bounds on p");
  s_st->add_option("--treebank", st.treebank);
  s_st->add_option("--cumulative", st.cumulative, "precomputed rows 'c v1 v2 ...'");
  s_st->add_option("--contexts", st.contexts)->delimiter(',')->capture_default_str();
  s_st->add_option("--min-occurrences", st.min_occurrences)->capture_default_str();
  s_st->add_option("--coverage", st.coverage)->capture_default_str();
  s_st->add_option("--min-count", st.min_count)->capture_default_str();
  s_st->add_option("--num-nonterminals", st.num_nonterminals, "for --cumulative")->capture_default_str();
  s_st->add_option("--pos", st.pos)->capture_default_str();
  add_config(s_st);

  EvalArgs ev;
  auto* s_ev = app.add_subcommand("eval", "labeled bracket recall, precision and F1");
  s_ev->add_option("--pred", ev.pred)->required();
  s_ev->add_option("--gold", ev.gold)->required();
  s_ev->add_option("--per-sentence", ev.per_sentence, "per-sentence TSV");
  s_ev->add_option("--pos", ev.pos)->capture_default_str();
  add_config(s_ev);

  SweepArgs sw;
  auto* s_sw = app.add_subcommand("sweep", "decode and score a dev set over a settings grid");
  s_sw->add_option("--dev", sw.dev, "gold dev treebank")->required();
  s_sw->add_option("--scorer", sw.scorer)->required();
  s_sw->add_option("--out", sw.out, "TSV output (default stdout)");
  s_sw->add_option("--pos", sw.pos)->capture_default_str();
  add_search_options(s_sw, sw.search);
  s_sw->remove_option(s_sw->get_option("--search"));
  s_sw->remove_option(s_sw->get_option("--k"));
  s_sw->remove_option(s_sw->get_option("--kw"));
  s_sw->remove_option(s_sw->get_option("--ks"));
  s_sw->remove_option(s_sw->get_option("--p"));
  s_sw->add_option("--search", sw.searches)->delimiter(',')->capture_default_str();
  s_sw->add_option("--k", sw.ks)->delimiter(',')->capture_default_str();
  s_sw->add_option("--kw", sw.k_ws)->delimiter(',')->capture_default_str();
  s_sw->add_option("--ks", sw.k_ss)->delimiter(',')->capture_default_str();
  s_sw->add_option("--p", sw.ps)->delimiter(',')->capture_default_str();
  add_config(s_sw);

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s_synth) return cmd_synth(synth, out);
    if (*s_ts) return cmd_train_scorer(ts, out);
    if (*s_tp) return cmd_train_pruner(tp, out);
    if (*s_dec) return cmd_decode(dec, out);
    if (*s_st) return cmd_stats(st, out);
    if (*s_ev) return cmd_eval(ev, out);
    if (*s_sw) return cmd_sweep(sw, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace genparse::cli
