#include "genparse/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "genparse/errors.hpp"
#include "genparse/text_format.hpp"

namespace genparse {

PruneInput prune_input(std::span<const Action> history, std::int32_t next_word,
                       const CollapsedSpace& space, int context) {
  PruneInput in;
  in.context.assign(static_cast<std::size_t>(context), space.begin_symbol());
  const std::size_t take = std::min(history.size(), in.context.size());
  for (std::size_t i = 0; i < take; ++i) {
    in.context[in.context.size() - take + i] = space.index(history[history.size() - take + i]);
  }
  in.word = next_word;
  return in;
}

std::vector<PruneExample> pruning_examples(std::span<const Action> gold, const Vocabularies& vocab,
                                           int context) {
  const CollapsedSpace space(vocab.nonterminals().size());
  const std::int32_t eos = vocab.words().size();
  // next_word[t]: the word of the first Shift at or after t.
  std::vector<std::int32_t> next_word(gold.size() + 1, eos);
  for (std::size_t t = gold.size(); t-- > 0;) {
    next_word[t] = gold[t].is_shift() ? gold[t].id : next_word[t + 1];
  }
  std::vector<PruneExample> out;
  out.reserve(gold.size());
  for (std::size_t t = 0; t < gold.size(); ++t) {
    out.push_back({prune_input(gold.subspan(0, t), next_word[t], space, context),
                   space.index(gold[t])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// PruneModel

PruneModel::PruneModel(Vocabularies vocab, int context, int embed_dim, int hidden_dim)
    : vocab_(std::move(vocab)), space_(vocab_.nonterminals().size()), context_(context) {
  if (context < 0 || embed_dim < 1 || hidden_dim < 1) {
    throw std::invalid_argument("pruning model needs context >= 0 and positive dimensions");
  }
  action_embeddings = Eigen::MatrixXd::Zero(space_.input_size(), embed_dim);
  word_embeddings = Eigen::MatrixXd::Zero(vocab_.words().size() + 1, embed_dim);
  W1 = Eigen::MatrixXd::Zero(hidden_dim, (context + 1) * embed_dim);
  b1 = Eigen::VectorXd::Zero(hidden_dim);
  W2 = Eigen::MatrixXd::Zero(space_.size(), hidden_dim);
  b2 = Eigen::VectorXd::Zero(space_.size());
}

Eigen::VectorXd PruneModel::input_vector(const PruneInput& input) const {
  const int d = embed_dim();
  Eigen::VectorXd v(static_cast<Eigen::Index>(context_ + 1) * d);
  for (int s = 0; s < context_; ++s) {
    v.segment(s * d, d) = action_embeddings.row(input.context.at(static_cast<std::size_t>(s))).transpose();
  }
  std::int32_t word = input.word;
  if (word < 0 || word > end_of_sentence()) word = kUnknownWordId;
  v.segment(context_ * d, d) = word_embeddings.row(word).transpose();
  return v;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

Eigen::VectorXd PruneModel::forward(const PruneInput& input) const {
  const Eigen::VectorXd v = input_vector(input);
  const Eigen::VectorXd h = (W1 * v + b1).cwiseMax(0.0);
  return softmax(W2 * h + b2);
}

double PruneModel::loss(std::span<const PruneExample> batch, PruneGradients* grad) const {
  if (batch.empty()) return 0.0;
  if (grad) grad->set_zero();
  const int d = embed_dim();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const auto& ex : batch) {
    const Eigen::VectorXd v = input_vector(ex.input);
    const Eigen::VectorXd pre = W1 * v + b1;
    const Eigen::VectorXd h = pre.cwiseMax(0.0);
    const Eigen::VectorXd z = W2 * h + b2;
    const double zmax = z.maxCoeff();
    const double log_norm = zmax + std::log((z.array() - zmax).exp().sum());
    total -= z(ex.target) - log_norm;
    if (!grad) continue;

    Eigen::VectorXd dz = (z.array() - log_norm).exp().matrix();
    dz(ex.target) -= 1.0;
    dz *= scale;
    grad->W2.noalias() += dz * h.transpose();
    grad->b2 += dz;
    const Eigen::VectorXd dpre =
        ((W2.transpose() * dz).array() * (pre.array() > 0.0).cast<double>()).matrix();
    grad->W1.noalias() += dpre * v.transpose();
    grad->b1 += dpre;
    const Eigen::VectorXd dv = W1.transpose() * dpre;
    for (int s = 0; s < context_; ++s) {
      grad->action_embeddings.row(ex.input.context[static_cast<std::size_t>(s)]) +=
          dv.segment(s * d, d).transpose();
    }
    std::int32_t word = ex.input.word;
    if (word < 0 || word > end_of_sentence()) word = kUnknownWordId;
    grad->word_embeddings.row(word) += dv.segment(context_ * d, d).transpose();
  }
  return total * scale;
}

PruneGradients::PruneGradients(const PruneModel& m)
    : action_embeddings(m.action_embeddings.rows(), m.action_embeddings.cols()),
      word_embeddings(m.word_embeddings.rows(), m.word_embeddings.cols()),
      W1(m.W1.rows(), m.W1.cols()),
      b1(m.b1.size()),
      W2(m.W2.rows(), m.W2.cols()),
      b2(m.b2.size()) {
  set_zero();
}

void PruneGradients::set_zero() {
  action_embeddings.setZero();
  word_embeddings.setZero();
  W1.setZero();
  b1.setZero();
  W2.setZero();
  b2.setZero();
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << text::format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& name, Eigen::Index rows,
                            Eigen::Index cols) {
  std::istringstream header(text::read_line(in, name));
  std::string got;
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  if (!(header >> got >> r >> c) || got != name) throw DataError("expected matrix " + name);
  if (r != rows || c != cols) throw DataError("matrix " + name + " has unexpected shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    std::istringstream line(text::read_line(in, name));
    std::string tok;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(line >> tok)) throw DataError("matrix " + name + " row too short");
      m(i, j) = text::parse_double(tok);
      if (!std::isfinite(m(i, j))) throw DataError("non-finite parameter in " + name);
    }
  }
  return m;
}

}  // namespace

void PruneModel::save(std::ostream& out) const {
  out << "genparse-prune-model 1\n";
  out << "context " << context_ << '\n';
  out << "embed " << embed_dim() << '\n';
  out << "hidden " << hidden_dim() << '\n';
  save_vocabularies(out, vocab_);
  write_matrix(out, "action_embeddings", action_embeddings);
  write_matrix(out, "word_embeddings", word_embeddings);
  write_matrix(out, "W1", W1);
  write_matrix(out, "b1", b1);
  write_matrix(out, "W2", W2);
  write_matrix(out, "b2", b2);
}

PruneModel PruneModel::load(std::istream& in) {
  const std::string magic = text::read_line(in, "header");
  if (magic != "genparse-prune-model 1") {
    throw DataError("not a pruning model file (header '" + magic + "')");
  }
  const int context = text::parse_int<int>(text::read_field(in, "context"));
  const int embed = text::parse_int<int>(text::read_field(in, "embed"));
  const int hidden = text::parse_int<int>(text::read_field(in, "hidden"));
  PruneModel m(load_vocabularies(in), context, embed, hidden);
  m.action_embeddings = read_matrix(in, "action_embeddings", m.action_embeddings.rows(), embed);
  m.word_embeddings = read_matrix(in, "word_embeddings", m.word_embeddings.rows(), embed);
  m.W1 = read_matrix(in, "W1", hidden, m.W1.cols());
  m.b1 = read_matrix(in, "b1", hidden, 1);
  m.W2 = read_matrix(in, "W2", m.W2.rows(), hidden);
  m.b2 = read_matrix(in, "b2", m.b2.size(), 1);
  return m;
}

bool operator==(const PruneModel& a, const PruneModel& b) {
  return a.vocab_ == b.vocab_ && a.context_ == b.context_ &&
         a.action_embeddings == b.action_embeddings && a.word_embeddings == b.word_embeddings &&
         a.W1 == b.W1 && a.b1 == b.b1 && a.W2 == b.W2 && a.b2 == b.b2;
}

// ---------------------------------------------------------------------------
// Training

namespace {

void fill_uniform(Eigen::MatrixXd& m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

void initialize(PruneModel& m, std::mt19937_64& rng) {
  fill_uniform(m.action_embeddings, 0.5, rng);
  fill_uniform(m.word_embeddings, 0.5, rng);
  fill_uniform(m.W1, std::sqrt(6.0 / static_cast<double>(m.W1.rows() + m.W1.cols())), rng);
  fill_uniform(m.W2, std::sqrt(6.0 / static_cast<double>(m.W2.rows() + m.W2.cols())), rng);
  m.b1.setZero();
  m.b2.setZero();
}

void step(PruneModel& m, const PruneGradients& g, double lr) {
  m.action_embeddings -= lr * g.action_embeddings;
  m.word_embeddings -= lr * g.word_embeddings;
  m.W1 -= lr * g.W1;
  m.b1 -= lr * g.b1;
  m.W2 -= lr * g.W2;
  m.b2 -= lr * g.b2;
}

}  // namespace

PruneTrainResult prune_train(const Vocabularies& vocab,
                             const std::vector<std::vector<Action>>& corpus,
                             const PruneTrainOptions& options) {
  if (options.batch_size < 1 || options.epochs < 0 || !(options.learning_rate > 0.0)) {
    throw std::invalid_argument("invalid pruning-model training hyperparameters");
  }
  std::vector<PruneExample> examples;
  for (const auto& seq : corpus) {
    auto ex = pruning_examples(seq, vocab, options.context);
    examples.insert(examples.end(), ex.begin(), ex.end());
  }
  if (examples.empty()) throw DataError("cannot train a pruning model on an empty corpus");

  std::mt19937_64 rng(options.seed);
  PruneTrainResult result{PruneModel(vocab, options.context, options.embed_dim, options.hidden_dim),
                          {}};
  PruneModel& model = result.model;
  initialize(model, rng);
  PruneGradients grad(model);

  auto check = [](double loss, int epoch) {
    if (!std::isfinite(loss)) {
      throw DataError("pruning-model training diverged (loss " + text::format_double(loss) +
                      " at epoch " + std::to_string(epoch) + ")");
    }
    return loss;
  };
  result.epoch_losses.push_back(check(model.loss(examples), 0));

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<PruneExample> batch;
  const auto bs = static_cast<std::size_t>(options.batch_size);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      batch.clear();
      for (std::size_t i = start; i < std::min(start + bs, order.size()); ++i) {
        batch.push_back(examples[order[i]]);
      }
      check(model.loss(batch, &grad), epoch);
      step(model, grad, options.learning_rate);
    }
    result.epoch_losses.push_back(check(model.loss(examples), epoch));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Pruning

std::size_t prune_keep_count(double p, std::size_t n) {
  if (n == 0) return 0;
  if (p >= 1.0) return n;
  // The epsilon absorbs representation error in fractions like 8/26 * 26.
  const auto kept = static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9));
  return std::clamp<std::size_t>(kept, 1, n);
}

PruneDecision prune_open_successors(const PruneModel& model, double p,
                                    std::span<const OpenCandidate> pool, const Sentence& sentence) {
  if (!(p > 0.0)) throw std::invalid_argument("pruning fraction p must be in (0, 1]");
  PruneDecision decision;
  decision.keep.assign(pool.size(), true);
  if (p >= 1.0 || pool.empty()) return decision;

  std::map<PruneInput, Eigen::VectorXd> cache;
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Hypothesis& h = *pool[i].hypothesis;
    const auto wi = static_cast<std::size_t>(h.word_index);
    const std::int32_t word = wi < sentence.size() ? sentence[wi].id : model.end_of_sentence();
    PruneInput input = prune_input(h.actions.suffix(static_cast<std::size_t>(model.context())),
                                   word, model.space(), model.context());
    auto it = cache.find(input);
    if (it == cache.end()) it = cache.emplace(input, model.forward(input)).first;
    scores[i] = it->second(model.space().index(pool[i].action));
  }

  const std::size_t keep = prune_keep_count(p, pool.size());
  decision.floor_override = std::floor(p * static_cast<double>(pool.size()) + 1e-9) < 1.0;
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  decision.keep.assign(pool.size(), false);
  for (std::size_t i = 0; i < keep; ++i) decision.keep[order[i]] = true;
  return decision;
}

CoarsePruner::CoarsePruner(const PruneModel& model, double p) : model_(model), p_(p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("pruning fraction p must be in (0, 1]");
}

PruneDecision CoarsePruner::select(std::span<const OpenCandidate> candidates,
                                   const Sentence& sentence) const {
  return prune_open_successors(model_, p_, candidates, sentence);
}

// ---------------------------------------------------------------------------
// Corpus statistics

OpenStatsTable corpus_open_stats(const Vocabularies& vocab,
                                 const std::vector<std::vector<Action>>& corpus, int context,
                                 int min_occurrences) {
  if (corpus.empty()) throw DataError("cannot compute statistics of an empty corpus");
  if (min_occurrences < 1) throw std::invalid_argument("min_occurrences must be >= 1");
  struct InputStats {
    long count = 0;
    std::set<std::int32_t> opens;
  };
  std::map<PruneInput, InputStats> stats;
  const CollapsedSpace space(vocab.nonterminals().size());
  for (const auto& seq : corpus) {
    for (const auto& ex : pruning_examples(seq, vocab, context)) {
      auto& s = stats[ex.input];
      ++s.count;
      if (ex.target < space.num_nonterminals()) s.opens.insert(ex.target);
    }
  }

  const auto n_max = static_cast<std::size_t>(space.num_nonterminals());
  std::vector<long> histogram(n_max + 1, 0);
  OpenStatsTable table;
  table.context = context;
  for (const auto& [input, s] : stats) {
    if (s.count < min_occurrences || s.opens.empty()) continue;
    ++histogram[s.opens.size()];
    ++table.inputs;
  }
  if (table.inputs == 0) {
    throw DataError("no pruning input occurs " + std::to_string(min_occurrences) +
                    " times with an Open output");
  }
  long running = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    running += histogram[n];
    table.cumulative_percent.push_back(100.0 * static_cast<double>(running) /
                                       static_cast<double>(table.inputs));
  }
  return table;
}

PruneBound lower_bound_p(std::span<const double> cumulative_percent, double coverage,
                         int num_nonterminals) {
  if (!(coverage > 0.0 && coverage <= 1.0)) throw std::invalid_argument("coverage must be in (0, 1]");
  if (num_nonterminals < 1) throw std::invalid_argument("need at least one nonterminal");
  for (std::size_t i = 1; i < cumulative_percent.size(); ++i) {
    if (cumulative_percent[i] < cumulative_percent[i - 1]) {
      throw std::invalid_argument("cumulative table must be nondecreasing");
    }
  }
  const double target = 100.0 * coverage;
  for (std::size_t i = 0; i < cumulative_percent.size(); ++i) {
    if (cumulative_percent[i] >= target - 1e-9) return {static_cast<int>(i + 1), num_nonterminals};
  }
  throw DataError("coverage " + text::format_double(coverage) + " is not reached by the table");
}

void write_stats_table(std::ostream& out, const std::vector<OpenStatsTable>& tables) {
  std::size_t cols = 0;
  for (const auto& t : tables) cols = std::max(cols, t.cumulative_percent.size());
  const std::ios_base::fmtflags flags = out.flags();
  out << std::setw(3) << "c" << " ||";
  for (std::size_t n = 1; n <= cols; ++n) out << std::setw(7) << n;
  out << '\n';
  for (const auto& t : tables) {
    out << std::setw(3) << t.context << " ||";
    for (const double v : t.cumulative_percent) {
      out << std::setw(7) << std::fixed << std::setprecision(1) << v;
    }
    out << '\n';
  }
  out.flags(flags);
}

}  // namespace genparse
