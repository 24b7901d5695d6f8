#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genparse/action.hpp"
#include "genparse/search.hpp"
#include "genparse/vocab.hpp"

namespace genparse {

// Output vocabulary of the coarse model: Open(X) and Close(X) for every
// nonterminal plus one unlexicalized Shift.
//   [0, N) Open, [N, 2N) Close, 2N ShiftAny, 2N + 1 begin padding (input only)
class CollapsedSpace {
 public:
  CollapsedSpace() = default;
  explicit CollapsedSpace(std::int32_t num_nonterminals) : n_(num_nonterminals) {}

  std::int32_t num_nonterminals() const { return n_; }
  std::int32_t size() const { return 2 * n_ + 1; }
  std::int32_t shift_any() const { return 2 * n_; }
  std::int32_t begin_symbol() const { return 2 * n_ + 1; }
  std::int32_t input_size() const { return 2 * n_ + 2; }

  std::int32_t index(Action a) const {
    switch (a.kind) {
      case ActionKind::Open: return a.id;
      case ActionKind::Close: return n_ + a.id;
      case ActionKind::Shift: return shift_any();
    }
    return -1;
  }

 private:
  std::int32_t n_ = 0;
};

// One training/inference input: the last c collapsed actions (oldest first,
// begin-padded) and the next word id. The end-of-sentence word is
// num_words (one past the word vocabulary).
struct PruneInput {
  std::vector<std::int32_t> context;
  std::int32_t word = 0;

  friend auto operator<=>(const PruneInput&, const PruneInput&) = default;
};

struct PruneExample {
  PruneInput input;
  std::int32_t target = 0;
};

PruneInput prune_input(std::span<const Action> history, std::int32_t next_word,
                       const CollapsedSpace& space, int context);

// One example per action of each gold sequence.
std::vector<PruneExample> pruning_examples(std::span<const Action> gold, const Vocabularies& vocab,
                                           int context);

struct PruneGradients;

// softmax(W2 relu(W1 v + b1) + b2), where v concatenates the context action
// embeddings and the next-word embedding.
class PruneModel {
 public:
  PruneModel() = default;
  // All parameters zero.
  PruneModel(Vocabularies vocab, int context, int embed_dim, int hidden_dim);

  const Vocabularies& vocabularies() const { return vocab_; }
  const CollapsedSpace& space() const { return space_; }
  int context() const { return context_; }
  int embed_dim() const { return static_cast<int>(action_embeddings.cols()); }
  int hidden_dim() const { return static_cast<int>(b1.size()); }
  std::int32_t end_of_sentence() const { return vocab_.words().size(); }

  // Probabilities over the collapsed output space. Out-of-range word ids are
  // treated as <unk>.
  Eigen::VectorXd forward(const PruneInput& input) const;

  // Mean cross-entropy over `batch`; when `grad` is non-null it receives the
  // gradient of that mean.
  double loss(std::span<const PruneExample> batch, PruneGradients* grad = nullptr) const;

  void save(std::ostream& out) const;
  static PruneModel load(std::istream& in);

  friend bool operator==(const PruneModel&, const PruneModel&);

  Eigen::MatrixXd action_embeddings;  // input_size x d_e
  Eigen::MatrixXd word_embeddings;    // (|words| + 1) x d_e
  Eigen::MatrixXd W1;                 // d_h x (c + 1) d_e
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;  // |collapsed| x d_h
  Eigen::VectorXd b2;

 private:
  Eigen::VectorXd input_vector(const PruneInput& input) const;

  Vocabularies vocab_;
  CollapsedSpace space_;
  int context_ = 0;
};

struct PruneGradients {
  explicit PruneGradients(const PruneModel& m);
  void set_zero();

  Eigen::MatrixXd action_embeddings;
  Eigen::MatrixXd word_embeddings;
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;
  Eigen::VectorXd b2;
};

struct PruneTrainOptions {
  int context = 2;
  int embed_dim = 32;
  int hidden_dim = 128;
  double learning_rate = 0.05;
  int batch_size = 64;
  int epochs = 10;
  std::uint64_t seed = 1;
};

struct PruneTrainResult {
  PruneModel model;
  // epoch_losses[0] is the loss before training, epoch_losses[e] after epoch e.
  std::vector<double> epoch_losses;
  double final_loss() const { return epoch_losses.back(); }
};

// Mini-batch gradient descent on the mean cross-entropy of gold collapsed
// actions. Throws DataError on an empty corpus or a non-finite loss.
PruneTrainResult prune_train(const Vocabularies& vocab,
                             const std::vector<std::vector<Action>>& corpus,
                             const PruneTrainOptions& options);

// Number of Open successors kept out of n: floor(p n), at least 1 when n >= 1.
std::size_t prune_keep_count(double p, std::size_t n);

// Keeps the top prune_keep_count(p, N) of the pooled Open successors by coarse
// probability (ties: earlier candidate wins). The model runs once per distinct
// (context, next word).
PruneDecision prune_open_successors(const PruneModel& model, double p,
                                    std::span<const OpenCandidate> pool, const Sentence& sentence);

class CoarsePruner final : public OpenPruner {
 public:
  CoarsePruner(const PruneModel& model, double p);
  PruneDecision select(std::span<const OpenCandidate> candidates,
                       const Sentence& sentence) const override;
  double p() const { return p_; }

 private:
  const PruneModel& model_;
  double p_;
};

// Cumulative distribution of the number of distinct Open outputs per pruning
// input, over inputs seen >= min_occurrences times with >= 1 Open output.
struct OpenStatsTable {
  int context = 0;
  std::size_t inputs = 0;
  std::vector<double> cumulative_percent;  // entry n-1: % of inputs with <= n Opens
};

OpenStatsTable corpus_open_stats(const Vocabularies& vocab,
                                 const std::vector<std::vector<Action>>& corpus, int context,
                                 int min_occurrences);

struct PruneBound {
  int n = 0;
  int num_nonterminals = 0;
  double fraction() const { return static_cast<double>(n) / num_nonterminals; }
};

// Smallest n whose cumulative percentage reaches coverage (a fraction in
// (0, 1]). Throws DataError if no column reaches it.
PruneBound lower_bound_p(std::span<const double> cumulative_percent, double coverage,
                         int num_nonterminals);

// Aligned text, one row per context size, one column per n.
void write_stats_table(std::ostream& out, const std::vector<OpenStatsTable>& tables);

}  // namespace genparse
