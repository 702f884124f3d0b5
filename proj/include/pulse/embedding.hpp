#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pulse::embedding {

enum class Mode { kSkipGram, kCbow };

struct TrainingConfig {
  Mode mode = Mode::kSkipGram;
  int dim = 100;
  int window = 5;
  int negative = 5;     // negative samples per positive pair
  int epochs = 5;
  double initial_lr = 0.025;
  int min_count = 5;
  double subsample_t = 1e-3;  // 0 disables frequent-word subsampling
  std::int64_t seed = 42;
};

/// Execution choices, not hyperparameters: they never change what the model
/// means, only how it is computed. Only deterministic mode guarantees
/// bit-identical vectors for a fixed seed.
struct TrainOptions {
  bool deterministic = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;  // mean NLL per scheduled pair
  std::uint64_t total_pairs = 0;
};

struct EmbeddingModel {
  int dim = 0;
  std::vector<std::string> words;               // row -> word
  std::unordered_map<std::string, int> vocab;   // word -> row
  std::vector<double> vectors;                  // row-major, words.size() x dim
  std::vector<std::int64_t> counts;             // row -> training frequency (0 when loaded)
  std::optional<TrainingConfig> hyperparams;    // set when trained

  std::span<const double> vector_of(int row) const {
    return {vectors.data() + static_cast<std::size_t>(row) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::optional<int> row_of(std::string_view word) const;
  std::size_t size() const { return words.size(); }
};

/// Trains word vectors with a single hidden layer and negative sampling.
/// For each positive (center, context) pair the objective maximizes
/// log s(u_o . v_c) + sum_k log s(-u_k . v_c) with v the input table and u
/// the output table; negatives are drawn from the unigram distribution
/// raised to 3/4. The learning rate decays linearly from initial_lr to
/// initial_lr / 10000 over all scheduled pairs. Exported vectors are the
/// input table.
EmbeddingModel train(const std::vector<std::vector<std::string>>& corpus_tokens,
                     const TrainingConfig& config, const TrainOptions& options = {},
                     TrainStats* stats = nullptr);

/// word2vec text format: header "V D", then V rows "word f1 ... fD".
EmbeddingModel load_word2vec_text(const std::string& path);

/// Writes the model in word2vec text format with 8 significant digits,
/// space separators and \n line endings.
void save_word2vec_text(const EmbeddingModel& model, const std::string& path);

/// Mean of the vectors of in-vocabulary tokens, duplicates counted with
/// multiplicity. Summation runs in vocabulary-row order, so the result is
/// exactly invariant under token permutation. Absent when no token is in
/// the vocabulary.
std::optional<std::vector<double>> comment_vector(const EmbeddingModel& model,
                                                  const std::vector<std::string>& tokens);

/// Negative-sampling loss for one pair: -log s(c.p) - sum_k log s(-c.n_k),
/// where c is the hidden vector (input vector of the center for skip-gram,
/// context mean for CBOW) and p/n_k are output vectors. Public so tests can
/// check the analytic gradients against finite differences.
double pair_loss(std::span<const double> hidden, std::span<const double> positive,
                 std::span<const std::vector<double>> negatives);

struct PairGradients {
  double loss = 0.0;
  std::vector<double> d_hidden;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

PairGradients pair_gradients(std::span<const double> hidden,
                             std::span<const double> positive,
                             std::span<const std::vector<double>> negatives);

}  // namespace pulse::embedding
