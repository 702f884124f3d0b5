#include "pulse/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "pulse/errors.hpp"

namespace pulse::embedding {

namespace {

// splitmix64. The standard library distributions are not pinned across
// implementations, so all randomness is generated from this.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

constexpr std::uint64_t kInitStream = 0x5eed0001;
constexpr std::uint64_t kSubsampleStream = 0x5eed0002;
constexpr std::uint64_t kNegativeStream = 0x5eed0003;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (b * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL));
  return r.next();
}
std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(a, b), c);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double dot(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += a[d] * b[d];
  return s;
}

struct Vocab {
  std::vector<std::string> words;  // count desc, ties lexicographic
  std::unordered_map<std::string, int> index;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
};

Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_count) {
  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& sent : corpus)
    for (const auto& tok : sent) ++freq[tok];

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [word, count] : freq)
    if (count >= min_count) kept.emplace_back(word, count);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab v;
  for (auto& [word, count] : kept) {
    v.index.emplace(word, static_cast<int>(v.words.size()));
    v.words.push_back(word);
    v.counts.push_back(count);
    v.total += count;
  }
  return v;
}

// Shared state for one training run.
struct Trainer {
  TrainingConfig cfg;
  Vocab vocab;
  std::vector<std::vector<int>> sents;   // in-vocabulary rows only
  std::vector<double> keep_prob;         // subsampling survival per row
  std::vector<double> cum_unigram;       // cumulative counts^(3/4)
  std::vector<double> input;             // exported vectors
  std::vector<double> output;
  std::uint64_t total_pairs = 0;
  double min_lr = 0.0;
  std::atomic<std::uint64_t> pair_counter{0};

  double* input_row(int r) { return input.data() + static_cast<std::size_t>(r) * cfg.dim; }
  double* output_row(int r) { return output.data() + static_cast<std::size_t>(r) * cfg.dim; }

  double lr_at(std::uint64_t t) const {
    if (total_pairs <= 1) return cfg.initial_lr;
    const double frac = static_cast<double>(t) / static_cast<double>(total_pairs - 1);
    return cfg.initial_lr + (min_lr - cfg.initial_lr) * frac;
  }

  // Subsampled view of sentence s for a given epoch. The per-(epoch,
  // sentence) seed makes the schedule identical in the counting pass, in
  // deterministic training and in every parallel partition.
  void subsampled(int epoch, std::size_t s, std::vector<int>& out) const {
    out.clear();
    Rng rng(mix(static_cast<std::uint64_t>(cfg.seed) ^ kSubsampleStream, epoch, s));
    for (int w : sents[s]) {
      if (keep_prob[w] >= 1.0 || rng.uniform() < keep_prob[w]) out.push_back(w);
    }
  }

  std::uint64_t pairs_in(const std::vector<int>& kept) const {
    const int m = static_cast<int>(kept.size());
    if (m < 2) return 0;
    if (cfg.mode == Mode::kCbow) return m;  // one pair per center position
    std::uint64_t n = 0;
    for (int i = 0; i < m; ++i) {
      const int lo = std::max(0, i - cfg.window);
      const int hi = std::min(m - 1, i + cfg.window);
      n += static_cast<std::uint64_t>(hi - lo);  // excludes the center itself
    }
    return n;
  }

  int sample_unigram(Rng& rng) const {
    const double u = rng.uniform() * cum_unigram.back();
    const auto it = std::upper_bound(cum_unigram.begin(), cum_unigram.end(), u);
    const auto idx = static_cast<std::size_t>(it - cum_unigram.begin());
    return static_cast<int>(std::min(idx, cum_unigram.size() - 1));
  }

  // One negative-sampling step around the hidden vector. Gradients w.r.t.
  // the hidden vector accumulate into grad_h using pre-update output rows;
  // the caller applies them to the input table. Returns the pair loss.
  double step(const double* hidden, int positive_row, int negative_count, double lr,
              Rng& neg_rng, double* grad_h) {
    const int dim = cfg.dim;
    std::fill(grad_h, grad_h + dim, 0.0);
    double loss = 0.0;

    double* pos = output_row(positive_row);
    double s = dot(hidden, pos, dim);
    loss -= log_sigmoid(s);
    double g = sigmoid(s) - 1.0;
    for (int d = 0; d < dim; ++d) grad_h[d] += g * pos[d];
    for (int d = 0; d < dim; ++d) pos[d] -= lr * g * hidden[d];

    for (int k = 0; k < negative_count; ++k) {
      const int target = sample_unigram(neg_rng);
      if (target == positive_row) continue;  // classic skip
      double* neg = output_row(target);
      s = dot(hidden, neg, dim);
      loss -= log_sigmoid(-s);
      g = sigmoid(s);
      for (int d = 0; d < dim; ++d) grad_h[d] += g * neg[d];
      for (int d = 0; d < dim; ++d) neg[d] -= lr * g * hidden[d];
    }
    return loss;
  }

  // Trains sentences [begin, end) of one epoch. Returns (loss sum, pairs).
  std::pair<double, std::uint64_t> train_block(int epoch, std::size_t begin,
                                               std::size_t end, Rng& neg_rng) {
    const int dim = cfg.dim;
    std::vector<int> kept;
    std::vector<double> grad_h(dim), hidden(dim);
    double loss = 0.0;
    std::uint64_t pairs = 0;

    for (std::size_t s = begin; s < end; ++s) {
      subsampled(epoch, s, kept);
      const int m = static_cast<int>(kept.size());
      if (m < 2) continue;
      for (int i = 0; i < m; ++i) {
        const int lo = std::max(0, i - cfg.window);
        const int hi = std::min(m - 1, i + cfg.window);
        if (cfg.mode == Mode::kSkipGram) {
          double* center = input_row(kept[i]);
          for (int j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const double lr = lr_at(pair_counter.fetch_add(1, std::memory_order_relaxed));
            loss += step(center, kept[j], cfg.negative, lr, neg_rng, grad_h.data());
            for (int d = 0; d < dim; ++d) center[d] -= lr * grad_h[d];
            ++pairs;
          }
        } else {
          const int ctx = hi - lo;  // context size, >= 1 since m >= 2
          std::fill(hidden.begin(), hidden.end(), 0.0);
          for (int j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const double* v = input_row(kept[j]);
            for (int d = 0; d < dim; ++d) hidden[d] += v[d];
          }
          for (int d = 0; d < dim; ++d) hidden[d] /= ctx;
          const double lr = lr_at(pair_counter.fetch_add(1, std::memory_order_relaxed));
          loss += step(hidden.data(), kept[i], cfg.negative, lr, neg_rng, grad_h.data());
          for (int j = lo; j <= hi; ++j) {
            if (j == i) continue;
            double* v = input_row(kept[j]);
            for (int d = 0; d < dim; ++d) v[d] -= lr * grad_h[d] / ctx;
          }
          ++pairs;
        }
      }
    }
    return {loss, pairs};
  }
};

void validate(const TrainingConfig& cfg) {
  if (cfg.dim < 1) throw ValidationError("dim must be >= 1");
  if (cfg.window < 1) throw ValidationError("window must be >= 1");
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(cfg.initial_lr > 0)) throw ValidationError("initial_lr must be > 0");
  if (cfg.negative < 0) throw ValidationError("negative must be >= 0");
  if (cfg.min_count < 1) throw ValidationError("min_count must be >= 1");
  if (cfg.subsample_t < 0) throw ValidationError("subsample_t must be >= 0");
}

}  // namespace

std::optional<int> EmbeddingModel::row_of(std::string_view word) const {
  const auto it = vocab.find(std::string(word));
  if (it == vocab.end()) return std::nullopt;
  return it->second;
}

EmbeddingModel train(const std::vector<std::vector<std::string>>& corpus_tokens,
                     const TrainingConfig& config, const TrainOptions& options,
                     TrainStats* stats) {
  validate(config);
  if (corpus_tokens.empty()) throw ValidationError("empty training corpus");

  Trainer t;
  t.cfg = config;
  t.vocab = build_vocab(corpus_tokens, config.min_count);
  if (t.vocab.words.empty()) {
    throw ValidationError("vocabulary empty after min_count filtering (min_count=" +
                          std::to_string(config.min_count) + ")");
  }
  t.min_lr = config.initial_lr / 10000.0;

  t.sents.reserve(corpus_tokens.size());
  for (const auto& sent : corpus_tokens) {
    std::vector<int> rows;
    rows.reserve(sent.size());
    for (const auto& tok : sent) {
      const auto it = t.vocab.index.find(tok);
      if (it != t.vocab.index.end()) rows.push_back(it->second);
    }
    t.sents.push_back(std::move(rows));
  }

  const std::size_t n = t.vocab.words.size();
  t.keep_prob.resize(n, 1.0);
  if (config.subsample_t > 0) {
    const double tn = config.subsample_t * static_cast<double>(t.vocab.total);
    for (std::size_t r = 0; r < n; ++r) {
      const double f = static_cast<double>(t.vocab.counts[r]);
      t.keep_prob[r] = std::min(1.0, (std::sqrt(f / tn) + 1.0) * tn / f);
    }
  }
  t.cum_unigram.resize(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += std::pow(static_cast<double>(t.vocab.counts[r]), 0.75);
    t.cum_unigram[r] = acc;
  }

  // Count the schedule so the decay endpoint is exact.
  std::vector<int> kept;
  for (int e = 0; e < config.epochs; ++e)
    for (std::size_t s = 0; s < t.sents.size(); ++s) {
      t.subsampled(e, s, kept);
      t.total_pairs += t.pairs_in(kept);
    }

  const int dim = config.dim;
  t.input.resize(n * static_cast<std::size_t>(dim));
  t.output.assign(n * static_cast<std::size_t>(dim), 0.0);
  Rng init_rng(mix(static_cast<std::uint64_t>(config.seed), kInitStream));
  for (auto& x : t.input) x = (init_rng.uniform() - 0.5) / dim;

  unsigned workers = options.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : options.threads;
  if (options.deterministic) workers = 1;

  std::vector<double> epoch_loss;
  Rng det_neg_rng(mix(static_cast<std::uint64_t>(config.seed), kNegativeStream));
  for (int e = 0; e < config.epochs; ++e) {
    double loss_sum = 0.0;
    std::uint64_t pairs = 0;
    if (workers <= 1) {
      auto [loss, p] = t.train_block(e, 0, t.sents.size(), det_neg_rng);
      loss_sum = loss;
      pairs = p;
    } else {
      std::vector<std::thread> pool;
      std::vector<std::pair<double, std::uint64_t>> results(workers);
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = t.sents.size() * w / workers;
        const std::size_t end = t.sents.size() * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
          Rng rng(mix(static_cast<std::uint64_t>(config.seed) ^ kNegativeStream, e, w));
          results[w] = t.train_block(e, begin, end, rng);
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& [loss, p] : results) {
        loss_sum += loss;
        pairs += p;
      }
    }
    epoch_loss.push_back(pairs == 0 ? 0.0 : loss_sum / static_cast<double>(pairs));
  }

  EmbeddingModel model;
  model.dim = dim;
  model.words = std::move(t.vocab.words);
  model.vocab = std::move(t.vocab.index);
  model.counts = std::move(t.vocab.counts);
  model.vectors = std::move(t.input);
  model.hyperparams = config;
  if (stats) {
    stats->epoch_mean_loss = std::move(epoch_loss);
    stats->total_pairs = t.total_pairs;
  }
  return model;
}

EmbeddingModel load_word2vec_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vector file: " + path);

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream header(line);
  long long vocab_size = -1, dim = -1;
  if (!(header >> vocab_size >> dim) || vocab_size < 0 || dim < 1) {
    throw ParseError("header must be `vocab_size dim`", 1);
  }
  std::string extra;
  if (header >> extra) throw ParseError("header must be `vocab_size dim`", 1);

  EmbeddingModel model;
  model.dim = static_cast<int>(dim);
  model.vectors.reserve(static_cast<std::size_t>(vocab_size) * dim);
  for (long long r = 0; r < vocab_size; ++r) {
    if (!std::getline(in, line)) {
      throw ParseError("declared " + std::to_string(vocab_size) + " words but file ends",
                       lineno + 1);
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    // word, then exactly dim decimal components, whitespace separated
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos) throw ParseError("empty row", lineno);
    const std::size_t word_end = line.find_first_of(" \t", i);
    if (word_end == std::string::npos) throw ParseError("row has no vector components", lineno);
    std::string word = line.substr(i, word_end - i);
    i = word_end;

    int comps = 0;
    while (true) {
      i = line.find_first_not_of(" \t", i);
      if (i == std::string::npos) break;
      const std::size_t end = std::min(line.find_first_of(" \t", i), line.size());
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + end, value);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw ParseError("invalid vector component `" + line.substr(i, end - i) + "`",
                         lineno);
      }
      if (!std::isfinite(value)) throw ParseError("non-finite vector component", lineno);
      if (comps < model.dim) model.vectors.push_back(value);
      ++comps;
      i = end;
    }
    if (comps != model.dim) {
      throw ParseError("expected " + std::to_string(model.dim) + " components, got " +
                       std::to_string(comps), lineno);
    }
    if (!model.vocab.emplace(word, static_cast<int>(model.words.size())).second) {
      throw ValidationError("duplicate word in vector file: " + word);
    }
    model.words.push_back(std::move(word));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError("unexpected content after declared rows", lineno);
    }
  }
  model.counts.assign(model.words.size(), 0);
  return model;
}

void save_word2vec_text(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << model.size() << ' ' << model.dim << '\n';
  char buf[64];
  for (std::size_t r = 0; r < model.size(); ++r) {
    out << model.words[r];
    const auto row = model.vector_of(static_cast<int>(r));
    for (const double x : row) {
      std::snprintf(buf, sizeof buf, "%.8g", x);
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::optional<std::vector<double>> comment_vector(const EmbeddingModel& model,
                                                  const std::vector<std::string>& tokens) {
  std::vector<int> rows;
  rows.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (const auto row = model.row_of(tok)) rows.push_back(*row);
  }
  if (rows.empty()) return std::nullopt;
  std::sort(rows.begin(), rows.end());
  std::vector<double> v(model.dim, 0.0);
  for (const int r : rows) {
    const auto row = model.vector_of(r);
    for (int d = 0; d < model.dim; ++d) v[d] += row[d];
  }
  for (double& x : v) x /= static_cast<double>(rows.size());
  return v;
}

double pair_loss(std::span<const double> hidden, std::span<const double> positive,
                 std::span<const std::vector<double>> negatives) {
  double loss = -log_sigmoid(dot(hidden.data(), positive.data(), static_cast<int>(hidden.size())));
  for (const auto& neg : negatives) {
    loss -= log_sigmoid(-dot(hidden.data(), neg.data(), static_cast<int>(hidden.size())));
  }
  return loss;
}

PairGradients pair_gradients(std::span<const double> hidden,
                             std::span<const double> positive,
                             std::span<const std::vector<double>> negatives) {
  const int dim = static_cast<int>(hidden.size());
  PairGradients out;
  out.d_hidden.assign(dim, 0.0);
  out.d_positive.assign(dim, 0.0);

  double s = dot(hidden.data(), positive.data(), dim);
  out.loss = -log_sigmoid(s);
  double g = sigmoid(s) - 1.0;
  for (int d = 0; d < dim; ++d) {
    out.d_hidden[d] += g * positive[d];
    out.d_positive[d] = g * hidden[d];
  }
  for (const auto& neg : negatives) {
    s = dot(hidden.data(), neg.data(), dim);
    out.loss -= log_sigmoid(-s);
    g = sigmoid(s);
    std::vector<double> dn(dim);
    for (int d = 0; d < dim; ++d) {
      out.d_hidden[d] += g * neg[d];
      dn[d] = g * hidden[d];
    }
    out.d_negatives.push_back(std::move(dn));
  }
  return out;
}

}  // namespace pulse::embedding
