// Acceptance suite: every release-gating property of the analysis engine,
// one pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../helpers.hpp"
#include "pulse/corpus.hpp"
#include "pulse/embedding.hpp"
#include "pulse/grouping.hpp"
#include "pulse/insights.hpp"
#include "pulse/keywords.hpp"
#include "pulse/pipeline.hpp"
#include "pulse/similarity.hpp"

using namespace pulse;
using nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Context {
  testutil::TempDir tmp;
  std::string data_dir = PULSE_DATA_DIR;
  std::string cli = PULSE_CLI_BIN;
  embedding::EmbeddingModel model;       // trained by criterion 5
  embedding::TrainStats train_stats;
  std::string model_path;                // written by criterion 5
  std::string bundle_path;               // written by criterion 6
};

keywords::TermGraph graph_of(int n, const std::set<std::pair<int, int>>& edges) {
  keywords::TermGraph g;
  for (int i = 0; i < n; ++i) g.terms.push_back("t" + std::to_string(i));
  g.neighbors.resize(n);
  for (const auto& [a, b] : edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& nbrs : g.neighbors) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

// ---- criterion 1: hand-solved TextRank fixed points, < 1 s -------------

void criterion_fixed_points(Context&) {
  const auto start = std::chrono::steady_clock::now();

  const auto pairg = graph_of(2, {{0, 1}});
  const auto pr = keywords::textrank(pairg, 0.85, 1e-12, 10000);
  require(std::abs(pr.scores[0] - 1.0) < 1e-6 && std::abs(pr.scores[1] - 1.0) < 1e-6,
          "mutually linked pair must converge to 1.0, got " + fmt(pr.scores[0]));

  const auto ring = graph_of(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  const auto rr = keywords::textrank(ring, 0.85, 1e-12, 10000);
  for (int i = 1; i < 5; ++i) {
    require(std::abs(rr.scores[i] - rr.scores[0]) < 1e-9,
            "5-ring scores must be equal, got " + fmt(rr.scores[i]) + " vs " +
                fmt(rr.scores[0]));
  }

  const auto star = graph_of(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto sr = keywords::textrank(star, 0.85, 1e-12, 10000);
  require(std::abs(sr.scores[0] - 1.9189) < 1e-3,
          "star hub must be ~1.9189, got " + fmt(sr.scores[0]));
  for (int leaf = 1; leaf <= 3; ++leaf) {
    require(std::abs(sr.scores[leaf] - 0.6937) < 1e-3,
            "star leaf must be ~0.6937, got " + fmt(sr.scores[leaf]));
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 1.0, "fixed points took " + fmt(secs) + " s, limit 1 s");
}

// ---- criterion 2: iterative scores vs dense power-iteration oracle -----

void criterion_textrank_oracle(Context&) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 199);
    std::set<std::pair<int, int>> edges;
    const int want = static_cast<int>(rng() % (3 * n));
    for (int k = 0; k < want; ++k) {
      const int a = static_cast<int>(rng() % n);
      const int b = static_cast<int>(rng() % n);
      if (a != b) edges.emplace(std::min(a, b), std::max(a, b));
    }
    const auto g = graph_of(n, edges);
    const auto r = keywords::textrank(g, 0.85, 1e-4, 100);
    require(r.converged, "graph with " + std::to_string(n) +
                             " nodes did not converge within 100 iterations");

    // Dense route: same recurrence through an explicit matrix.
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
      for (const int i : g.neighbors[j]) {
        m[i][j] = 1.0 / static_cast<double>(g.neighbors[j].size());
      }
    }
    std::vector<double> s(n, 1.0), next(n);
    for (int iter = 0; iter < 100; ++iter) {
      double change = 0.0;
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += m[i][j] * s[j];
        next[i] = 0.15 + 0.85 * acc;
        change = std::max(change, std::abs(next[i] - s[i]));
      }
      s.swap(next);
      if (change < 1e-4) break;
    }
    for (int i = 0; i < n; ++i) {
      require(std::abs(r.scores[i] - s[i]) < 1e-6,
              "trial " + std::to_string(trial) + ": score " + fmt(r.scores[i]) +
                  " vs oracle " + fmt(s[i]));
    }
  }
}

// ---- criterion 3: connected components vs reachability; monotonicity ---

void criterion_components_oracle(Context&) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 49);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(100 + i));
    std::vector<similarity::RelevancyScore> scores;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 10 == 0) scores.push_back({ids[i], ids[j], 0.9});

    const auto graph = grouping::build_graph(scores, ids, 0.5);
    const auto groups = grouping::connected_components(graph);

    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) reach[i][i] = true;
    const auto index_of = [&](const std::string& id) {
      return static_cast<int>(std::lower_bound(graph.nodes.begin(), graph.nodes.end(),
                                               id) -
                              graph.nodes.begin());
    };
    for (const auto& e : graph.edges) {
      reach[index_of(e.a)][index_of(e.b)] = true;
      reach[index_of(e.b)][index_of(e.a)] = true;
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;

    std::set<std::set<std::string>> oracle;
    for (int i = 0; i < n; ++i) {
      std::set<std::string> part;
      for (int j = 0; j < n; ++j)
        if (reach[i][j]) part.insert(graph.nodes[j]);
      oracle.insert(std::move(part));
    }
    std::set<std::set<std::string>> got;
    for (const auto& g : groups)
      got.insert({g.member_ids.begin(), g.member_ids.end()});
    require(got == oracle, "trial " + std::to_string(trial) +
                               ": partition differs from reachability oracle");
  }

  // Threshold monotonicity over 10 nested thresholds on 20 random score sets.
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 29);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(100 + i));
    std::vector<similarity::RelevancyScore> scores;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 3 == 0)
          scores.push_back({ids[i], ids[j], static_cast<double>(rng() % 1001) / 1000.0});

    std::vector<grouping::Group> prev;
    std::size_t prev_count = 1;
    for (int step = 0; step <= 10; ++step) {
      const auto groups =
          grouping::connected_components(grouping::build_graph(scores, ids, step / 10.0));
      require(groups.size() >= prev_count, "group count must not decrease");
      for (const auto& g : groups) {
        if (prev.empty()) break;
        bool contained = false;
        for (const auto& p : prev) {
          if (std::includes(p.member_ids.begin(), p.member_ids.end(),
                            g.member_ids.begin(), g.member_ids.end())) {
            contained = true;
            break;
          }
        }
        require(contained, "tighter partition must refine the looser one");
      }
      prev = groups;
      prev_count = groups.size();
    }
  }
}

// ---- criterion 4: analytic gradients vs central finite differences -----

void criterion_gradients(Context&) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-5, tol = 1e-4;

  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 15);
    const int negatives = static_cast<int>(rng() % 6);
    std::vector<double> hidden(dim), positive(dim);
    std::vector<std::vector<double>> negs(negatives, std::vector<double>(dim));
    for (auto& x : hidden) x = gauss(rng);
    for (auto& x : positive) x = gauss(rng);
    for (auto& nv : negs)
      for (auto& x : nv) x = gauss(rng);

    const auto grads = embedding::pair_gradients(hidden, positive, negs);
    const auto check_vec = [&](std::vector<double>& vec,
                               const std::vector<double>& analytic, const char* what) {
      for (int d = 0; d < dim; ++d) {
        const double saved = vec[d];
        vec[d] = saved + h;
        const double up = embedding::pair_loss(hidden, positive, negs);
        vec[d] = saved - h;
        const double down = embedding::pair_loss(hidden, positive, negs);
        vec[d] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic[d])});
        require(std::abs(numeric - analytic[d]) / scale < tol,
                std::string(what) + " gradient off: analytic " + fmt(analytic[d]) +
                    " vs numeric " + fmt(numeric));
      }
    };
    check_vec(hidden, grads.d_hidden, "hidden");
    check_vec(positive, grads.d_positive, "positive");
    for (std::size_t k = 0; k < negs.size(); ++k) {
      check_vec(negs[k], grads.d_negatives[k], "negative");
    }
  }
}

// ---- criterion 5: embedding semantics on the bundled corpus, < 60 s ----

void criterion_embedding_semantics(Context& ctx) {
  const auto start = std::chrono::steady_clock::now();

  std::ifstream in(ctx.data_dir + "/synthetic_sentences.txt");
  require(static_cast<bool>(in), "bundled synthetic_sentences.txt missing");
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream split(line);
    std::vector<std::string> toks;
    std::string tok;
    while (split >> tok) toks.push_back(tok);
    if (!toks.empty()) sentences.push_back(std::move(toks));
  }
  require(sentences.size() == 2000, "expected 2000 bundled sentences, got " +
                                        std::to_string(sentences.size()));

  embedding::TrainingConfig cfg;
  cfg.mode = embedding::Mode::kSkipGram;
  cfg.dim = 50;
  cfg.window = 5;
  cfg.negative = 5;
  cfg.epochs = 5;
  cfg.seed = 42;
  cfg.min_count = 5;
  cfg.subsample_t = 0.0;  // desk-scale corpus: subsampling starves the counts
  ctx.model = embedding::train(sentences, cfg, {.deterministic = true}, &ctx.train_stats);

  const auto vec = [&](const char* w) {
    const auto row = ctx.model.row_of(w);
    require(row.has_value(), std::string("word missing from vocabulary: ") + w);
    const auto span = ctx.model.vector_of(*row);
    return std::vector<double>(span.begin(), span.end());
  };
  const double cat_dog = similarity::cosine(vec("cat"), vec("dog"));
  const double cat_bolt = similarity::cosine(vec("cat"), vec("bolt"));
  require(cat_dog > cat_bolt, "cosine(cat,dog)=" + fmt(cat_dog) +
                                  " must exceed cosine(cat,bolt)=" + fmt(cat_bolt));

  const auto& loss = ctx.train_stats.epoch_mean_loss;
  require(loss.size() == 5, "expected 5 epoch losses");
  for (std::size_t e = 1; e < loss.size(); ++e) {
    require(loss[e] <= loss[e - 1] * 1.01,
            "epoch loss increased beyond 1%: " + fmt(loss[e - 1]) + " -> " + fmt(loss[e]));
  }

  ctx.model_path = ctx.tmp.file("model.vec");
  embedding::save_word2vec_text(ctx.model, ctx.model_path);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 60.0, "training took " + fmt(secs) + " s, limit 60 s");
}

// ---- criterion 6: end-to-end planted-topic recovery via the CLI, < 10 s

void criterion_planted_topics(Context& ctx) {
  require(!ctx.model_path.empty(), "criterion 5 must have produced a model");
  const auto start = std::chrono::steady_clock::now();

  ctx.bundle_path = ctx.tmp.file("bundle.json");
  const auto run = testutil::run_cmd(ctx.cli + " analyze --input " + ctx.data_dir +
                                     "/synthetic_comments.csv --vectors " +
                                     ctx.model_path + " --out " + ctx.bundle_path +
                                     " --deterministic --seed 42");
  require(run.exit_code == 0, "analyze exited " + std::to_string(run.exit_code) + ": " +
                                  run.output);

  const auto bundle = insights::load_bundle(ctx.bundle_path);
  require(bundle.groups.size() >= 3, "expected >= 3 groups, got " +
                                         std::to_string(bundle.groups.size()));
  for (int g = 0; g < 3; ++g) {
    std::map<std::string, int> labels;
    for (const auto& id : bundle.groups[g].member_ids) labels[id.substr(0, 2)]++;
    int majority = 0;
    for (const auto& [label, count] : labels) majority = std::max(majority, count);
    const double purity =
        static_cast<double>(majority) / bundle.groups[g].member_ids.size();
    require(purity >= 0.90, "group " + std::to_string(g) + " purity " + fmt(purity) +
                                " below 0.90");
  }

  const auto query = testutil::run_cmd(ctx.cli + " query tag feedback --bundle " +
                                       ctx.bundle_path + " --format json");
  require(query.exit_code == 0, "query exited " + std::to_string(query.exit_code));
  const auto hits = json::parse(query.output);
  std::vector<std::string> got;
  for (const auto& c : hits) got.push_back(c.at("id").get<std::string>());
  std::vector<std::string> want;
  for (int i = 1; i <= 12; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "fb%02d", i);
    want.push_back(buf);
  }
  require(got == want, "`query tag feedback` returned " + std::to_string(got.size()) +
                           " comments, expected exactly the 12 planted ones");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 10.0, "end-to-end run took " + fmt(secs) + " s, limit 10 s");
}

// ---- criterion 7: byte-identical deterministic analyses ----------------

void criterion_determinism(Context& ctx) {
  require(!ctx.model_path.empty(), "criterion 5 must have produced a model");
  const auto out1 = ctx.tmp.file("det1.json");
  const auto out2 = ctx.tmp.file("det2.json");
  const std::string base = ctx.cli + " analyze --input " + ctx.data_dir +
                           "/synthetic_comments.csv --vectors " + ctx.model_path +
                           " --deterministic --seed 42 --out ";
  const auto r1 = testutil::run_cmd(base + out1);
  const auto r2 = testutil::run_cmd(base + out2);
  require(r1.exit_code == 0 && r2.exit_code == 0, "analyze runs must succeed");
  const auto b1 = testutil::read_file(out1);
  const auto b2 = testutil::read_file(out2);
  require(!b1.empty(), "first bundle is empty");
  require(b1 == b2, "deterministic bundles differ byte-wise");
}

// ---- criterion 8: query/report consistency ------------------------------

void criterion_consistency(Context& ctx) {
  require(!ctx.bundle_path.empty(), "criterion 6 must have produced a bundle");
  const auto bundle = insights::load_bundle(ctx.bundle_path);

  const auto freq = insights::tag_frequency(bundle);
  require(!freq.rows.empty(), "tag frequency report is empty");
  for (const auto& row : freq.rows) {
    const auto hits = insights::comments_by_tag(bundle, row.tag);
    require(static_cast<std::int64_t>(hits.size()) == row.comment_count,
            "tag '" + row.tag + "': report says " + std::to_string(row.comment_count) +
                ", query returns " + std::to_string(hits.size()));
  }
  for (const auto& row : insights::combination_report(bundle, 1000, 1000)) {
    const auto hits = insights::comments_by_combination(bundle, row.tags);
    require(static_cast<std::int64_t>(hits.size()) >= row.comment_count,
            "combination superset inequality violated");
  }
}

// ---- criterion 9: round-trips -------------------------------------------

void criterion_round_trips(Context& ctx) {
  require(!ctx.model_path.empty() && !ctx.bundle_path.empty(),
          "criteria 5 and 6 must have produced artifacts");

  const auto loaded = embedding::load_word2vec_text(ctx.model_path);
  require(loaded.words == ctx.model.words, "vocabulary changed across save/load");
  require(loaded.dim == ctx.model.dim, "dim changed across save/load");
  for (std::size_t i = 0; i < ctx.model.vectors.size(); ++i) {
    require(std::abs(loaded.vectors[i] - ctx.model.vectors[i]) < 1e-6,
            "vector component drifted beyond 1e-6 across save/load");
  }

  const auto bundle = insights::load_bundle(ctx.bundle_path);
  const auto resaved = ctx.tmp.file("resaved.json");
  insights::save_bundle(bundle, resaved);
  require(testutil::read_file(ctx.bundle_path) == testutil::read_file(resaved),
          "bundle load/save is not structurally stable");
}

}  // namespace

int main() {
  Context ctx;
  const std::vector<std::pair<const char*, std::function<void(Context&)>>> criteria{
      {"textrank fixed points (pair, 5-ring, star)", criterion_fixed_points},
      {"textrank matches dense power-iteration oracle", criterion_textrank_oracle},
      {"connected components match reachability; threshold monotone",
       criterion_components_oracle},
      {"negative-sampling gradients match finite differences", criterion_gradients},
      {"embedding semantics on bundled corpus", criterion_embedding_semantics},
      {"end-to-end planted-topic recovery", criterion_planted_topics},
      {"deterministic analyses are byte-identical", criterion_determinism},
      {"tag/combination reports consistent with queries", criterion_consistency},
      {"word2vec and bundle round-trips", criterion_round_trips},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criteria[i].second(ctx);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    if (error.empty()) {
      std::cout << "[PASS] " << i + 1 << ". " << criteria[i].first << " (" << timing
                << ")\n";
    } else {
      ++failures;
      std::cout << "[FAIL] " << i + 1 << ". " << criteria[i].first << " (" << timing
                << "): " << error << '\n';
    }
  }
  if (failures) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
