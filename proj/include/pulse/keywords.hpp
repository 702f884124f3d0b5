#pragma once

#include <string>
#include <vector>

#include "pulse/corpus.hpp"
#include "pulse/grouping.hpp"

namespace pulse::keywords {

/// Word co-occurrence graph over one group's tokens. Undirected: the
/// neighbor lists store each co-occurrence as two directed arcs, so
/// |Out(j)| is the degree of j.
struct TermGraph {
  std::vector<std::string> terms;           // distinct, first-seen order
  std::vector<std::vector<int>> neighbors;  // sorted, no self-loops, symmetric
};

struct TextRankResult {
  std::vector<double> scores;  // aligned with TermGraph::terms
  int iterations = 0;
  bool converged = false;
};

struct Tag {
  std::string term;
  double score;
};

/// Ranked tags for one group, descending by score with lexicographic
/// tie-break on the term.
struct TagAssignment {
  int group_id = 0;
  std::vector<Tag> tags;
};

struct KeywordParams {
  int window = 2;         // co-occurrence distance in token positions
  double damping = 0.85;
  double epsilon = 1e-4;  // max per-term change to declare convergence
  int max_iter = 100;
  int tag_cap = 5;
};

/// Joins two distinct terms iff they co-occur within `window` positions in
/// at least one token sequence. Edges are unweighted.
TermGraph build_term_graph(const std::vector<std::vector<std::string>>& group_tokens,
                           int window);

/// Synchronous iteration of S(V_i) = (1 - d) + d * sum_{j in In(V_i)}
/// S(V_j) / |Out(V_j)| from all-ones until the max per-term change drops
/// below epsilon or max_iter is reached. Isolated terms converge to 1 - d.
TextRankResult textrank(const TermGraph& graph, double damping, double epsilon,
                        int max_iter);

/// Ranks the group's terms with textrank and keeps the top
/// min(tag_cap, ceil(|terms| / 3)). Groups with fewer than two distinct
/// tokens fall back to raw term frequency; empty-token groups get an empty
/// tag list plus a warning.
TagAssignment assign_tags(const grouping::Group& group, const corpus::Corpus& corpus,
                          const KeywordParams& params,
                          std::vector<std::string>* warnings = nullptr);

}  // namespace pulse::keywords
