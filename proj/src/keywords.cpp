#include "pulse/keywords.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "pulse/errors.hpp"

namespace pulse::keywords {

TermGraph build_term_graph(const std::vector<std::vector<std::string>>& group_tokens,
                           int window) {
  if (window < 1) throw ValidationError("window must be >= 1");

  TermGraph g;
  std::unordered_map<std::string, int> index;
  const auto term_of = [&](const std::string& tok) {
    const auto [it, inserted] = index.emplace(tok, static_cast<int>(g.terms.size()));
    if (inserted) g.terms.push_back(tok);
    return it->second;
  };

  std::set<std::pair<int, int>> edges;
  for (const auto& tokens : group_tokens) {
    std::vector<int> seq;
    seq.reserve(tokens.size());
    for (const auto& tok : tokens) seq.push_back(term_of(tok));
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const std::size_t hi = std::min(seq.size(), i + static_cast<std::size_t>(window) + 1);
      for (std::size_t j = i + 1; j < hi; ++j) {
        if (seq[i] == seq[j]) continue;  // no self-loops
        edges.emplace(std::min(seq[i], seq[j]), std::max(seq[i], seq[j]));
      }
    }
  }

  g.neighbors.resize(g.terms.size());
  for (const auto& [a, b] : edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& nbrs : g.neighbors) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

TextRankResult textrank(const TermGraph& graph, double damping, double epsilon,
                        int max_iter) {
  if (damping < 0.0 || damping >= 1.0) {
    throw ValidationError("damping must be in [0, 1), got " + std::to_string(damping));
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (max_iter < 1) throw ValidationError("max_iter must be >= 1");

  const std::size_t n = graph.terms.size();
  TextRankResult result;
  result.scores.assign(n, 1.0);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  std::vector<double> next(n);
  for (int iter = 1; iter <= max_iter; ++iter) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const int j : graph.neighbors[i]) {
        sum += result.scores[j] / static_cast<double>(graph.neighbors[j].size());
      }
      next[i] = (1.0 - damping) + damping * sum;
      max_change = std::max(max_change, std::abs(next[i] - result.scores[i]));
    }
    result.scores.swap(next);
    result.iterations = iter;
    if (max_change < epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

TagAssignment assign_tags(const grouping::Group& group, const corpus::Corpus& corpus,
                          const KeywordParams& params,
                          std::vector<std::string>* warnings) {
  std::unordered_map<std::string, const corpus::Comment*> by_id;
  by_id.reserve(corpus.comments.size());
  for (const auto& c : corpus.comments) by_id.emplace(c.id, &c);

  std::vector<std::vector<std::string>> member_tokens;
  member_tokens.reserve(group.member_ids.size());
  for (const auto& id : group.member_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("unknown group member id: " + id);
    member_tokens.push_back(it->second->tokens);
  }

  std::map<std::string, std::int64_t> term_freq;
  for (const auto& tokens : member_tokens)
    for (const auto& tok : tokens) ++term_freq[tok];

  TagAssignment assignment;
  assignment.group_id = group.id;
  if (term_freq.empty()) {
    if (warnings) {
      warnings->push_back("group " + std::to_string(group.id) +
                          " has no usable tokens; no tags assigned");
    }
    return assignment;
  }

  std::vector<Tag> ranked;
  if (term_freq.size() < 2) {
    for (const auto& [term, count] : term_freq) {
      ranked.push_back({term, static_cast<double>(count)});
    }
  } else {
    const TermGraph graph = build_term_graph(member_tokens, params.window);
    const TextRankResult tr = textrank(graph, params.damping, params.epsilon,
                                       params.max_iter);
    ranked.reserve(graph.terms.size());
    for (std::size_t i = 0; i < graph.terms.size(); ++i) {
      ranked.push_back({graph.terms[i], tr.scores[i]});
    }
  }

  std::sort(ranked.begin(), ranked.end(), [](const Tag& x, const Tag& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.term < y.term;
  });
  const std::size_t want = std::min<std::size_t>(
      static_cast<std::size_t>(params.tag_cap),
      (ranked.size() + 2) / 3);  // ceil(|terms| / 3)
  ranked.resize(std::max<std::size_t>(1, want));
  assignment.tags = std::move(ranked);
  return assignment;
}

}  // namespace pulse::keywords
