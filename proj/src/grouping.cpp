#include "pulse/grouping.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pulse/errors.hpp"

namespace pulse::grouping {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t size) : parent_(size), size_(size, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t u) {
    std::size_t root = u;
    while (root != parent_[root]) root = parent_[root];
    while (u != root) {  // path compression
      const std::size_t next = parent_[u];
      parent_[u] = root;
      u = next;
    }
    return root;
  }

  void unite(std::size_t u, std::size_t v) {
    std::size_t ru = find(u), rv = find(v);
    if (ru == rv) return;
    if (size_[ru] < size_[rv]) std::swap(ru, rv);
    parent_[rv] = ru;
    size_[ru] += size_[rv];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

RelevancyGraph build_graph(const std::vector<similarity::RelevancyScore>& scores,
                           const std::vector<std::string>& node_ids, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw ValidationError("threshold must be in [0, 1], got " + std::to_string(threshold));
  }
  RelevancyGraph graph;
  graph.threshold = threshold;
  graph.nodes = node_ids;
  std::sort(graph.nodes.begin(), graph.nodes.end());
  graph.nodes.erase(std::unique(graph.nodes.begin(), graph.nodes.end()), graph.nodes.end());

  const auto known = [&](const std::string& id) {
    return std::binary_search(graph.nodes.begin(), graph.nodes.end(), id);
  };
  for (const auto& s : scores) {
    if (s.score < threshold) continue;
    if (s.a == s.b) throw ValidationError("self-loop score for id: " + s.a);
    if (!known(s.a) || !known(s.b)) {
      throw ValidationError("score references unknown id: " + (known(s.a) ? s.b : s.a));
    }
    const bool ordered = s.a < s.b;
    graph.edges.push_back({ordered ? s.a : s.b, ordered ? s.b : s.a, s.score});
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return graph;
}

std::vector<Group> connected_components(const RelevancyGraph& graph) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) index.emplace(graph.nodes[i], i);

  UnionFind uf(graph.nodes.size());
  for (const auto& e : graph.edges) uf.unite(index.at(e.a), index.at(e.b));

  std::unordered_map<std::size_t, std::vector<std::string>> members;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    members[uf.find(i)].push_back(graph.nodes[i]);
  }

  std::vector<Group> groups;
  groups.reserve(members.size());
  for (auto& [root, ids] : members) {
    std::sort(ids.begin(), ids.end());
    groups.push_back({0, std::move(ids)});
  }
  std::sort(groups.begin(), groups.end(), [](const Group& x, const Group& y) {
    if (x.member_ids.size() != y.member_ids.size())
      return x.member_ids.size() > y.member_ids.size();
    return x.member_ids.front() < y.member_ids.front();
  });
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].id = static_cast<int>(i);
  return groups;
}

void write_edges_csv(const RelevancyGraph& graph, std::ostream& out) {
  out << "a,b,score\n";
  char buf[32];
  for (const auto& e : graph.edges) {
    std::snprintf(buf, sizeof buf, "%.6f", e.score);
    out << e.a << ',' << e.b << ',' << buf << '\n';
  }
}

void write_groups_json(const std::vector<Group>& groups, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : groups) {
    arr.push_back({{"id", g.id}, {"members", g.member_ids}});
  }
  out << arr.dump(2) << '\n';
}

}  // namespace pulse::grouping
