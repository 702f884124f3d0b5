#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pulse/similarity.hpp"

namespace pulse::grouping {

struct Edge {
  std::string a;  // lexicographically smaller id
  std::string b;
  double score;
};

/// Thresholded undirected comment graph: comments as nodes, relevancy
/// scores at or above the threshold as edges.
struct RelevancyGraph {
  std::vector<std::string> nodes;  // sorted, unique
  std::vector<Edge> edges;         // canonical pairs, sorted by (a, b)
  double threshold = 0.0;
};

/// One connected component. Tags are assigned separately by the keywords
/// module and paired with groups in the analysis bundle.
struct Group {
  int id = 0;
  std::vector<std::string> member_ids;  // sorted
};

/// Keeps the scores with score >= threshold (inclusive) between the given
/// nodes. `node_ids` must be the ids that have a defined comment vector;
/// callers report vector-less ids separately. Throws ValidationError when
/// the threshold is outside [0, 1] or an edge endpoint is unknown.
RelevancyGraph build_graph(const std::vector<similarity::RelevancyScore>& scores,
                           const std::vector<std::string>& node_ids, double threshold);

/// Maximal connected components, ordered by descending member count with
/// ties broken by smallest member id; group ids are 0..k-1 in that order.
std::vector<Group> connected_components(const RelevancyGraph& graph);

/// Optional exports: edges as CSV (`a,b,score`) and groups as JSON
/// (`[{"id": ..., "members": [...]}]`).
void write_edges_csv(const RelevancyGraph& graph, std::ostream& out);
void write_groups_json(const std::vector<Group>& groups, std::ostream& out);

}  // namespace pulse::grouping
