#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mvinf/graph.hpp"

namespace mvinf {

/// Node importance: row sums of the shared factor.
Eigen::VectorXd importance(const Eigen::MatrixXd& theta);

struct RankEntry {
    int rank = 0; // competition ranking: ties share the smallest rank
    std::string id;
    double score = 0.0;
};

/// Score table sorted by descending score; ties share a rank (1, 2, 2, 4)
/// and are ordered by node id within a tie. `top` < 0 keeps every row.
std::vector<RankEntry> rank_table(const Eigen::VectorXd& scores,
                                  const NodeRegistry& registry, int top = -1);

/// Nodes at or above the q-th percentile of `scores` (nearest-rank: the
/// threshold is the ascending-sorted score at zero-based index
/// floor(q n / 100)). q = 0 keeps everyone; q in [0, 100).
std::vector<int> percentile_subgraph_nodes(const Eigen::VectorXd& scores, double q);

/// The induced subgraph view on those nodes, plus their ids.
struct SubgraphResult {
    std::vector<int> node_indices;
    std::vector<std::string> node_ids;
    NetworkView view; // adjacency restricted to the kept nodes, original order
    double threshold = 0.0;
};

SubgraphResult percentile_subgraph(const NetworkView& view, const NodeRegistry& registry,
                                   const Eigen::VectorXd& scores, double q);

} // namespace mvinf
