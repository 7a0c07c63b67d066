#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mvinf/graph.hpp"

namespace mvinf {

enum class Statistic { clustering, betweenness, closeness, degree };

const char* to_string(Statistic s);
Statistic statistic_from_string(const std::string& s);

/// Distinct-neighbour degree (in or out, unweighted) or total strength
/// (incoming plus outgoing weight) when `weighted`.
Eigen::VectorXd degree(const NetworkView& view, bool weighted);

/// Local clustering coefficient on the symmetrised projection, where the
/// symmetric weight of {i,j} is max(w_ij, w_ji). Unweighted: triangles over
/// connected neighbour pairs. Weighted: the Barrat coefficient. Nodes with
/// fewer than two neighbours score 0.
Eigen::VectorXd clustering_coefficient(const NetworkView& view, bool weighted);

/// Directed betweenness centrality (Brandes), endpoints excluded. Weighted
/// views use edge distance 1/weight; binary views use hop counts. Results do
/// not depend on `threads`.
Eigen::VectorXd betweenness(const NetworkView& view, int threads = 1);

/// Harmonic closeness: mean of 1/d(i,j) over j != i, with 1/inf = 0.
/// Distances follow the same convention as betweenness.
Eigen::VectorXd closeness(const NetworkView& view, int threads = 1);

struct StatMatrix {
    Eigen::MatrixXd values; // n x D
    std::vector<std::string> columns;
    bool standardized = false;
};

/// Assemble the node-by-statistic matrix for a view, column order as given.
/// With `standardize`, columns are centred and scaled by the sample standard
/// deviation (ddof 1); constant columns become all zeros.
StatMatrix build_stat_matrix(const NetworkView& view,
                             const std::vector<Statistic>& stats,
                             bool standardize, int threads = 1);

} // namespace mvinf
