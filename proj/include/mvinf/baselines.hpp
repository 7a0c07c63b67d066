#pragma once

#include <Eigen/Dense>

#include "mvinf/graph.hpp"

namespace mvinf {

struct PageRankConfig {
    double damping = 0.85;
    double tol = 1e-12; // L1 change between sweeps
    int max_iters = 1000;
};

/// PageRank by power iteration. Transition probability out of i is
/// proportional to edge weight; nodes without out-edges redistribute
/// uniformly. Scores are nonnegative and sum to one.
Eigen::VectorXd pagerank(const NetworkView& view, const PageRankConfig& config = {});

struct HitsResult {
    Eigen::VectorXd authority; // unit L2 norm, nonnegative
    Eigen::VectorXd hub;       // unit L2 norm, nonnegative
    int iterations = 0;
    bool converged = false;
};

/// HITS by alternating power iteration: authority and hub scores are the
/// dominant eigenvectors of A^T A and A A^T. A view with no edges is a
/// NumericError.
HitsResult hits(const NetworkView& view, double tol = 1e-12, int max_iters = 1000);

} // namespace mvinf
