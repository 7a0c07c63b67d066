#include "mvinf/influence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mvinf {

Eigen::VectorXd importance(const Eigen::MatrixXd& theta) {
    return theta.rowwise().sum();
}

std::vector<RankEntry> rank_table(const Eigen::VectorXd& scores,
                                  const NodeRegistry& registry, int top) {
    int n = static_cast<int>(scores.size());
    if (registry.size() != n)
        throw ConfigError("rank table: " + std::to_string(n) + " scores for " +
                          std::to_string(registry.size()) + " nodes");
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return registry.id(a) < registry.id(b);
    });

    std::vector<RankEntry> out;
    out.reserve(static_cast<size_t>(n));
    int rank = 0;
    for (int pos = 0; pos < n; ++pos) {
        int i = idx[static_cast<size_t>(pos)];
        if (pos == 0 || scores(i) != scores(idx[static_cast<size_t>(pos - 1)]))
            rank = pos + 1;
        out.push_back({rank, registry.id(i), scores(i)});
    }
    if (top >= 0 && static_cast<int>(out.size()) > top)
        out.resize(static_cast<size_t>(top));
    return out;
}

std::vector<int> percentile_subgraph_nodes(const Eigen::VectorXd& scores, double q) {
    if (q < 0.0 || q >= 100.0) throw ConfigError("percentile must lie in [0, 100)");
    int n = static_cast<int>(scores.size());
    std::vector<int> keep;
    if (n == 0) return keep;
    std::vector<double> sorted(scores.data(), scores.data() + n);
    std::sort(sorted.begin(), sorted.end());
    auto pos = static_cast<size_t>(std::floor(q * n / 100.0 + 1e-9));
    if (pos >= static_cast<size_t>(n)) pos = static_cast<size_t>(n) - 1;
    double threshold = sorted[pos];
    for (int i = 0; i < n; ++i)
        if (scores(i) >= threshold) keep.push_back(i);
    return keep;
}

SubgraphResult percentile_subgraph(const NetworkView& view, const NodeRegistry& registry,
                                   const Eigen::VectorXd& scores, double q) {
    if (scores.size() != view.adj.rows())
        throw ConfigError("percentile subgraph: score length does not match view size");
    SubgraphResult r;
    r.node_indices = percentile_subgraph_nodes(scores, q);
    int m = static_cast<int>(r.node_indices.size());
    {
        std::vector<double> sorted(scores.data(), scores.data() + scores.size());
        std::sort(sorted.begin(), sorted.end());
        auto pos = static_cast<size_t>(std::floor(q * scores.size() / 100.0 + 1e-9));
        if (!sorted.empty()) {
            if (pos >= sorted.size()) pos = sorted.size() - 1;
            r.threshold = sorted[pos];
        }
    }
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", q);
        r.view.name = view.name + "_p" + buf;
    }
    r.view.kind = view.kind;
    r.view.adj = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
        r.node_ids.push_back(registry.id(r.node_indices[static_cast<size_t>(a)]));
        for (int b = 0; b < m; ++b)
            r.view.adj(a, b) = view.adj(r.node_indices[static_cast<size_t>(a)],
                                        r.node_indices[static_cast<size_t>(b)]);
    }
    return r;
}

} // namespace mvinf
