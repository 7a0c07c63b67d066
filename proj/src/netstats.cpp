#include "mvinf/netstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mvinf/parallel.hpp"

namespace mvinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kChunk = 64; // sources per parallel task; fixed so results do not depend on thread count

struct AdjList {
    std::vector<std::vector<std::pair<int, double>>> out; // (target, cost)
};

AdjList build_adjlist(const NetworkView& view) {
    int n = view.n();
    AdjList al;
    al.out.resize(static_cast<size_t>(n));
    bool weighted = view.kind == ViewKind::weighted;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double w = view.adj(i, j);
            if (w == 0.0) continue;
            al.out[static_cast<size_t>(i)].emplace_back(j, weighted ? 1.0 / w : 1.0);
        }
    return al;
}

struct Sssp {
    std::vector<double> dist;
    std::vector<double> sigma;            // shortest-path counts
    std::vector<std::vector<int>> preds;  // predecessors on shortest paths
    std::vector<int> order;               // settlement order
};

void sssp(const AdjList& al, int s, bool unit_costs, bool need_paths, Sssp& r) {
    int n = static_cast<int>(al.out.size());
    r.dist.assign(static_cast<size_t>(n), kInf);
    r.sigma.assign(static_cast<size_t>(n), 0.0);
    r.order.clear();
    if (need_paths) {
        r.preds.assign(static_cast<size_t>(n), {});
    }
    r.dist[static_cast<size_t>(s)] = 0.0;
    r.sigma[static_cast<size_t>(s)] = 1.0;

    if (unit_costs) {
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            r.order.push_back(v);
            for (auto [w, c] : al.out[static_cast<size_t>(v)]) {
                (void)c;
                double dv = r.dist[static_cast<size_t>(v)] + 1.0;
                if (r.dist[static_cast<size_t>(w)] == kInf) {
                    r.dist[static_cast<size_t>(w)] = dv;
                    q.push(w);
                }
                if (r.dist[static_cast<size_t>(w)] == dv) {
                    r.sigma[static_cast<size_t>(w)] += r.sigma[static_cast<size_t>(v)];
                    if (need_paths) r.preds[static_cast<size_t>(w)].push_back(v);
                }
            }
        }
        return;
    }

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<char> settled(static_cast<size_t>(n), 0);
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (settled[static_cast<size_t>(v)]) continue;
        settled[static_cast<size_t>(v)] = 1;
        r.order.push_back(v);
        for (auto [w, c] : al.out[static_cast<size_t>(v)]) {
            if (settled[static_cast<size_t>(w)]) continue;
            double nd = d + c;
            if (nd < r.dist[static_cast<size_t>(w)]) {
                r.dist[static_cast<size_t>(w)] = nd;
                r.sigma[static_cast<size_t>(w)] = r.sigma[static_cast<size_t>(v)];
                if (need_paths) {
                    r.preds[static_cast<size_t>(w)].clear();
                    r.preds[static_cast<size_t>(w)].push_back(v);
                }
                heap.emplace(nd, w);
            } else if (nd == r.dist[static_cast<size_t>(w)]) {
                r.sigma[static_cast<size_t>(w)] += r.sigma[static_cast<size_t>(v)];
                if (need_paths) r.preds[static_cast<size_t>(w)].push_back(v);
            }
        }
    }
}

} // namespace

const char* to_string(Statistic s) {
    switch (s) {
        case Statistic::clustering: return "clustering";
        case Statistic::betweenness: return "betweenness";
        case Statistic::closeness: return "closeness";
        case Statistic::degree: return "degree";
    }
    return "?";
}

Statistic statistic_from_string(const std::string& s) {
    if (s == "clustering") return Statistic::clustering;
    if (s == "betweenness") return Statistic::betweenness;
    if (s == "closeness") return Statistic::closeness;
    if (s == "degree") return Statistic::degree;
    throw ConfigError("unknown statistic '" + s + "'");
}

Eigen::VectorXd degree(const NetworkView& view, bool weighted) {
    int n = view.n();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (weighted) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                s += view.adj(i, j) + view.adj(j, i);
            }
            out(i) = s;
        } else {
            int d = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                if (view.adj(i, j) != 0.0 || view.adj(j, i) != 0.0) ++d;
            }
            out(i) = d;
        }
    }
    return out;
}

Eigen::VectorXd clustering_coefficient(const NetworkView& view, bool weighted) {
    int n = view.n();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n); // symmetrised weights
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) w(i, j) = std::max(view.adj(i, j), view.adj(j, i));

    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> nb;
        for (int j = 0; j < n; ++j)
            if (w(i, j) > 0.0) nb.push_back(j);
        int k = static_cast<int>(nb.size());
        if (k < 2) continue;
        if (!weighted) {
            long closed = 0;
            for (size_t a = 0; a < nb.size(); ++a)
                for (size_t b = a + 1; b < nb.size(); ++b)
                    if (w(nb[a], nb[b]) > 0.0) ++closed;
            out(i) = 2.0 * static_cast<double>(closed) /
                     (static_cast<double>(k) * (k - 1));
        } else {
            double s = 0.0;
            for (int j : nb) s += w(i, j);
            if (s <= 0.0) continue;
            double acc = 0.0; // over ordered neighbour pairs
            for (int j : nb)
                for (int h : nb) {
                    if (j == h || w(j, h) <= 0.0) continue;
                    acc += 0.5 * (w(i, j) + w(i, h));
                }
            out(i) = acc / (s * (k - 1));
        }
    }
    return out;
}

Eigen::VectorXd betweenness(const NetworkView& view, int threads) {
    int n = view.n();
    Eigen::VectorXd bc = Eigen::VectorXd::Zero(n);
    if (n < 3) return bc;
    AdjList al = build_adjlist(view);
    int nchunks = (n + kChunk - 1) / kChunk;
    std::vector<Eigen::VectorXd> partial(static_cast<size_t>(nchunks));

    if (view.kind == ViewKind::binary) {
        // Integer distances allow the pair-dependency form of the
        // accumulation: every geodesic pair (s, t) adds
        // sigma_sv sigma_vt / sigma_st for each interior v, one division per
        // contribution, which keeps the arithmetic identical to direct path
        // enumeration (the recursive form regroups those sums and can drift
        // by an ulp).
        std::vector<double> dist(static_cast<size_t>(n) * static_cast<size_t>(n));
        std::vector<double> sigma(static_cast<size_t>(n) * static_cast<size_t>(n));
        parallel_tasks(nchunks, threads, [&](int c) {
            Sssp r;
            int lo = c * kChunk, hi = std::min(n, lo + kChunk);
            for (int s = lo; s < hi; ++s) {
                sssp(al, s, true, false, r);
                size_t row = static_cast<size_t>(s) * static_cast<size_t>(n);
                std::copy(r.dist.begin(), r.dist.end(), dist.begin() + static_cast<long>(row));
                std::copy(r.sigma.begin(), r.sigma.end(), sigma.begin() + static_cast<long>(row));
            }
        });
        parallel_tasks(nchunks, threads, [&](int c) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
            int lo = c * kChunk, hi = std::min(n, lo + kChunk);
            for (int s = lo; s < hi; ++s) {
                const double* ds = &dist[static_cast<size_t>(s) * static_cast<size_t>(n)];
                const double* ss = &sigma[static_cast<size_t>(s) * static_cast<size_t>(n)];
                for (int t = 0; t < n; ++t) {
                    if (t == s || ds[t] == kInf) continue;
                    for (int v = 0; v < n; ++v) {
                        if (v == s || v == t) continue;
                        size_t vrow = static_cast<size_t>(v) * static_cast<size_t>(n);
                        if (ds[v] + dist[vrow + static_cast<size_t>(t)] == ds[t])
                            acc(v) += ss[v] * sigma[vrow + static_cast<size_t>(t)] / ss[t];
                    }
                }
            }
            partial[static_cast<size_t>(c)] = std::move(acc);
        });
        for (int c = 0; c < nchunks; ++c) bc += partial[static_cast<size_t>(c)];
        return bc;
    }

    parallel_tasks(nchunks, threads, [&](int c) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        Sssp r;
        std::vector<double> delta(static_cast<size_t>(n));
        int lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (int s = lo; s < hi; ++s) {
            sssp(al, s, false, true, r);
            std::fill(delta.begin(), delta.end(), 0.0);
            for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
                int v = *it;
                for (int p : r.preds[static_cast<size_t>(v)])
                    delta[static_cast<size_t>(p)] +=
                        r.sigma[static_cast<size_t>(p)] / r.sigma[static_cast<size_t>(v)] *
                        (1.0 + delta[static_cast<size_t>(v)]);
                if (v != s) acc(v) += delta[static_cast<size_t>(v)];
            }
        }
        partial[static_cast<size_t>(c)] = std::move(acc);
    });
    for (int c = 0; c < nchunks; ++c) bc += partial[static_cast<size_t>(c)];
    return bc;
}

Eigen::VectorXd closeness(const NetworkView& view, int threads) {
    int n = view.n();
    Eigen::VectorXd cc = Eigen::VectorXd::Zero(n);
    if (n < 2) return cc;
    AdjList al = build_adjlist(view);
    bool unit = view.kind == ViewKind::binary;

    int nchunks = (n + kChunk - 1) / kChunk;
    parallel_tasks(nchunks, threads, [&](int c) {
        Sssp r;
        int lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (int s = lo; s < hi; ++s) {
            sssp(al, s, unit, false, r);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == s) continue;
                double d = r.dist[static_cast<size_t>(j)];
                if (d < kInf && d > 0.0) acc += 1.0 / d;
            }
            cc(s) = acc / (n - 1);
        }
    });
    return cc;
}

StatMatrix build_stat_matrix(const NetworkView& view,
                             const std::vector<Statistic>& stats,
                             bool standardize, int threads) {
    if (stats.empty()) throw ConfigError("statistic list is empty");
    for (size_t a = 0; a < stats.size(); ++a)
        for (size_t b = a + 1; b < stats.size(); ++b)
            if (stats[a] == stats[b])
                throw ConfigError(std::string("duplicate statistic '") + to_string(stats[a]) + "'");

    int n = view.n();
    bool weighted = view.kind == ViewKind::weighted;
    StatMatrix sm;
    sm.values.resize(n, static_cast<Eigen::Index>(stats.size()));
    for (size_t c = 0; c < stats.size(); ++c) {
        Eigen::VectorXd col;
        switch (stats[c]) {
            case Statistic::clustering: col = clustering_coefficient(view, weighted); break;
            case Statistic::betweenness: col = betweenness(view, threads); break;
            case Statistic::closeness: col = closeness(view, threads); break;
            case Statistic::degree: col = degree(view, weighted); break;
        }
        sm.values.col(static_cast<Eigen::Index>(c)) = col;
        sm.columns.emplace_back(to_string(stats[c]));
    }
    if (standardize) {
        sm.standardized = true;
        for (Eigen::Index c = 0; n > 0 && c < sm.values.cols(); ++c) {
            auto col = sm.values.col(c);
            double mean = n > 0 ? col.mean() : 0.0;
            double sd = 0.0;
            if (n > 1) sd = std::sqrt((col.array() - mean).square().sum() / (n - 1));
            double scale_ref = 1.0 + col.array().abs().maxCoeff();
            if (n < 2 || sd <= 1e-13 * scale_ref) {
                col.setZero(); // constant column carries no signal
            } else {
                col = (col.array() - mean) / sd;
            }
        }
    }
    return sm;
}

} // namespace mvinf
