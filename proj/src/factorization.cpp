#include "mvinf/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "mvinf/parallel.hpp"
#include "mvinf/rng.hpp"

namespace mvinf {

namespace {

constexpr double kRankTol = 1e-12; // relative singular value cutoff for Gram inverses

void check_dims(const FitProblem& p, const Eigen::MatrixXd& theta,
                const std::vector<Eigen::MatrixXd>& v,
                const std::vector<Eigen::MatrixXd>& lambda) {
    if (p.adj.empty()) throw ConfigError("no views in problem");
    if (p.adj.size() != p.stats.size())
        throw ConfigError("problem has " + std::to_string(p.adj.size()) + " adjacency matrices but " +
                          std::to_string(p.stats.size()) + " statistic matrices");
    if (!v.empty() && v.size() != p.adj.size())
        throw ConfigError("expected " + std::to_string(p.adj.size()) + " view factors, got " +
                          std::to_string(v.size()));
    if (lambda.size() != p.adj.size())
        throw ConfigError("expected " + std::to_string(p.adj.size()) + " mixing factors, got " +
                          std::to_string(lambda.size()));
    Eigen::Index n = theta.rows(), k = theta.cols();
    for (size_t m = 0; m < p.adj.size(); ++m) {
        std::string name = m < p.view_names.size() ? p.view_names[m] : std::to_string(m);
        if (p.adj[m].rows() != n || p.adj[m].cols() != n)
            throw ConfigError("view '" + name + "': adjacency is " + std::to_string(p.adj[m].rows()) +
                              "x" + std::to_string(p.adj[m].cols()) + ", expected " +
                              std::to_string(n) + "x" + std::to_string(n));
        if (p.stats[m].rows() != n)
            throw ConfigError("view '" + name + "': statistic matrix has " +
                              std::to_string(p.stats[m].rows()) + " rows, expected " + std::to_string(n));
        if (lambda[m].rows() != p.stats[m].cols() || lambda[m].cols() != k)
            throw ConfigError("view '" + name + "': mixing factor is " + std::to_string(lambda[m].rows()) +
                              "x" + std::to_string(lambda[m].cols()) + ", expected " +
                              std::to_string(p.stats[m].cols()) + "x" + std::to_string(k));
        if (!v.empty() && (v[m].rows() != n || v[m].cols() != k))
            throw ConfigError("view '" + name + "': view factor is " + std::to_string(v[m].rows()) + "x" +
                              std::to_string(v[m].cols()) + ", expected " + std::to_string(n) + "x" +
                              std::to_string(k));
    }
}

double objective_unchecked(const FitProblem& p, const Eigen::MatrixXd& theta,
                           const std::vector<Eigen::MatrixXd>& v,
                           const std::vector<Eigen::MatrixXd>& lambda) {
    double obj = 0.0;
    for (size_t m = 0; m < p.adj.size(); ++m) {
        Eigen::MatrixXd y = v.empty() ? theta : Eigen::MatrixXd(theta + v[m]);
        Eigen::MatrixXd resid = p.adj[m] - (p.stats[m] * lambda[m]) * y.transpose();
        obj += resid.squaredNorm();
    }
    return obj;
}

// G^+ for symmetric G, exact inverse when well conditioned.
Eigen::MatrixXd sym_pinv(const Eigen::MatrixXd& g, bool* degenerate) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() > 0 ? sv(0) * kRankTol : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    bool degen = sv.size() == 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0)
            inv(i) = 1.0 / sv(i);
        else
            degen = true;
    }
    if (degen && degenerate) *degenerate = true;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd floor_entries(Eigen::MatrixXd m, double eps) {
    return m.cwiseMax(eps);
}

} // namespace

FitProblem make_problem(const MultiviewNetwork& net, const std::vector<StatMatrix>& stats) {
    if (net.views.empty()) throw ConfigError("network has no views");
    if (net.views.size() != stats.size())
        throw ConfigError("network has " + std::to_string(net.views.size()) + " views but " +
                          std::to_string(stats.size()) + " statistic matrices were given");
    FitProblem p;
    for (size_t m = 0; m < net.views.size(); ++m) {
        const auto& view = net.views[m];
        if (stats[m].values.rows() != view.adj.rows())
            throw ConfigError("view '" + view.name + "': statistic matrix has " +
                              std::to_string(stats[m].values.rows()) + " rows for " +
                              std::to_string(view.adj.rows()) + " nodes");
        p.adj.push_back(view.adj);
        p.stats.push_back(stats[m].values);
        p.view_names.push_back(view.name);
    }
    return p;
}

double objective(const FitProblem& problem, const Eigen::MatrixXd& theta,
                 const std::vector<Eigen::MatrixXd>& v,
                 const std::vector<Eigen::MatrixXd>& lambda) {
    check_dims(problem, theta, v, lambda);
    return objective_unchecked(problem, theta, v, lambda);
}

Eigen::MatrixXd gram_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, bool* degenerate) {
    Eigen::MatrixXd g = B.transpose() * B;
    Eigen::MatrixXd ginv = sym_pinv(g, degenerate);
    return A.transpose() * B * ginv;
}

Eigen::MatrixXd update_theta(const FitProblem& problem,
                             const std::vector<Eigen::MatrixXd>& lambda,
                             double eps, bool* degenerate) {
    Eigen::MatrixXd acc;
    for (size_t m = 0; m < problem.adj.size(); ++m) {
        Eigen::MatrixXd b = problem.stats[m] * lambda[m];
        Eigen::MatrixXd x = gram_solve(problem.adj[m], b, degenerate);
        if (m == 0)
            acc = std::move(x);
        else
            acc += x;
    }
    return floor_entries(std::move(acc), eps);
}

Eigen::MatrixXd update_v(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                         const Eigen::MatrixXd& lambda, double eps, bool* degenerate) {
    Eigen::MatrixXd b = S * lambda;
    return floor_entries(gram_solve(A, b, degenerate), eps);
}

Eigen::MatrixXd update_lambda(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                              const Eigen::MatrixXd& y, bool* degenerate) {
    Eigen::MatrixXd sts_inv = sym_pinv(S.transpose() * S, degenerate);
    Eigen::MatrixXd w = sts_inv * (S.transpose() * A); // D x n
    Eigen::MatrixXd yty_inv = sym_pinv(y.transpose() * y, degenerate);
    return (w * y) * yty_inv;
}

FactorizationResult fit(const FitProblem& problem, const FactorizationConfig& config) {
    if (problem.adj.empty()) throw ConfigError("no views in problem");
    int n = problem.n();
    int k = config.rank;
    if (k < 1 || k > n)
        throw ConfigError("rank " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    if (config.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (config.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    {
        // dimension screening with placeholder factors
        std::vector<Eigen::MatrixXd> lam, vv;
        for (const auto& s : problem.stats) lam.push_back(Eigen::MatrixXd::Zero(s.cols(), k));
        if (config.include_v)
            for (size_t m = 0; m < problem.adj.size(); ++m)
                vv.push_back(Eigen::MatrixXd::Zero(n, k));
        check_dims(problem, Eigen::MatrixXd::Zero(n, k), vv, lam);
    }

    int views = problem.views();
    FactorizationResult r;
    r.seed = config.seed;

    Rng rng(config.seed);
    r.lambda.resize(static_cast<size_t>(views));
    for (int m = 0; m < views; ++m) {
        Eigen::MatrixXd lam(problem.stats[static_cast<size_t>(m)].cols(), k);
        for (Eigen::Index d = 0; d < lam.rows(); ++d)
            for (Eigen::Index c = 0; c < lam.cols(); ++c)
                lam(d, c) = rng.normal(config.init_mean, config.init_sd);
        r.lambda[static_cast<size_t>(m)] = std::move(lam);
    }
    if (config.include_v) r.v.resize(static_cast<size_t>(views));

    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        r.theta = update_theta(problem, r.lambda, config.epsilon, &r.degenerate);
        double sweep_min = r.theta.minCoeff();
        if (config.include_v) {
            for (int m = 0; m < views; ++m) {
                r.v[static_cast<size_t>(m)] =
                    update_v(problem.adj[static_cast<size_t>(m)], problem.stats[static_cast<size_t>(m)],
                             r.lambda[static_cast<size_t>(m)], config.epsilon, &r.degenerate);
                sweep_min = std::min(sweep_min, r.v[static_cast<size_t>(m)].minCoeff());
            }
        }
        r.min_factor_entry = std::min(r.min_factor_entry, sweep_min);
        r.max_sweep_min_entry = std::max(r.max_sweep_min_entry, sweep_min);
        if (r.theta.minCoeff() < config.epsilon)
            throw NumericError("factor floor violated"); // should be unreachable
        for (int m = 0; m < views; ++m) {
            Eigen::MatrixXd y = config.include_v
                                    ? Eigen::MatrixXd(r.theta + r.v[static_cast<size_t>(m)])
                                    : r.theta;
            r.lambda[static_cast<size_t>(m)] =
                update_lambda(problem.adj[static_cast<size_t>(m)], problem.stats[static_cast<size_t>(m)],
                              y, &r.degenerate);
        }
        double obj = objective_unchecked(problem, r.theta, r.v, r.lambda);
        if (!std::isfinite(obj)) throw NumericError("objective diverged (non-finite)");
        r.objective_trace.push_back(obj);
        r.iterations = iter;
        if (iter >= 2) {
            if (prev == 0.0) {
                r.converged = true;
            } else {
                double rel = std::abs(obj - prev) / prev;
                if (rel <= config.tol) r.converged = true;
            }
        }
        prev = obj;
        if (r.converged) break;
    }
    r.objective = prev;
    r.variance_explained =
        variance_explained(problem, r.theta, r.v, r.lambda, &r.view_variance_explained);
    return r;
}

FactorizationResult fit_multi_restart(const FitProblem& problem,
                                      const FactorizationConfig& config,
                                      std::vector<FactorizationResult>* all) {
    if (config.restarts < 1) throw ConfigError("restarts must be at least 1");
    std::vector<FactorizationResult> results(static_cast<size_t>(config.restarts));
    parallel_tasks(config.restarts, config.threads, [&](int rstart) {
        FactorizationConfig c = config;
        c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(rstart));
        FactorizationResult res = fit(problem, c);
        res.restart_index = rstart;
        results[static_cast<size_t>(rstart)] = std::move(res);
    });
    int best = 0;
    for (int i = 1; i < config.restarts; ++i)
        if (results[static_cast<size_t>(i)].objective < results[static_cast<size_t>(best)].objective)
            best = i; // strict comparison keeps the lowest index on ties
    FactorizationResult chosen = results[static_cast<size_t>(best)];
    if (all) *all = std::move(results);
    return chosen;
}

std::vector<RankScanRow> rank_scan(const FitProblem& problem, int kmin, int kmax,
                                   const FactorizationConfig& config) {
    if (kmin < 1 || kmin > kmax || kmax > problem.n())
        throw ConfigError("rank range [" + std::to_string(kmin) + ", " + std::to_string(kmax) +
                          "] invalid for n=" + std::to_string(problem.n()));
    std::vector<RankScanRow> rows;
    for (int k = kmin; k <= kmax; ++k) {
        FactorizationConfig c = config;
        c.rank = k;
        c.seed = derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(k));
        FactorizationResult res = fit_multi_restart(problem, c);
        RankScanRow row;
        row.k = k;
        row.objective = res.objective;
        row.variance_explained = res.variance_explained;
        row.converged = res.converged;
        row.iterations = res.iterations;
        row.degenerate = res.degenerate;
        rows.push_back(row);
    }
    return rows;
}

std::vector<SubsetScanRow> subset_scan(const FitProblem& problem,
                                       const std::vector<std::string>& columns,
                                       int min_size, const FactorizationConfig& config) {
    int d = problem.stat_dim();
    if (static_cast<int>(columns.size()) != d)
        throw ConfigError("subset scan got " + std::to_string(columns.size()) + " column names for " +
                          std::to_string(d) + " statistic columns");
    if (min_size < 1 || min_size > d)
        throw ConfigError("subset minimum size " + std::to_string(min_size) + " outside [1, " +
                          std::to_string(d) + "]");

    std::vector<std::vector<int>> subsets;
    for (int size = min_size; size <= d; ++size) {
        std::vector<int> pick(static_cast<size_t>(size));
        // lexicographic enumeration of index combinations
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == size) {
                subsets.push_back(pick);
                return;
            }
            for (int i = start; i < d; ++i) {
                pick[static_cast<size_t>(depth)] = i;
                rec(i + 1, depth + 1);
            }
        };
        rec(0, 0);
    }

    std::vector<SubsetScanRow> rows;
    for (size_t si = 0; si < subsets.size(); ++si) {
        const auto& idx = subsets[si];
        FitProblem sub;
        sub.adj = problem.adj;
        sub.view_names = problem.view_names;
        for (const auto& s : problem.stats) {
            Eigen::MatrixXd cols(s.rows(), static_cast<Eigen::Index>(idx.size()));
            for (size_t c = 0; c < idx.size(); ++c)
                cols.col(static_cast<Eigen::Index>(c)) = s.col(idx[c]);
            sub.stats.push_back(std::move(cols));
        }
        FactorizationConfig c = config;
        c.seed = derive_seed(config.seed, 2000 + si);
        FactorizationResult res = fit_multi_restart(sub, c);
        SubsetScanRow row;
        for (int i : idx) row.columns.push_back(columns[static_cast<size_t>(i)]);
        row.objective = res.objective;
        row.variance_explained = res.variance_explained;
        rows.push_back(std::move(row));
    }
    return rows;
}

FactorizationResult fit_single_view(const Eigen::MatrixXd& adj, const Eigen::MatrixXd& stats,
                                    const FactorizationConfig& config) {
    FitProblem p;
    p.adj.push_back(adj);
    p.stats.push_back(stats);
    p.view_names.push_back("view");
    FactorizationConfig c = config;
    c.include_v = false;
    return fit(p, c);
}

double variance_explained(const FitProblem& problem, const Eigen::MatrixXd& theta,
                          const std::vector<Eigen::MatrixXd>& v,
                          const std::vector<Eigen::MatrixXd>& lambda,
                          std::vector<double>* per_view) {
    check_dims(problem, theta, v, lambda);
    if (per_view) per_view->clear();
    double num = 0.0, den = 0.0;
    for (size_t m = 0; m < problem.adj.size(); ++m) {
        const Eigen::MatrixXd& a = problem.adj[m];
        Eigen::MatrixXd y = v.empty() ? theta : Eigen::MatrixXd(theta + v[m]);
        double resid = (a - (problem.stats[m] * lambda[m]) * y.transpose()).squaredNorm();
        double mean = a.mean();
        double base = (a.array() - mean).square().sum();
        num += resid;
        den += base;
        if (per_view)
            per_view->push_back(base > 0.0 ? 100.0 * (1.0 - resid / base) : 0.0);
    }
    return den > 0.0 ? 100.0 * (1.0 - num / den) : 0.0;
}

} // namespace mvinf
