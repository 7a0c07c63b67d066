#include "mvinf/baselines.hpp"

#include <cmath>

#include "mvinf/errors.hpp"

namespace mvinf {

Eigen::VectorXd pagerank(const NetworkView& view, const PageRankConfig& config) {
    if (config.damping < 0.0 || config.damping >= 1.0)
        throw ConfigError("damping must lie in [0, 1)");
    int n = view.n();
    if (n == 0) throw ConfigError("pagerank on empty view");

    Eigen::VectorXd outsum = view.adj.rowwise().sum();
    // column-stochastic transition matrix P(j, i) = w_ij / outsum_i
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> dangling;
    for (int i = 0; i < n; ++i) {
        if (outsum(i) > 0.0)
            p.col(i) = view.adj.row(i).transpose() / outsum(i);
        else
            dangling.push_back(i);
    }

    double d = config.damping;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd base = Eigen::VectorXd::Constant(n, (1.0 - d) / n);
    for (int it = 0; it < config.max_iters; ++it) {
        double dangling_mass = 0.0;
        for (int i : dangling) dangling_mass += x(i);
        Eigen::VectorXd next = base + d * (p * x);
        next.array() += d * dangling_mass / n;
        double change = (next - x).cwiseAbs().sum();
        x = next;
        if (change <= config.tol) break;
    }
    x /= x.sum(); // normalise away accumulated rounding
    return x;
}

HitsResult hits(const NetworkView& view, double tol, int max_iters) {
    int n = view.n();
    if (n == 0) throw ConfigError("hits on empty view");
    if (view.adj.cwiseAbs().sum() == 0.0)
        throw NumericError("hits: view has no edges");

    const Eigen::MatrixXd& a = view.adj;
    HitsResult r;
    r.authority = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    r.hub = r.authority;
    for (int it = 1; it <= max_iters; ++it) {
        Eigen::VectorXd auth = a.transpose() * r.hub;
        double an = auth.norm();
        if (an == 0.0) throw NumericError("hits: authority vector collapsed to zero");
        auth /= an;
        Eigen::VectorXd hub = a * auth;
        double hn = hub.norm();
        if (hn == 0.0) throw NumericError("hits: hub vector collapsed to zero");
        hub /= hn;
        double change = (auth - r.authority).cwiseAbs().maxCoeff() +
                        (hub - r.hub).cwiseAbs().maxCoeff();
        r.authority = auth;
        r.hub = hub;
        r.iterations = it;
        if (change <= tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

} // namespace mvinf
