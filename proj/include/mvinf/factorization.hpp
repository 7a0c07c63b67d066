#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mvinf/graph.hpp"
#include "mvinf/netstats.hpp"

namespace mvinf {

/// One fitting instance: M adjacency matrices with their statistic matrices.
struct FitProblem {
    std::vector<Eigen::MatrixXd> adj;   // each n x n
    std::vector<Eigen::MatrixXd> stats; // each n x D
    std::vector<std::string> view_names;

    int n() const { return adj.empty() ? 0 : static_cast<int>(adj.front().rows()); }
    int views() const { return static_cast<int>(adj.size()); }
    int stat_dim() const { return stats.empty() ? 0 : static_cast<int>(stats.front().cols()); }
};

FitProblem make_problem(const MultiviewNetwork& net, const std::vector<StatMatrix>& stats);

struct FactorizationConfig {
    int rank = 6;
    double epsilon = 1e-4; // nonnegativity floor for theta and v entries
    double tol = 1e-4;     // relative objective change at which to stop
    int max_iters = 200;
    int restarts = 30;
    std::uint64_t seed = 1;
    double init_mean = 1.0;
    double init_sd = 1.0;
    int threads = 1;
    bool include_v = true; // false drops the view-specific factors (single-view model)
};

struct FactorizationResult {
    Eigen::MatrixXd theta;               // n x K, entries >= epsilon
    std::vector<Eigen::MatrixXd> v;      // M of n x K (empty when include_v is false)
    std::vector<Eigen::MatrixXd> lambda; // M of D x K
    std::vector<double> objective_trace; // objective after each sweep
    double objective = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    bool degenerate = false; // a singular Gram matrix forced the pseudoinverse path
    double variance_explained = 0.0; // pooled, percent
    std::vector<double> view_variance_explained;
    double min_factor_entry = std::numeric_limits<double>::infinity(); // over all sweeps
    // Largest per-sweep minimum over theta and v entries; equal to epsilon
    // exactly when the floor binds in every sweep.
    double max_sweep_min_entry = 0.0;
    int restart_index = -1;
    std::uint64_t seed = 0;
};

/// Model objective: sum over views of ||A_m - S_m Lambda_m (Theta + V_m)^T||_F^2.
/// Dimension mismatches raise ConfigError naming the offending view. Pass an
/// empty `v` for the no-V (single-view style) model.
double objective(const FitProblem& problem, const Eigen::MatrixXd& theta,
                 const std::vector<Eigen::MatrixXd>& v,
                 const std::vector<Eigen::MatrixXd>& lambda);

/// X G^+ where G = B^T B, via SVD; exact inverse when G is well conditioned,
/// pseudoinverse otherwise (sets *degenerate). Returns A^T B G^+.
Eigen::MatrixXd gram_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           bool* degenerate);

/// One sweep of the shared factor: sum of per-view least squares solutions
/// A_m^T S_m Lambda_m (Lambda_m^T S_m^T S_m Lambda_m)^+, floored at eps.
Eigen::MatrixXd update_theta(const FitProblem& problem,
                             const std::vector<Eigen::MatrixXd>& lambda,
                             double eps, bool* degenerate);

/// View-specific factor: A^T S Lambda (Lambda^T S^T S Lambda)^+, floored at eps.
Eigen::MatrixXd update_v(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                         const Eigen::MatrixXd& lambda, double eps, bool* degenerate);

/// Mixing factor: (S^T S)^+ S^T A Y (Y^T Y)^+ with Y = theta + v. Unconstrained.
Eigen::MatrixXd update_lambda(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                              const Eigen::MatrixXd& y, bool* degenerate);

/// Alternating sweeps (theta, then each V_m, then each Lambda_m) from one
/// N(init_mean, init_sd) draw of the Lambda_m, stopping when the relative
/// objective change drops to `tol` or `max_iters` is reached.
FactorizationResult fit(const FitProblem& problem, const FactorizationConfig& config);

/// Best of `restarts` independent fits (seeds derived from config.seed).
/// Ties in the final objective keep the lowest restart index, so the result
/// does not depend on `threads`. Optionally returns every restart.
FactorizationResult fit_multi_restart(const FitProblem& problem,
                                      const FactorizationConfig& config,
                                      std::vector<FactorizationResult>* all = nullptr);

struct RankScanRow {
    int k = 0;
    double objective = 0.0;
    double variance_explained = 0.0;
    bool converged = false;
    int iterations = 0;
    bool degenerate = false;
};

/// Variance explained by the best multi-restart fit at each K in [kmin, kmax].
std::vector<RankScanRow> rank_scan(const FitProblem& problem, int kmin, int kmax,
                                   const FactorizationConfig& config);

struct SubsetScanRow {
    std::vector<std::string> columns;
    double objective = 0.0;
    double variance_explained = 0.0;
};

/// Refit at fixed K on every statistic-column subset of size >= min_size,
/// ordered by size then lexicographically by column index.
std::vector<SubsetScanRow> subset_scan(const FitProblem& problem,
                                       const std::vector<std::string>& columns,
                                       int min_size, const FactorizationConfig& config);

/// Single-network model (no view factor): A ~ S Lambda Theta^T.
FactorizationResult fit_single_view(const Eigen::MatrixXd& adj, const Eigen::MatrixXd& stats,
                                    const FactorizationConfig& config);

/// Pooled percent variance explained against per-view constant mean models;
/// per-view values returned through `per_view` when non-null.
double variance_explained(const FitProblem& problem, const Eigen::MatrixXd& theta,
                          const std::vector<Eigen::MatrixXd>& v,
                          const std::vector<Eigen::MatrixXd>& lambda,
                          std::vector<double>* per_view = nullptr);

} // namespace mvinf
