#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "mvinf/graph.hpp"

namespace mvinf {

struct RegressionDataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;                // intercept column first
    std::vector<std::string> columns; // aligned with x
    std::vector<std::string> row_ids;
    long dropped_missing = 0;
    long dropped_excluded = 0;
};

/// Named per-node score column (e.g. an influence measure).
struct ScoreColumn {
    std::string name;
    std::map<std::string, double> values; // id -> score
};

/// Assemble a regression dataset from an outcome map and a covariate table.
/// Rows are outcome ids in sorted order, minus `exclude_ids`; a row missing
/// any covariate or score value is dropped and counted. Numeric covariate
/// columns enter as-is; categorical ones are dummy-coded against the most
/// frequent level (ties broken alphabetically), producing columns "col=level".
RegressionDataset assemble_dataset(const std::map<std::string, double>& outcome,
                                   const NodeTable& covariates,
                                   const std::vector<std::string>& covariate_columns,
                                   const std::vector<ScoreColumn>& scores,
                                   const std::vector<std::string>& exclude_ids);

struct GlmFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;          // dispersion-scaled standard errors
    Eigen::VectorXd se_unscaled; // plain Poisson standard errors
    std::vector<std::string> columns;
    double dispersion = 1.0;     // Pearson chi-square / (n - p), floored at 1
    double dispersion_raw = 1.0; // before the floor
    Eigen::VectorXd fitted;      // fitted means
    int iterations = 0;
    long n = 0;
    std::vector<std::string> warnings;
};

/// Log-link Poisson regression by iteratively reweighted least squares; the
/// quasi-Poisson variant scales standard errors by sqrt(dispersion) and leaves
/// point estimates untouched. Rank-deficient designs raise ConfigError naming
/// the collinear columns; failure to converge raises NumericError. Large
/// coefficients (|b| > 30) add a separation warning.
GlmFit fit_quasipoisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        const std::vector<std::string>& columns, bool quasi = true,
                        double tol = 1e-10, int max_iters = 100);

GlmFit fit_quasipoisson(const RegressionDataset& data, bool quasi = true,
                        double tol = 1e-10, int max_iters = 100);

struct ModelComparison {
    std::string model; // "controls" or the influence column name
    double rmse = 0.0;
    double score_coef = 0.0; // coefficient on the influence column (0 for controls row)
    double score_se = 0.0;
    double dispersion = 1.0;
};

/// Fit the controls-only model, then controls plus each influence column in
/// turn, reporting in-sample RMSE of the fitted means. `influence_columns`
/// name columns of `data.x`; the remaining columns are the controls.
std::vector<ModelComparison> compare_models(const RegressionDataset& data,
                                            const std::vector<std::string>& influence_columns);

} // namespace mvinf
