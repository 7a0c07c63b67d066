#include "mvinf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace mvinf {

namespace {

bool parse_numeric(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

} // namespace

RegressionDataset assemble_dataset(const std::map<std::string, double>& outcome,
                                   const NodeTable& covariates,
                                   const std::vector<std::string>& covariate_columns,
                                   const std::vector<ScoreColumn>& scores,
                                   const std::vector<std::string>& exclude_ids) {
    std::vector<std::string> cols = covariate_columns;
    if (cols.empty()) cols = covariates.columns;
    for (const auto& c : cols) {
        if (std::find(covariates.columns.begin(), covariates.columns.end(), c) ==
            covariates.columns.end())
            throw ConfigError("covariate column '" + c + "' not found in node table");
    }
    std::set<std::string> excluded(exclude_ids.begin(), exclude_ids.end());

    RegressionDataset data;
    for (const auto& [id, y] : outcome) { // std::map iterates ids in sorted order
        if (excluded.count(id)) {
            ++data.dropped_excluded;
            continue;
        }
        bool ok = true;
        auto row = covariates.rows.find(id);
        if (!cols.empty() && row == covariates.rows.end()) ok = false;
        if (ok)
            for (const auto& c : cols) {
                auto it = row->second.find(c);
                if (it == row->second.end() || it->second.empty()) {
                    ok = false;
                    break;
                }
            }
        if (ok)
            for (const auto& s : scores)
                if (!s.values.count(id)) {
                    ok = false;
                    break;
                }
        if (!ok) {
            ++data.dropped_missing;
            continue;
        }
        data.row_ids.push_back(id);
        (void)y;
    }

    long n = static_cast<long>(data.row_ids.size());
    if (n == 0) throw ConfigError("regression dataset is empty after dropping rows");
    data.y.resize(n);
    for (long i = 0; i < n; ++i) data.y(i) = outcome.at(data.row_ids[static_cast<size_t>(i)]);

    // classify covariates: numeric if every kept value parses as a number
    struct ColPlan {
        std::string name;
        bool numeric = true;
        std::vector<std::string> levels; // categorical: non-reference levels, sorted
        std::string reference;
    };
    std::vector<ColPlan> plans;
    for (const auto& c : cols) {
        ColPlan plan;
        plan.name = c;
        std::map<std::string, long> counts;
        for (const auto& id : data.row_ids) {
            const std::string& val = covariates.rows.at(id).at(c);
            double tmp;
            if (!parse_numeric(val, tmp)) plan.numeric = false;
            ++counts[val];
        }
        if (!plan.numeric) {
            long best = -1;
            for (const auto& [level, cnt] : counts)
                if (cnt > best) { // map order makes the alphabetically-first winner on ties
                    best = cnt;
                    plan.reference = level;
                }
            for (const auto& [level, cnt] : counts) {
                (void)cnt;
                if (level != plan.reference) plan.levels.push_back(level);
            }
        }
        plans.push_back(std::move(plan));
    }

    data.columns.push_back("(intercept)");
    for (const auto& plan : plans) {
        if (plan.numeric)
            data.columns.push_back(plan.name);
        else
            for (const auto& level : plan.levels) data.columns.push_back(plan.name + "=" + level);
    }
    for (const auto& s : scores) data.columns.push_back(s.name);

    data.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(data.columns.size()));
    data.x.col(0).setOnes();
    for (long i = 0; i < n; ++i) {
        const std::string& id = data.row_ids[static_cast<size_t>(i)];
        Eigen::Index col = 1;
        for (const auto& plan : plans) {
            const std::string& val = covariates.rows.at(id).at(plan.name);
            if (plan.numeric) {
                double x = 0.0;
                parse_numeric(val, x);
                data.x(i, col++) = x;
            } else {
                for (const auto& level : plan.levels) data.x(i, col++) = val == level ? 1.0 : 0.0;
            }
        }
        for (const auto& s : scores) data.x(i, col++) = s.values.at(id);
    }
    return data;
}

GlmFit fit_quasipoisson(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        const std::vector<std::string>& columns, bool quasi,
                        double tol, int max_iters) {
    long n = y.size();
    Eigen::Index p = x.cols();
    if (x.rows() != n) throw ConfigError("outcome and design row counts differ");
    if (static_cast<Eigen::Index>(columns.size()) != p)
        throw ConfigError("design has " + std::to_string(p) + " columns but " +
                          std::to_string(columns.size()) + " names");
    if (n <= static_cast<long>(p))
        throw ConfigError("need more rows (" + std::to_string(n) + ") than parameters (" +
                          std::to_string(p) + ")");
    for (long i = 0; i < n; ++i)
        if (!(y(i) >= 0.0) || !std::isfinite(y(i)))
            throw ConfigError("outcome must be finite and nonnegative");

    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        qr.setThreshold(1e-10);
        if (qr.rank() < p) {
            std::string offenders;
            auto perm = qr.colsPermutation().indices();
            for (Eigen::Index i = qr.rank(); i < p; ++i) {
                if (!offenders.empty()) offenders += ", ";
                offenders += columns[static_cast<size_t>(perm(i))];
            }
            throw ConfigError("design matrix is rank deficient; collinear columns: " + offenders);
        }
    }

    GlmFit fit;
    fit.columns = columns;
    fit.n = n;
    Eigen::VectorXd mu = y.array() + 0.1;
    Eigen::VectorXd eta = mu.array().log();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    bool converged = false;
    for (int it = 1; it <= max_iters; ++it) {
        Eigen::VectorXd w = mu.array().sqrt();
        Eigen::VectorXd z = eta.array() + (y - mu).array() / mu.array();
        Eigen::MatrixXd xw = w.asDiagonal() * x;
        Eigen::VectorXd zw = w.asDiagonal() * z;
        Eigen::VectorXd next = xw.colPivHouseholderQr().solve(zw);
        if (!next.allFinite()) throw NumericError("IRLS produced non-finite coefficients");
        double change = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        eta = (x * beta).cwiseMin(300.0).cwiseMax(-300.0);
        mu = eta.array().exp();
        fit.iterations = it;
        if (change <= tol * (1.0 + beta.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericError("IRLS failed to converge in " + std::to_string(max_iters) +
                                       " iterations");

    fit.coef = beta;
    fit.fitted = mu;
    double pearson = ((y - mu).array().square() / mu.array()).sum();
    double dof = static_cast<double>(n) - static_cast<double>(p);
    fit.dispersion_raw = pearson / dof;
    fit.dispersion = quasi ? std::max(1.0, fit.dispersion_raw) : 1.0;

    Eigen::MatrixXd fisher = x.transpose() * mu.asDiagonal() * x;
    Eigen::MatrixXd cov = fisher.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    fit.se_unscaled = cov.diagonal().array().max(0.0).sqrt();
    fit.se = fit.se_unscaled * std::sqrt(fit.dispersion);

    for (Eigen::Index j = 0; j < p; ++j)
        if (std::abs(beta(j)) > 30.0)
            fit.warnings.push_back("possible separation: |coefficient| exceeds 30 for column '" +
                                   columns[static_cast<size_t>(j)] + "'");
    return fit;
}

GlmFit fit_quasipoisson(const RegressionDataset& data, bool quasi, double tol, int max_iters) {
    return fit_quasipoisson(data.y, data.x, data.columns, quasi, tol, max_iters);
}

std::vector<ModelComparison> compare_models(const RegressionDataset& data,
                                            const std::vector<std::string>& influence_columns) {
    std::vector<Eigen::Index> influence_idx;
    for (const auto& name : influence_columns) {
        auto it = std::find(data.columns.begin(), data.columns.end(), name);
        if (it == data.columns.end())
            throw ConfigError("influence column '" + name + "' not found in dataset");
        influence_idx.push_back(static_cast<Eigen::Index>(it - data.columns.begin()));
    }
    std::vector<Eigen::Index> control_idx;
    for (Eigen::Index j = 0; j < data.x.cols(); ++j)
        if (std::find(influence_idx.begin(), influence_idx.end(), j) == influence_idx.end())
            control_idx.push_back(j);

    auto select = [&](const std::vector<Eigen::Index>& idx) {
        Eigen::MatrixXd x(data.x.rows(), static_cast<Eigen::Index>(idx.size()));
        std::vector<std::string> names;
        for (size_t c = 0; c < idx.size(); ++c) {
            x.col(static_cast<Eigen::Index>(c)) = data.x.col(idx[c]);
            names.push_back(data.columns[static_cast<size_t>(idx[c])]);
        }
        return std::make_pair(std::move(x), std::move(names));
    };
    auto rmse = [&](const Eigen::VectorXd& fitted) {
        return std::sqrt((data.y - fitted).squaredNorm() / static_cast<double>(data.y.size()));
    };

    std::vector<ModelComparison> rows;
    {
        auto [x, names] = select(control_idx);
        GlmFit f = fit_quasipoisson(data.y, x, names);
        rows.push_back({"controls", rmse(f.fitted), 0.0, 0.0, f.dispersion});
    }
    for (size_t k = 0; k < influence_idx.size(); ++k) {
        auto idx = control_idx;
        idx.push_back(influence_idx[k]);
        auto [x, names] = select(idx);
        GlmFit f = fit_quasipoisson(data.y, x, names);
        ModelComparison row;
        row.model = influence_columns[k];
        row.rmse = rmse(f.fitted);
        row.score_coef = f.coef(static_cast<Eigen::Index>(idx.size()) - 1);
        row.score_se = f.se(static_cast<Eigen::Index>(idx.size()) - 1);
        row.dispersion = f.dispersion;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace mvinf
