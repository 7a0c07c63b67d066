#include "mvinf/pipeline.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "mvinf/baselines.hpp"
#include "mvinf/evaluation.hpp"
#include "mvinf/factorization.hpp"
#include "mvinf/influence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mvinf {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

OutputStager::OutputStager(std::string out_dir) : out_dir_(std::move(out_dir)) {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir_ + "': " + ec.message());
}

void OutputStager::write_text(const std::string& name, const std::string& content) {
    fs::path tmp = fs::path(out_dir_) / (name + ".partial");
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    out.close();
    if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
    pending_.push_back({name, content.size(), fnv1a64(content)});
}

void OutputStager::commit() {
    for (const auto& e : pending_) {
        fs::path tmp = fs::path(out_dir_) / (e.name + ".partial");
        fs::path final_path = fs::path(out_dir_) / e.name;
        std::error_code ec;
        fs::rename(tmp, final_path, ec);
        if (ec)
            throw ConfigError("cannot finalize '" + final_path.string() + "': " + ec.message());
        entries_.push_back(e);
    }
    pending_.clear();
}

const char* to_string(Stage s) {
    switch (s) {
        case Stage::stats: return "stats";
        case Stage::factorize: return "factorize";
        case Stage::scree: return "scree";
        case Stage::rank: return "rank";
        case Stage::subgraph: return "subgraph";
        case Stage::baseline: return "baseline";
        case Stage::regress: return "regress";
    }
    return "?";
}

namespace {

std::string iso_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

struct PipelineState {
    MultiviewNetwork net;
    std::vector<StatMatrix> stats;
    bool have_stats = false;
    FactorizationResult fact;
    bool have_fact = false;
    Eigen::VectorXd scores; // importance from the fit
};

void load_views(const RunConfig& cfg, PipelineState& st) {
    if (cfg.views.empty()) throw ConfigError("no [[views]] configured");
    for (const auto& vc : cfg.views) {
        NetworkView v = load_edge_list(vc.path, vc.name, vc.kind, vc.transform, st.net.registry);
        st.net.add_view(std::move(v));
    }
}

void run_stats(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
               PipelineOutcome& outcome) {
    st.stats.clear();
    for (const auto& view : st.net.views) {
        StatMatrix sm = build_stat_matrix(view, cfg.statistics, cfg.standardize, cfg.threads);
        std::ostringstream csv;
        csv << "id";
        for (const auto& c : sm.columns) csv << ',' << c;
        csv << '\n';
        for (int i = 0; i < st.net.n(); ++i) {
            csv << csv_escape(st.net.registry.id(i));
            for (Eigen::Index c = 0; c < sm.values.cols(); ++c)
                csv << ',' << format_double(sm.values(i, c));
            csv << '\n';
        }
        stager.write_text("stats_" + view.name + ".csv", csv.str());
        st.stats.push_back(std::move(sm));
    }
    json summary = json::array();
    for (const auto& s : densify_summary(st.net)) {
        summary.push_back({{"name", s.name},
                           {"kind", to_string(s.kind)},
                           {"nodes", s.n},
                           {"edges", s.edges},
                           {"self_loops_dropped", s.self_loops_dropped},
                           {"duplicate_rows_merged", s.duplicate_rows_merged},
                           {"mean_degree", s.mean_degree},
                           {"density", s.density},
                           {"total_weight", s.total_weight}});
    }
    stager.write_text("summary.json", summary.dump(2) + "\n");
    st.have_stats = true;
    outcome.messages.push_back("stats: " + std::to_string(st.net.views.size()) + " views, n=" +
                               std::to_string(st.net.n()));
}

void ensure_stats(const RunConfig& cfg, PipelineState& st) {
    if (st.have_stats) return;
    st.stats.clear();
    for (const auto& view : st.net.views)
        st.stats.push_back(build_stat_matrix(view, cfg.statistics, cfg.standardize, cfg.threads));
    st.have_stats = true;
}

void run_factorize(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
                   PipelineOutcome& outcome) {
    ensure_stats(cfg, st);
    FitProblem problem = make_problem(st.net, st.stats);
    FactorizationConfig fc = cfg.fact;
    fc.seed = cfg.seed;
    fc.threads = cfg.threads;
    st.fact = fit_multi_restart(problem, fc);
    st.have_fact = true;
    st.scores = importance(st.fact.theta);

    int k = static_cast<int>(st.fact.theta.cols());
    auto factor_csv = [&](const Eigen::MatrixXd& m) {
        std::ostringstream csv;
        csv << "id";
        for (int c = 1; c <= k; ++c) csv << ",f" << c;
        csv << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            csv << csv_escape(st.net.registry.id(static_cast<int>(i)));
            for (Eigen::Index c = 0; c < m.cols(); ++c) csv << ',' << format_double(m(i, c));
            csv << '\n';
        }
        return csv.str();
    };
    stager.write_text("factors_theta.csv", factor_csv(st.fact.theta));
    for (size_t m = 0; m < st.net.views.size(); ++m) {
        if (!st.fact.v.empty())
            stager.write_text("factors_v_" + st.net.views[m].name + ".csv", factor_csv(st.fact.v[m]));
        std::ostringstream csv;
        csv << "statistic";
        for (int c = 1; c <= k; ++c) csv << ",f" << c;
        csv << '\n';
        const auto& lam = st.fact.lambda[m];
        for (Eigen::Index d = 0; d < lam.rows(); ++d) {
            csv << csv_escape(st.stats[m].columns[static_cast<size_t>(d)]);
            for (Eigen::Index c = 0; c < lam.cols(); ++c) csv << ',' << format_double(lam(d, c));
            csv << '\n';
        }
        stager.write_text("factors_lambda_" + st.net.views[m].name + ".csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "id,importance\n";
        for (int i = 0; i < st.net.n(); ++i)
            csv << csv_escape(st.net.registry.id(i)) << ',' << format_double(st.scores(i)) << '\n';
        stager.write_text("importance.csv", csv.str());
    }
    json fitj{{"rank", k},
              {"objective", st.fact.objective},
              {"converged", st.fact.converged},
              {"iterations", st.fact.iterations},
              {"variance_explained", st.fact.variance_explained},
              {"degenerate", st.fact.degenerate},
              {"restarts", cfg.fact.restarts},
              {"best_restart", st.fact.restart_index},
              {"epsilon", cfg.fact.epsilon},
              {"tol", cfg.fact.tol},
              {"seed", cfg.seed},
              {"min_factor_entry", st.fact.min_factor_entry}};
    json pv = json::object();
    for (size_t m = 0; m < st.net.views.size(); ++m)
        pv[st.net.views[m].name] = st.fact.view_variance_explained[m];
    fitj["view_variance_explained"] = pv;
    stager.write_text("fit.json", fitj.dump(2) + "\n");
    std::ostringstream msg;
    msg << "factorize: K=" << k << " VE=" << st.fact.variance_explained << "%"
        << (st.fact.converged ? "" : " (not converged)");
    outcome.messages.push_back(msg.str());
}

void run_scree(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
               PipelineOutcome& outcome) {
    ensure_stats(cfg, st);
    FitProblem problem = make_problem(st.net, st.stats);
    FactorizationConfig fc = cfg.fact;
    fc.seed = cfg.seed;
    fc.threads = cfg.threads;
    auto rows = rank_scan(problem, cfg.scree_kmin, cfg.scree_kmax, fc);
    std::ostringstream csv;
    csv << "k,objective,variance_explained,converged,iterations,degenerate\n";
    for (const auto& r : rows)
        csv << r.k << ',' << format_double(r.objective) << ','
            << format_double(r.variance_explained) << ',' << (r.converged ? 1 : 0) << ','
            << r.iterations << ',' << (r.degenerate ? 1 : 0) << '\n';
    stager.write_text("scree.csv", csv.str());
    if (cfg.scree_subsets) {
        auto subs = subset_scan(problem, st.stats.front().columns, cfg.subset_min_size, fc);
        std::ostringstream s2;
        s2 << "columns,objective,variance_explained\n";
        for (const auto& r : subs) {
            std::string joined;
            for (const auto& c : r.columns) {
                if (!joined.empty()) joined += "+";
                joined += c;
            }
            s2 << csv_escape(joined) << ',' << format_double(r.objective) << ','
               << format_double(r.variance_explained) << '\n';
        }
        stager.write_text("subsets.csv", s2.str());
    }
    outcome.messages.push_back("scree: K in [" + std::to_string(cfg.scree_kmin) + ", " +
                               std::to_string(cfg.scree_kmax) + "]");
}

void ensure_fact(const RunConfig& cfg, PipelineState& st) {
    if (st.have_fact) return;
    ensure_stats(cfg, st);
    FitProblem problem = make_problem(st.net, st.stats);
    FactorizationConfig fc = cfg.fact;
    fc.seed = cfg.seed;
    fc.threads = cfg.threads;
    st.fact = fit_multi_restart(problem, fc);
    st.have_fact = true;
    st.scores = importance(st.fact.theta);
}

void run_rank(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
              PipelineOutcome& outcome) {
    ensure_fact(cfg, st);
    auto table = rank_table(st.scores, st.net.registry, cfg.rank_top);
    std::ostringstream csv;
    csv << "rank,id,score\n";
    for (const auto& e : table)
        csv << e.rank << ',' << csv_escape(e.id) << ',' << format_double(e.score) << '\n';
    stager.write_text("rank.csv", csv.str());
    outcome.messages.push_back("rank: " + std::to_string(table.size()) + " rows");
}

void run_subgraph(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
                  PipelineOutcome& outcome) {
    ensure_fact(cfg, st);
    std::string view_name = cfg.subgraph_view.empty() ? cfg.views.front().name : cfg.subgraph_view;
    const NetworkView& view = st.net.view(view_name);
    SubgraphResult sg = percentile_subgraph(view, st.net.registry, st.scores, cfg.q);

    std::ostringstream nodes;
    nodes << "id,score\n";
    for (size_t a = 0; a < sg.node_ids.size(); ++a)
        nodes << csv_escape(sg.node_ids[a]) << ','
              << format_double(st.scores(sg.node_indices[a])) << '\n';
    stager.write_text("subgraph_nodes.csv", nodes.str());

    std::ostringstream edges;
    for (int a = 0; a < sg.view.n(); ++a)
        for (int b = 0; b < sg.view.n(); ++b) {
            double w = sg.view.adj(a, b);
            if (w == 0.0) continue;
            edges << sg.node_ids[static_cast<size_t>(a)] << '\t'
                  << sg.node_ids[static_cast<size_t>(b)];
            if (sg.view.kind == ViewKind::weighted) edges << '\t' << format_double(w);
            edges << '\n';
        }
    stager.write_text("subgraph_" + view_name + ".tsv", edges.str());

    NodeTable meta;
    bool have_meta = false;
    if (!cfg.metadata_path.empty()) {
        meta = load_node_table(cfg.metadata_path);
        have_meta = true;
    }
    std::string dot = export_dot(view, st.net.registry, sg.node_ids, have_meta ? &meta : nullptr);
    stager.write_text("subgraph_" + view_name + ".dot", dot);
    outcome.messages.push_back("subgraph: " + std::to_string(sg.node_ids.size()) + " nodes at q=" +
                               format_double(cfg.q));
}

void run_baseline(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
                  PipelineOutcome& outcome) {
    std::string view_name = cfg.baseline_view;
    if (view_name.empty())
        view_name = st.net.has_view("retweet") ? "retweet" : cfg.views.front().name;
    const NetworkView& view = st.net.view(view_name);
    std::ostringstream csv;
    if (cfg.baseline_method == "pagerank") {
        PageRankConfig pc;
        pc.damping = cfg.damping;
        Eigen::VectorXd pr = pagerank(view, pc);
        csv << "id,pagerank\n";
        for (int i = 0; i < st.net.n(); ++i)
            csv << csv_escape(st.net.registry.id(i)) << ',' << format_double(pr(i)) << '\n';
    } else {
        HitsResult hr = hits(view);
        csv << "id,authority,hub\n";
        for (int i = 0; i < st.net.n(); ++i)
            csv << csv_escape(st.net.registry.id(i)) << ',' << format_double(hr.authority(i)) << ','
                << format_double(hr.hub(i)) << '\n';
    }
    stager.write_text("baseline_" + cfg.baseline_method + "_" + view_name + ".csv", csv.str());
    outcome.messages.push_back("baseline: " + cfg.baseline_method + " on '" + view_name + "'");
}

std::map<std::string, double> load_outcome(const std::string& path, const std::string& column) {
    NodeTable t = load_node_table(path);
    if (std::find(t.columns.begin(), t.columns.end(), column) == t.columns.end())
        throw ConfigError("outcome column '" + column + "' not found in '" + path + "'");
    std::map<std::string, double> out;
    for (const auto& [id, row] : t.rows) {
        const std::string& val = row.at(column);
        if (val.empty()) continue;
        char* end = nullptr;
        double y = std::strtod(val.c_str(), &end);
        if (end != val.c_str() + val.size() || !std::isfinite(y))
            throw ConfigError("outcome value '" + val + "' for id '" + id + "' is not numeric");
        out[id] = y;
    }
    if (out.empty()) throw ConfigError("no outcome rows in '" + path + "'");
    return out;
}

std::vector<ScoreColumn> load_scores(const std::vector<std::string>& paths) {
    std::vector<ScoreColumn> out;
    for (const auto& path : paths) {
        NodeTable t = load_node_table(path);
        for (const auto& col : t.columns) {
            if (col == "rank") continue; // rank tables: keep only the score column
            ScoreColumn sc;
            sc.name = col;
            for (const auto& [id, row] : t.rows) {
                const std::string& val = row.at(col);
                if (val.empty()) continue;
                char* end = nullptr;
                double x = std::strtod(val.c_str(), &end);
                if (end != val.c_str() + val.size() || !std::isfinite(x))
                    throw ConfigError("score value '" + val + "' for id '" + id + "' in '" + path +
                                      "' is not numeric");
                sc.values[id] = x;
            }
            out.push_back(std::move(sc));
        }
    }
    return out;
}

void run_regress(const RunConfig& cfg, PipelineState& st, OutputStager& stager,
                 PipelineOutcome& outcome) {
    (void)st;
    if (cfg.regress_outcome_path.empty())
        throw ConfigError("[regress] requires an outcome file");
    auto outcome_map = load_outcome(cfg.regress_outcome_path, cfg.regress_outcome_column);
    NodeTable covariates;
    if (!cfg.regress_covariates_path.empty())
        covariates = load_node_table(cfg.regress_covariates_path);
    auto scores = load_scores(cfg.regress_influence_paths);
    RegressionDataset data = assemble_dataset(outcome_map, covariates,
                                              cfg.regress_covariate_columns, scores,
                                              cfg.regress_exclude_ids);
    std::vector<std::string> influence_names;
    for (const auto& s : scores) influence_names.push_back(s.name);
    auto comparisons = compare_models(data, influence_names);

    std::ostringstream csv;
    csv << "model,rmse,coef,se,dispersion\n";
    for (const auto& c : comparisons)
        csv << csv_escape(c.model) << ',' << format_double(c.rmse) << ','
            << format_double(c.score_coef) << ',' << format_double(c.score_se) << ','
            << format_double(c.dispersion) << '\n';
    stager.write_text("regress_models.csv", csv.str());

    GlmFit full = fit_quasipoisson(data);
    json fitj{{"n", full.n},
              {"dispersion", full.dispersion},
              {"dispersion_raw", full.dispersion_raw},
              {"iterations", full.iterations},
              {"dropped_missing", data.dropped_missing},
              {"dropped_excluded", data.dropped_excluded},
              {"warnings", full.warnings}};
    json coefs = json::array();
    for (size_t j = 0; j < full.columns.size(); ++j)
        coefs.push_back({{"column", full.columns[j]},
                         {"coef", full.coef(static_cast<Eigen::Index>(j))},
                         {"se", full.se(static_cast<Eigen::Index>(j))},
                         {"se_unscaled", full.se_unscaled(static_cast<Eigen::Index>(j))}});
    fitj["coefficients"] = coefs;
    stager.write_text("regress_fit.json", fitj.dump(2) + "\n");
    outcome.messages.push_back("regress: " + std::to_string(data.y.size()) + " rows, " +
                               std::to_string(comparisons.size()) + " models");
}

bool needs_views(const std::vector<Stage>& stages) {
    for (Stage s : stages)
        if (s != Stage::regress) return true;
    return false;
}

} // namespace

PipelineOutcome run_pipeline(const RunConfig& config, std::vector<Stage> stages) {
    if (stages.empty()) throw ConfigError("no pipeline stages requested");
    std::set<Stage> want(stages.begin(), stages.end());
    if (want.count(Stage::rank) || want.count(Stage::subgraph)) want.insert(Stage::factorize);
    if (want.count(Stage::factorize) || want.count(Stage::scree)) want.insert(Stage::stats);

    PipelineOutcome outcome;
    OutputStager stager(config.out_dir);
    PipelineState st;
    if (needs_views(std::vector<Stage>(want.begin(), want.end()))) load_views(config, st);

    const Stage order[] = {Stage::stats, Stage::factorize, Stage::scree, Stage::rank,
                           Stage::subgraph, Stage::baseline, Stage::regress};
    json manifest;
    manifest["tool"] = "mvinf";
    manifest["version"] = "0.1.0";
    manifest["seed"] = config.seed;
    manifest["config_hash"] = "fnv1a:" + hex64(fnv1a64(config.source_text));
    auto finish_manifest = [&](const std::string& status, const std::string& failed_stage) {
        manifest["status"] = status;
        if (!failed_stage.empty()) manifest["failed_stage"] = failed_stage;
        manifest["stages"] = outcome.stages_run;
        json outs = json::array();
        for (const auto& e : stager.entries())
            outs.push_back({{"name", e.name}, {"bytes", e.bytes}, {"fnv1a64", hex64(e.hash)}});
        manifest["outputs"] = outs;
        manifest["generated_at"] = iso_utc_now();
        fs::path mpath = fs::path(config.out_dir) / "manifest.json";
        std::ofstream out(mpath, std::ios::binary);
        out << manifest.dump(2) << "\n";
        outcome.manifest_path = mpath.string();
    };

    for (Stage s : order) {
        if (!want.count(s)) continue;
        try {
            switch (s) {
                case Stage::stats: run_stats(config, st, stager, outcome); break;
                case Stage::factorize: run_factorize(config, st, stager, outcome); break;
                case Stage::scree: run_scree(config, st, stager, outcome); break;
                case Stage::rank: run_rank(config, st, stager, outcome); break;
                case Stage::subgraph: run_subgraph(config, st, stager, outcome); break;
                case Stage::baseline: run_baseline(config, st, stager, outcome); break;
                case Stage::regress: run_regress(config, st, stager, outcome); break;
            }
            stager.commit();
            outcome.stages_run.push_back(to_string(s));
        } catch (...) {
            finish_manifest("failed", to_string(s));
            throw;
        }
    }
    finish_manifest("ok", "");
    outcome.outputs = stager.entries();
    return outcome;
}

} // namespace mvinf
