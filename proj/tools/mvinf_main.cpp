#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mvinf/config.hpp"
#include "mvinf/pipeline.hpp"
#include "mvinf/synth.hpp"

namespace {

struct GlobalOpts {
    std::string config_path;
    long seed = -1;
    int threads = 0;
    std::string out_dir;
};

mvinf::RunConfig load_config(const GlobalOpts& g) {
    mvinf::RunConfig cfg;
    if (!g.config_path.empty()) cfg = mvinf::RunConfig::from_file(g.config_path);
    if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
    if (g.threads > 0) cfg.threads = g.threads;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

int run_stages(const mvinf::RunConfig& cfg, std::vector<mvinf::Stage> stages) {
    mvinf::PipelineOutcome outcome = mvinf::run_pipeline(cfg, std::move(stages));
    for (const auto& msg : outcome.messages) std::cout << msg << "\n";
    std::cout << "wrote " << outcome.outputs.size() << " files to " << cfg.out_dir << "\n";
    return 0;
}

int run_synth(const mvinf::RunConfig& cfg, const std::string& spec_path, bool seed_override) {
    mvinf::SynthSpec spec = mvinf::synth_spec_from_file(spec_path);
    if (seed_override) spec.seed = cfg.seed;
    mvinf::SynthResult result = mvinf::generate_synthetic(spec);

    mvinf::OutputStager stager(cfg.out_dir);
    for (const auto& view : result.network.views)
        stager.write_text(view.name + ".tsv",
                          mvinf::edge_list_string(view, result.network.registry));
    std::string labels = "id,community\n";
    for (int i = 0; i < result.network.n(); ++i)
        labels += result.network.registry.id(i) + "," +
                  std::to_string(result.labels[static_cast<size_t>(i)]) + "\n";
    stager.write_text("labels.csv", labels);
    stager.commit();
    std::cout << "synth: n=" << result.network.n() << ", " << result.network.views.size()
              << " views written to " << cfg.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"node influence in multiview directed networks"};
    app.require_subcommand(1, 0); // pipeline stages may be chained in one run

    GlobalOpts g;
    app.add_option("--config", g.config_path, "TOML run configuration");
    app.add_option("--seed", g.seed, "master seed (overrides config)");
    app.add_option("--threads", g.threads, "worker threads (overrides config)");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");

    auto* stats = app.add_subcommand("stats", "node statistics per view");
    auto* factorize = app.add_subcommand("factorize", "fit the joint factor model");
    auto* scree = app.add_subcommand("scree", "variance explained across ranks");
    long kmin = 0, kmax = 0, subset_min = 0;
    bool subsets = false;
    scree->add_option("--kmin", kmin, "smallest rank");
    scree->add_option("--kmax", kmax, "largest rank");
    scree->add_flag("--subsets", subsets, "also scan statistic subsets");
    scree->add_option("--subset-min-size", subset_min, "smallest subset size");

    auto* rank = app.add_subcommand("rank", "importance ranking table");
    long top = -2;
    rank->add_option("--top", top, "keep only the highest-ranked rows");

    auto* subgraph = app.add_subcommand("subgraph", "high-importance induced subgraph");
    std::string sg_view;
    double sg_q = -1.0;
    subgraph->add_option("--view", sg_view, "view to restrict");
    subgraph->add_option("--q", sg_q, "percentile threshold in [0, 100)");

    auto* baseline = app.add_subcommand("baseline", "pagerank or hits scores");
    std::string b_method, b_view;
    double b_damping = -1.0;
    baseline->add_option("--method", b_method, "pagerank or hits");
    baseline->add_option("--view", b_view, "view to score");
    baseline->add_option("--damping", b_damping, "pagerank damping factor");

    auto* regress = app.add_subcommand("regress", "quasi-Poisson outcome regression");
    std::string r_outcome, r_outcome_col, r_covariates;
    std::vector<std::string> r_cov_cols, r_influence, r_exclude;
    regress->add_option("--outcome", r_outcome, "node table with the outcome column");
    regress->add_option("--outcome-column", r_outcome_col, "outcome column name");
    regress->add_option("--covariates", r_covariates, "node table of control covariates");
    regress->add_option("--covariate-columns", r_cov_cols, "controls to use (default: all)");
    regress->add_option("--influence", r_influence, "score tables to compare");
    regress->add_option("--exclude-ids", r_exclude, "node ids to drop");

    auto* synth = app.add_subcommand("synth", "generate a synthetic multiview network");
    std::string spec_path;
    synth->add_option("--spec", spec_path, "TOML synthetic spec")->required();

    for (auto* sc : {stats, factorize, scree, rank, subgraph, baseline, regress, synth})
        sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        mvinf::RunConfig cfg = load_config(g);
        std::vector<mvinf::Stage> stages;
        if (stats->parsed()) stages.push_back(mvinf::Stage::stats);
        if (factorize->parsed()) stages.push_back(mvinf::Stage::factorize);
        if (scree->parsed()) {
            if (kmin > 0) cfg.scree_kmin = static_cast<int>(kmin);
            if (kmax > 0) cfg.scree_kmax = static_cast<int>(kmax);
            if (subsets) cfg.scree_subsets = true;
            if (subset_min > 0) cfg.subset_min_size = static_cast<int>(subset_min);
            stages.push_back(mvinf::Stage::scree);
        }
        if (rank->parsed()) {
            if (top > -2) cfg.rank_top = static_cast<int>(top);
            stages.push_back(mvinf::Stage::rank);
        }
        if (subgraph->parsed()) {
            if (!sg_view.empty()) cfg.subgraph_view = sg_view;
            if (sg_q >= 0.0) cfg.q = sg_q;
            stages.push_back(mvinf::Stage::subgraph);
        }
        if (baseline->parsed()) {
            if (!b_method.empty()) cfg.baseline_method = b_method;
            if (!b_view.empty()) cfg.baseline_view = b_view;
            if (b_damping >= 0.0) cfg.damping = b_damping;
            stages.push_back(mvinf::Stage::baseline);
        }
        if (regress->parsed()) {
            if (!r_outcome.empty()) cfg.regress_outcome_path = r_outcome;
            if (!r_outcome_col.empty()) cfg.regress_outcome_column = r_outcome_col;
            if (!r_covariates.empty()) cfg.regress_covariates_path = r_covariates;
            if (!r_cov_cols.empty()) cfg.regress_covariate_columns = r_cov_cols;
            if (!r_influence.empty()) cfg.regress_influence_paths = r_influence;
            if (!r_exclude.empty()) cfg.regress_exclude_ids = r_exclude;
            stages.push_back(mvinf::Stage::regress);
        }
        if (synth->parsed()) {
            if (!stages.empty()) {
                std::cerr << "error: synth cannot be combined with pipeline stages\n";
                return 2;
            }
            return run_synth(cfg, spec_path, g.seed >= 0);
        }
        if (stages.empty()) {
            std::cerr << "no subcommand given\n";
            return 2;
        }
        cfg.validate();
        return run_stages(cfg, std::move(stages));
    } catch (const mvinf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mvinf::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
