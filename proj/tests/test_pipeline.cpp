#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mvinf/pipeline.hpp"
#include "mvinf/synth.hpp"
#include "test_util.hpp"

using namespace mvinf;
using testutil::TempDir;
using testutil::write_file;
namespace fs = std::filesystem;

namespace {

// A small two-community network written to disk, plus a config pointing at it.
RunConfig stage_inputs(const fs::path& dir, std::uint64_t seed = 11) {
    SynthSpec spec;
    spec.n = 18;
    spec.community_sizes = {10, 8};
    spec.within_probs = {0.6, 0.7};
    spec.between_prob = 0.08;
    SynthViewSpec w;
    w.name = "retweet";
    w.kind = ViewKind::weighted;
    w.transform = WeightTransform::log1p_counts;
    w.geom_p = 0.4;
    SynthViewSpec b;
    b.name = "mention";
    b.kind = ViewKind::binary;
    spec.views = {w, b};
    spec.seed = seed;
    SynthResult r = generate_synthetic(spec);
    save_edge_list(r.network.views[0], r.network.registry, (dir / "retweet.tsv").string());
    save_edge_list(r.network.views[1], r.network.registry, (dir / "mention.tsv").string());

    RunConfig cfg;
    cfg.seed = 3;
    cfg.out_dir = (dir / "out").string();
    ViewConfig v1;
    v1.name = "retweet";
    v1.path = (dir / "retweet.tsv").string();
    v1.kind = ViewKind::weighted;
    ViewConfig v2;
    v2.name = "mention";
    v2.path = (dir / "mention.tsv").string();
    v2.kind = ViewKind::binary;
    cfg.views = {v1, v2};
    cfg.fact.rank = 2;
    cfg.fact.restarts = 3;
    cfg.fact.max_iters = 60;
    cfg.source_text = "synthetic smoke config";
    cfg.validate();
    return cfg;
}

std::uint64_t file_hash(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

} // namespace

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("the stager keeps uncommitted work out of the way") {
    TempDir tmp;
    OutputStager stager((tmp.path() / "out").string());
    stager.write_text("a.csv", "x,y\n1,2\n");
    CHECK(fs::exists(tmp.path() / "out" / "a.csv.partial"));
    CHECK_FALSE(fs::exists(tmp.path() / "out" / "a.csv"));
    CHECK(stager.entries().empty());

    stager.commit();
    CHECK(fs::exists(tmp.path() / "out" / "a.csv"));
    CHECK_FALSE(fs::exists(tmp.path() / "out" / "a.csv.partial"));
    REQUIRE(stager.entries().size() == 1);
    CHECK(stager.entries()[0].name == "a.csv");
    CHECK(stager.entries()[0].bytes == 8);
    CHECK(stager.entries()[0].hash == fnv1a64("x,y\n1,2\n"));

    stager.write_text("b.csv", "left behind");
    // no commit: the partial file stays a partial file
    CHECK(fs::exists(tmp.path() / "out" / "b.csv.partial"));
    CHECK(stager.entries().size() == 1);
}

TEST_CASE("requesting rank pulls in its prerequisite stages") {
    TempDir tmp;
    RunConfig cfg = stage_inputs(tmp.path());
    PipelineOutcome out = run_pipeline(cfg, {Stage::rank});
    CHECK(out.stages_run == std::vector<std::string>{"stats", "factorize", "rank"});
    fs::path od(cfg.out_dir);
    for (const char* f : {"stats_retweet.csv", "stats_mention.csv", "summary.json",
                          "factors_theta.csv", "importance.csv", "fit.json", "rank.csv",
                          "manifest.json"})
        CHECK(fs::exists(od / f));
    CHECK_FALSE(fs::exists(od / "scree.csv"));

    // every manifest entry names a real file with the advertised hash
    std::ifstream min(od / "manifest.json");
    nlohmann::json manifest = nlohmann::json::parse(min);
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["tool"] == "mvinf");
    CHECK(manifest["seed"] == 3);
    CHECK(manifest["config_hash"] ==
          "fnv1a:" + hex64(fnv1a64("synthetic smoke config")));
    REQUIRE(manifest["outputs"].is_array());
    CHECK(manifest["outputs"].size() >= 7);
    for (const auto& entry : manifest["outputs"]) {
        fs::path p = od / entry["name"].get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(hex64(file_hash(p)) == entry["fnv1a64"].get<std::string>());
        CHECK(fs::file_size(p) == entry["bytes"].get<std::uint64_t>());
    }
}

TEST_CASE("two runs from one config produce identical outputs") {
    TempDir tmp;
    RunConfig cfg = stage_inputs(tmp.path());
    cfg.out_dir = (tmp.path() / "out1").string();
    run_pipeline(cfg, {Stage::stats, Stage::factorize, Stage::rank, Stage::baseline});
    cfg.out_dir = (tmp.path() / "out2").string();
    run_pipeline(cfg, {Stage::stats, Stage::factorize, Stage::rank, Stage::baseline});

    int compared = 0;
    for (const auto& e : fs::directory_iterator(tmp.path() / "out1")) {
        std::string name = e.path().filename().string();
        if (name == "manifest.json") continue; // differs only in generated_at
        CHECK(file_hash(e.path()) == file_hash(tmp.path() / "out2" / name));
        ++compared;
    }
    CHECK(compared >= 8);

    // manifests agree once the timestamp is ignored
    auto load = [](const fs::path& p) {
        std::ifstream in(p);
        nlohmann::json j = nlohmann::json::parse(in);
        j.erase("generated_at");
        return j;
    };
    CHECK(load(tmp.path() / "out1" / "manifest.json") ==
          load(tmp.path() / "out2" / "manifest.json"));
}

TEST_CASE("baseline defaults to the retweet view and honours overrides") {
    TempDir tmp;
    RunConfig cfg = stage_inputs(tmp.path());
    run_pipeline(cfg, {Stage::baseline});
    CHECK(fs::exists(fs::path(cfg.out_dir) / "baseline_pagerank_retweet.csv"));

    cfg.out_dir = (tmp.path() / "out_hits").string();
    cfg.baseline_method = "hits";
    cfg.baseline_view = "mention";
    run_pipeline(cfg, {Stage::baseline});
    fs::path hits_csv = fs::path(cfg.out_dir) / "baseline_hits_mention.csv";
    REQUIRE(fs::exists(hits_csv));
    std::ifstream in(hits_csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,authority,hub");
}

TEST_CASE("a failing stage is recorded in the manifest before rethrowing") {
    TempDir tmp;
    RunConfig cfg = stage_inputs(tmp.path());
    cfg.regress_outcome_path = (tmp.path() / "missing.csv").string();
    CHECK_THROWS_AS(run_pipeline(cfg, {Stage::stats, Stage::regress}), ConfigError);

    std::ifstream min(fs::path(cfg.out_dir) / "manifest.json");
    REQUIRE(min.good());
    nlohmann::json manifest = nlohmann::json::parse(min);
    CHECK(manifest["status"] == "failed");
    CHECK(manifest["failed_stage"] == "regress");
    // the stats stage committed before the failure and stays on disk
    CHECK(manifest["stages"] == nlohmann::json::array({"stats"}));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "stats_retweet.csv"));
}

TEST_CASE("the regress stage consumes pipeline outputs from disk") {
    TempDir tmp;
    RunConfig cfg = stage_inputs(tmp.path());
    run_pipeline(cfg, {Stage::factorize});

    // outcome counts loosely tied to importance, plus a party covariate
    NodeTable imp = load_node_table((fs::path(cfg.out_dir) / "importance.csv").string());
    std::ostringstream outcome;
    outcome << "id,n_bills\n";
    std::ostringstream covars;
    covars << "id,party\n";
    int i = 0;
    for (const auto& [id, row] : imp.rows) {
        double score = std::strtod(row.at("importance").c_str(), nullptr);
        outcome << id << ',' << static_cast<long>(1.0 + score * 2.0 + (i % 3)) << '\n';
        covars << id << ',' << (i % 2 ? "red" : "blue") << '\n';
        ++i;
    }
    write_file(tmp.file("bills.csv"), outcome.str());
    write_file(tmp.file("people.csv"), covars.str());

    cfg.regress_outcome_path = (tmp.path() / "bills.csv").string();
    cfg.regress_outcome_column = "n_bills";
    cfg.regress_covariates_path = (tmp.path() / "people.csv").string();
    cfg.regress_influence_paths = {(fs::path(cfg.out_dir) / "importance.csv").string()};
    cfg.out_dir = (tmp.path() / "out_regress").string();
    PipelineOutcome out = run_pipeline(cfg, {Stage::regress});
    CHECK(out.stages_run == std::vector<std::string>{"regress"});

    fs::path models = fs::path(cfg.out_dir) / "regress_models.csv";
    REQUIRE(fs::exists(models));
    std::ifstream in(models);
    std::string line;
    std::getline(in, line);
    CHECK(line == "model,rmse,coef,se,dispersion");
    std::getline(in, line);
    CHECK(line.rfind("controls,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("importance,", 0) == 0);

    std::ifstream fin(fs::path(cfg.out_dir) / "regress_fit.json");
    nlohmann::json fit = nlohmann::json::parse(fin);
    CHECK(fit["n"].get<long>() == 18);
    bool saw_party = false;
    for (const auto& c : fit["coefficients"])
        if (c["column"].get<std::string>().rfind("party=", 0) == 0) saw_party = true;
    CHECK(saw_party);
}
