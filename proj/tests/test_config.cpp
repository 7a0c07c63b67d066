#include "doctest.h"

#include <string>

#include "mvinf/config.hpp"

using namespace mvinf;

namespace {

const char* kFullConfig = R"(# pipeline settings
seed = 17
threads = 4
out = "results"

[[views]]
name = "retweet"
path = "retweet.tsv"
kind = "weighted"
transform = "log1p"

[[views]]
name = "mention"
path = "mention.tsv"
kind = "binary"

[metadata]
path = "nodes.csv"

[stats]
statistics = ["degree", "closeness"]
standardize = false

[factorization]
rank = 4
epsilon = 1e-5
tol = 1e-6
max_iters = 150
restarts = 12
init_mean = 0.5
init_sd = 2.0

[scree]
kmin = 2
kmax = 5
subsets = true
subset_min_size = 3

[subgraph]
view = "mention"
q = 90.0

[baseline]
method = "hits"
view = "retweet"
damping = 0.9

[rank]
top = 25

[regress]
outcome = "bills.csv"
outcome_column = "n_bills"
covariates = "nodes.csv"
covariate_columns = ["party", "tenure"]
influence = ["importance.csv"]
exclude_ids = ["n003"]
)";

} // namespace

TEST_CASE("a full config round-trips every section") {
    RunConfig cfg = RunConfig::from_doc(parse_toml(kFullConfig, "cfg"), "cfg");
    CHECK(cfg.seed == 17);
    CHECK(cfg.threads == 4);
    CHECK(cfg.out_dir == "results");
    REQUIRE(cfg.views.size() == 2);
    CHECK(cfg.views[0].name == "retweet");
    CHECK(cfg.views[0].kind == ViewKind::weighted);
    CHECK(cfg.views[0].transform == WeightTransform::log1p_counts);
    CHECK(cfg.views[1].kind == ViewKind::binary);
    CHECK(cfg.views[1].transform == WeightTransform::none);
    CHECK(cfg.metadata_path == "nodes.csv");
    REQUIRE(cfg.statistics.size() == 2);
    CHECK(cfg.statistics[0] == Statistic::degree);
    CHECK(cfg.statistics[1] == Statistic::closeness);
    CHECK_FALSE(cfg.standardize);
    CHECK(cfg.fact.rank == 4);
    CHECK(cfg.fact.epsilon == 1e-5);
    CHECK(cfg.fact.tol == 1e-6);
    CHECK(cfg.fact.max_iters == 150);
    CHECK(cfg.fact.restarts == 12);
    CHECK(cfg.fact.init_mean == 0.5);
    CHECK(cfg.fact.init_sd == 2.0);
    CHECK(cfg.scree_kmin == 2);
    CHECK(cfg.scree_kmax == 5);
    CHECK(cfg.scree_subsets);
    CHECK(cfg.subset_min_size == 3);
    CHECK(cfg.subgraph_view == "mention");
    CHECK(cfg.q == 90.0);
    CHECK(cfg.baseline_method == "hits");
    CHECK(cfg.baseline_view == "retweet");
    CHECK(cfg.damping == 0.9);
    CHECK(cfg.rank_top == 25);
    CHECK(cfg.regress_outcome_path == "bills.csv");
    CHECK(cfg.regress_outcome_column == "n_bills");
    CHECK(cfg.regress_covariates_path == "nodes.csv");
    REQUIRE(cfg.regress_covariate_columns.size() == 2);
    CHECK(cfg.regress_covariate_columns[1] == "tenure");
    REQUIRE(cfg.regress_influence_paths.size() == 1);
    CHECK(cfg.regress_exclude_ids == std::vector<std::string>{"n003"});
}

TEST_CASE("an empty config falls back to the documented defaults") {
    RunConfig cfg = RunConfig::from_doc(parse_toml("", "cfg"), "cfg");
    CHECK(cfg.seed == 1);
    CHECK(cfg.threads == 1);
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.views.empty());
    CHECK(cfg.statistics.size() == 4);
    CHECK(cfg.standardize);
    CHECK(cfg.fact.rank == 6);
    CHECK(cfg.fact.restarts == 30);
    CHECK(cfg.q == 95.0);
    CHECK(cfg.baseline_method == "pagerank");
    CHECK(cfg.damping == 0.85);
    CHECK(cfg.rank_top == -1);
}

TEST_CASE("toml values parse with comments, escapes and arrays") {
    TomlDoc doc = parse_toml(
        "title = \"a # not-comment \\\"quoted\\\" tab\\t end\" # trailing\n"
        "count = 42\n"
        "ratio = -0.5\n"
        "flag = true\n"
        "names = [\"a\", \"b\", \"c\"]\n"
        "nums = [1, 2.5, 3]\n"
        "single = \"solo\"\n",
        "t");
    CHECK(doc.root.get_string("title", "") == "a # not-comment \"quoted\" tab\t end");
    CHECK(doc.root.get_integer("count", 0) == 42);
    CHECK(doc.root.get_number("ratio", 0.0) == -0.5);
    CHECK(doc.root.get_bool("flag", false));
    CHECK(doc.root.get_string_array("names") == std::vector<std::string>{"a", "b", "c"});
    auto nums = doc.root.get_number_array("nums");
    REQUIRE(nums.size() == 3);
    CHECK(nums[1] == 2.5);
    // scalar promoted to a one-element list
    CHECK(doc.root.get_string_array("single") == std::vector<std::string>{"solo"});
}

TEST_CASE("integers reject fractional values but accept whole doubles") {
    TomlDoc doc = parse_toml("whole = 3.0\nfrac = 3.5\n", "t");
    CHECK(doc.root.get_integer("whole", 0) == 3);
    CHECK_THROWS_AS(doc.root.get_integer("frac", 0), ConfigError);
}

TEST_CASE("parse errors carry the origin and line number") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_toml(text, "bad.toml");
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            std::string msg = e.what();
            CHECK(msg.find("bad.toml:") != std::string::npos);
            CHECK(msg.find(needle) != std::string::npos);
        }
    };
    expect_error("key\n", "key = value");
    expect_error("[table\n", "malformed table header");
    expect_error("a = 1\na = 2\n", "duplicate key");
    expect_error("[t]\nx = 1\n[t]\ny = 2\n", "defined twice");
    expect_error("bad key = 1\n", "invalid key");
    expect_error("x = \"unterminated\n", "unterminated");
    expect_error("x = [1, [2]]\n", "nested");
    expect_error("x = @wat\n", "value");

    try {
        parse_toml("ok = 1\nnope\n", "bad.toml");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad.toml:2") != std::string::npos);
    }
}

TEST_CASE("validation rejects out-of-range settings") {
    auto parse_cfg = [](const std::string& extra) {
        return RunConfig::from_doc(parse_toml(extra, "cfg"), "cfg");
    };
    CHECK_THROWS_AS(parse_cfg("threads = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[factorization]\nrank = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[factorization]\nepsilon = 0.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[factorization]\nrestarts = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[scree]\nkmin = 3\nkmax = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[subgraph]\nq = 100.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[baseline]\nmethod = \"katz\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[baseline]\ndamping = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("[stats]\nstatistics = [\"sparkle\"]\n"), ConfigError);
    CHECK_THROWS_AS(parse_cfg("seed = -3\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_cfg("[[views]]\nname = \"a\"\npath = \"x\"\n[[views]]\nname = \"a\"\npath = \"y\"\n"),
        ConfigError);
    CHECK_THROWS_AS(parse_cfg("[[views]]\npath = \"x\"\n"), ConfigError);
}

TEST_CASE("synthetic specs parse sizes, probabilities and views") {
    const char* text = R"(n = 10
community_sizes = [6, 4]
within_prob = 0.4
between_prob = 0.05
hub_nodes = [0, 3]
hub_multiplier = 5.0
seed = 9

[[views]]
name = "w"
geom_p = 0.25

[[views]]
name = "b"
kind = "binary"
)";
    SynthSpec spec = synth_spec_from_doc(parse_toml(text, "s"), "s");
    CHECK(spec.n == 10);
    CHECK(spec.community_sizes == std::vector<int>{6, 4});
    REQUIRE(spec.within_probs.size() == 1);
    CHECK(spec.within_probs[0] == 0.4);
    CHECK(spec.between_prob == 0.05);
    CHECK(spec.hub_nodes == std::vector<int>{0, 3});
    CHECK(spec.hub_multiplier == 5.0);
    CHECK(spec.seed == 9);
    REQUIRE(spec.views.size() == 2);
    CHECK(spec.views[0].kind == ViewKind::weighted);
    CHECK(spec.views[0].transform == WeightTransform::log1p_counts); // weighted default
    CHECK(spec.views[0].geom_p == 0.25);
    CHECK(spec.views[1].kind == ViewKind::binary);
    CHECK(spec.views[1].transform == WeightTransform::none);

    TomlDoc per_comm = parse_toml("n = 4\ncommunity_sizes = [2, 2]\nwithin_probs = [0.9, 0.2]\n"
                                  "[[views]]\nname = \"b\"\nkind = \"binary\"\n",
                                  "s");
    SynthSpec spec2 = synth_spec_from_doc(per_comm, "s");
    CHECK(spec2.within_probs == std::vector<double>{0.9, 0.2});

    CHECK_THROWS_AS(synth_spec_from_doc(parse_toml("n = 4\n", "s"), "s"), ConfigError);
}
