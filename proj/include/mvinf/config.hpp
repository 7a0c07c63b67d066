#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvinf/factorization.hpp"
#include "mvinf/graph.hpp"
#include "mvinf/netstats.hpp"
#include "mvinf/synth.hpp"

namespace mvinf {

/// Minimal TOML subset: key = value lines, [table] and [[table array]]
/// headers, strings, numbers, booleans, flat arrays, and # comments.
struct TomlValue {
    enum class Type { string, number, boolean, array };
    Type type = Type::string;
    std::string str;
    double num = 0.0;
    bool flag = false;
    std::vector<TomlValue> items;
    long line = 0;
};

struct TomlTable {
    std::map<std::string, TomlValue> values;
    long line = 0;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key, const std::string& context) const;
    double get_number(const std::string& key, double fallback) const;
    long get_integer(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_number_array(const std::string& key) const;
};

struct TomlDoc {
    TomlTable root;
    std::map<std::string, std::vector<TomlTable>> tables;

    const TomlTable* table(const std::string& name) const; // nullptr when absent
    const std::vector<TomlTable>* table_array(const std::string& name) const;
};

TomlDoc parse_toml(const std::string& text, const std::string& origin);
TomlDoc parse_toml_file(const std::string& path);

struct ViewConfig {
    std::string name;
    std::string path;
    ViewKind kind = ViewKind::weighted;
    WeightTransform transform = WeightTransform::none;
};

/// Everything the CLI pipeline needs, with defaults filled in.
struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";

    std::vector<ViewConfig> views;
    std::string metadata_path;

    std::vector<Statistic> statistics{Statistic::clustering, Statistic::betweenness,
                                      Statistic::closeness, Statistic::degree};
    bool standardize = true;

    FactorizationConfig fact;

    int scree_kmin = 1;
    int scree_kmax = 8;
    bool scree_subsets = false;
    int subset_min_size = 2;

    std::string subgraph_view; // empty: first configured view
    double q = 95.0;

    std::string baseline_method = "pagerank";
    std::string baseline_view; // empty: view named "retweet" if present, else first
    double damping = 0.85;

    int rank_top = -1; // -1: all rows

    std::string regress_outcome_path;
    std::string regress_outcome_column = "outcome";
    std::string regress_covariates_path;
    std::vector<std::string> regress_covariate_columns;
    std::vector<std::string> regress_influence_paths;
    std::vector<std::string> regress_exclude_ids;

    std::string source_text; // raw config bytes, hashed into the manifest

    static RunConfig from_doc(const TomlDoc& doc, const std::string& origin);
    static RunConfig from_file(const std::string& path);
    void validate() const;
};

/// Synthetic-network spec from its own TOML file.
SynthSpec synth_spec_from_doc(const TomlDoc& doc, const std::string& origin);
SynthSpec synth_spec_from_file(const std::string& path);

} // namespace mvinf
