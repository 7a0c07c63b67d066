#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvinf/errors.hpp"

namespace mvinf {

enum class ViewKind { binary, weighted };
enum class WeightTransform { none, log1p_counts };

const char* to_string(ViewKind k);
const char* to_string(WeightTransform t);
ViewKind view_kind_from_string(const std::string& s);
WeightTransform transform_from_string(const std::string& s);

/// Shared node index across views. Indices follow first appearance order.
class NodeRegistry {
public:
    int add(const std::string& id);
    int find(const std::string& id) const; // -1 when absent
    int at(const std::string& id) const;   // throws ConfigError when absent
    const std::string& id(int index) const { return ids_.at(static_cast<size_t>(index)); }
    int size() const { return static_cast<int>(ids_.size()); }
    const std::vector<std::string>& ids() const { return ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, int> index_;
};

struct NetworkView {
    std::string name;
    ViewKind kind = ViewKind::weighted;
    Eigen::MatrixXd adj; // adj(i, j) = weight of edge i -> j
    long self_loops_dropped = 0;
    long duplicate_rows_merged = 0;

    int n() const { return static_cast<int>(adj.rows()); }
    long edge_count() const;
};

/// Views over one shared node registry; adjacency matrices are padded to the
/// final registry size on assembly.
struct MultiviewNetwork {
    NodeRegistry registry;
    std::vector<NetworkView> views;

    int n() const { return registry.size(); }
    void add_view(NetworkView view);
    const NetworkView& view(const std::string& name) const;
    bool has_view(const std::string& name) const;
};

struct ViewSummary {
    std::string name;
    ViewKind kind = ViewKind::weighted;
    int n = 0;
    long edges = 0;
    long self_loops_dropped = 0;
    long duplicate_rows_merged = 0;
    double mean_degree = 0.0; // distinct in-or-out neighbours, averaged
    double density = 0.0;     // edges / (n (n-1))
    double total_weight = 0.0;
};

/// Node attribute table: id -> {column -> value}.
struct NodeTable {
    std::map<std::string, std::map<std::string, std::string>> rows;
    std::vector<std::string> columns; // order from header, excluding id
    long duplicate_ids = 0;           // later rows overwrote earlier ones
};

/// Parse a directed edge list (TSV or CSV, auto-detected). Rows are
/// "source,target[,weight]"; '#' comments and blank lines are skipped; an
/// optional header whose first field is "source" is skipped. Duplicate
/// (source,target) rows have raw weights summed before the transform;
/// self-loops are dropped and counted. New ids are appended to `registry`.
NetworkView load_edge_list(const std::string& path, const std::string& view_name,
                           ViewKind kind, WeightTransform transform,
                           NodeRegistry& registry);

/// Write a view back out as TSV with one row per nonzero edge, sorted by
/// (source index, target index). Weighted views carry a weight column
/// printed with 17 significant digits so a reload reproduces the matrix.
void save_edge_list(const NetworkView& view, const NodeRegistry& registry,
                    const std::string& path);
std::string edge_list_string(const NetworkView& view, const NodeRegistry& registry);

/// Render a view (optionally restricted to `subset` node ids) as Graphviz
/// DOT. Node fill colours encode the "party" column of `meta` when present.
/// An explicitly empty subset or an unknown id is a ConfigError.
std::string export_dot(const NetworkView& view, const NodeRegistry& registry,
                       const std::optional<std::vector<std::string>>& subset,
                       const NodeTable* meta);

std::vector<ViewSummary> densify_summary(const MultiviewNetwork& net);

/// Load a CSV/TSV node attribute table. The header's first column must be
/// "id"; duplicate ids keep the last row and are counted.
NodeTable load_node_table(const std::string& path);

/// Format a double with enough digits to round-trip (%.17g), locale-free.
std::string format_double(double x);

} // namespace mvinf
