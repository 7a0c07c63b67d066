#include "mvinf/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mvinf {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_weight(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

const char* to_string(ViewKind k) {
    return k == ViewKind::binary ? "binary" : "weighted";
}

const char* to_string(WeightTransform t) {
    return t == WeightTransform::none ? "none" : "log1p";
}

ViewKind view_kind_from_string(const std::string& s) {
    if (s == "binary") return ViewKind::binary;
    if (s == "weighted") return ViewKind::weighted;
    throw ConfigError("unknown view kind '" + s + "' (expected binary or weighted)");
}

WeightTransform transform_from_string(const std::string& s) {
    if (s == "none") return WeightTransform::none;
    if (s == "log1p") return WeightTransform::log1p_counts;
    throw ConfigError("unknown weight transform '" + s + "' (expected none or log1p)");
}

int NodeRegistry::add(const std::string& id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    int idx = static_cast<int>(ids_.size());
    ids_.push_back(id);
    index_.emplace(id, idx);
    return idx;
}

int NodeRegistry::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

int NodeRegistry::at(const std::string& id) const {
    int idx = find(id);
    if (idx < 0) throw ConfigError("unknown node id '" + id + "'");
    return idx;
}

long NetworkView::edge_count() const {
    long c = 0;
    for (Eigen::Index j = 0; j < adj.cols(); ++j)
        for (Eigen::Index i = 0; i < adj.rows(); ++i)
            if (adj(i, j) != 0.0) ++c;
    return c;
}

void MultiviewNetwork::add_view(NetworkView view) {
    for (const auto& v : views)
        if (v.name == view.name)
            throw ConfigError("duplicate view name '" + view.name + "'");
    views.push_back(std::move(view));
    int total = registry.size();
    for (auto& v : views) {
        if (v.adj.rows() < total) {
            Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(total, total);
            padded.topLeftCorner(v.adj.rows(), v.adj.cols()) = v.adj;
            v.adj = std::move(padded);
        }
    }
}

const NetworkView& MultiviewNetwork::view(const std::string& name) const {
    for (const auto& v : views)
        if (v.name == name) return v;
    throw ConfigError("no view named '" + name + "'");
}

bool MultiviewNetwork::has_view(const std::string& name) const {
    for (const auto& v : views)
        if (v.name == name) return true;
    return false;
}

NetworkView load_edge_list(const std::string& path, const std::string& view_name,
                           ViewKind kind, WeightTransform transform,
                           NodeRegistry& registry) {
    if (kind == ViewKind::binary && transform == WeightTransform::log1p_counts)
        throw ConfigError("view '" + view_name + "': log1p transform requires a weighted view");

    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list '" + path + "'");

    std::map<std::pair<int, int>, double> sums;
    long self_loops = 0, merged = 0, data_rows = 0;
    char delim = 0;
    bool saw_first_data = false;

    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (delim == 0) delim = t.find('\t') != std::string::npos ? '\t' : ',';
        auto fields = split(t, delim);
        if (!saw_first_data) {
            saw_first_data = true;
            if (!fields.empty() && lower(fields[0]) == "source") continue; // header
        }
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError(where() + ": expected 2 or 3 columns, got " +
                             std::to_string(fields.size()));
        if (kind == ViewKind::weighted && fields.size() != 3)
            throw ParseError(where() + ": weighted view requires a weight column");
        if (fields[0].empty() || fields[1].empty())
            throw ParseError(where() + ": empty node id");

        double w = 1.0;
        if (fields.size() == 3) {
            if (!parse_weight(fields[2], w))
                throw ParseError(where() + ": non-numeric weight '" + fields[2] + "'");
            if (w < 0.0)
                throw ParseError(where() + ": negative weight " + fields[2]);
        }
        ++data_rows;
        int i = registry.add(fields[0]);
        int j = registry.add(fields[1]);
        if (i == j) {
            ++self_loops;
            continue;
        }
        auto [it, inserted] = sums.emplace(std::make_pair(i, j), 0.0);
        if (!inserted) ++merged;
        it->second += w;
    }
    if (data_rows == 0)
        throw ParseError(path + ": no data rows");

    NetworkView view;
    view.name = view_name;
    view.kind = kind;
    view.self_loops_dropped = self_loops;
    view.duplicate_rows_merged = merged;
    int n = registry.size();
    view.adj = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [key, raw] : sums) {
        double w = raw;
        if (kind == ViewKind::binary)
            w = 1.0;
        else if (transform == WeightTransform::log1p_counts)
            w = std::log1p(raw);
        view.adj(key.first, key.second) = w;
    }
    return view;
}

std::string edge_list_string(const NetworkView& view, const NodeRegistry& registry) {
    std::ostringstream out;
    int n = view.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double w = view.adj(i, j);
            if (w == 0.0) continue;
            out << registry.id(i) << '\t' << registry.id(j);
            if (view.kind == ViewKind::weighted) out << '\t' << format_double(w);
            out << '\n';
        }
    }
    return out.str();
}

void save_edge_list(const NetworkView& view, const NodeRegistry& registry,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << edge_list_string(view, registry);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string export_dot(const NetworkView& view, const NodeRegistry& registry,
                       const std::optional<std::vector<std::string>>& subset,
                       const NodeTable* meta) {
    int n = view.n();
    std::vector<bool> keep(static_cast<size_t>(n), true);
    std::vector<int> nodes;
    if (subset) {
        if (subset->empty()) throw ConfigError("export subset is empty");
        keep.assign(static_cast<size_t>(n), false);
        for (const auto& id : *subset) {
            int idx = registry.find(id);
            if (idx < 0 || idx >= n)
                throw ConfigError("export subset contains unknown node id '" + id + "'");
            if (!keep[static_cast<size_t>(idx)]) {
                keep[static_cast<size_t>(idx)] = true;
                nodes.push_back(idx);
            }
        }
        std::sort(nodes.begin(), nodes.end());
    } else {
        nodes.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) nodes[static_cast<size_t>(i)] = i;
    }

    // stable palette, assigned to party labels in sorted order
    static const char* kPalette[] = {"#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3",
                                     "#a6d854", "#ffd92f", "#e5c494", "#b3b3b3"};
    std::map<std::string, std::string> party_color;
    if (meta) {
        std::vector<std::string> parties;
        for (int idx : nodes) {
            auto it = meta->rows.find(registry.id(idx));
            if (it == meta->rows.end()) continue;
            auto pit = it->second.find("party");
            if (pit != it->second.end() && !pit->second.empty()) parties.push_back(pit->second);
        }
        std::sort(parties.begin(), parties.end());
        parties.erase(std::unique(parties.begin(), parties.end()), parties.end());
        for (size_t k = 0; k < parties.size(); ++k)
            party_color[parties[k]] = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    }

    std::ostringstream out;
    out << "digraph \"" << dot_escape(view.name) << "\" {\n";
    for (int idx : nodes) {
        const std::string& id = registry.id(idx);
        out << "  \"" << dot_escape(id) << "\"";
        std::string party;
        if (meta) {
            auto it = meta->rows.find(id);
            if (it != meta->rows.end()) {
                auto pit = it->second.find("party");
                if (pit != it->second.end()) party = pit->second;
            }
        }
        if (!party.empty())
            out << " [party=\"" << dot_escape(party) << "\", style=filled, fillcolor=\""
                << party_color[party] << "\"]";
        out << ";\n";
    }
    for (int i : nodes) {
        for (int j : nodes) {
            double w = view.adj(i, j);
            if (w == 0.0) continue;
            out << "  \"" << dot_escape(registry.id(i)) << "\" -> \""
                << dot_escape(registry.id(j)) << "\"";
            if (view.kind == ViewKind::weighted) out << " [weight=" << format_double(w) << "]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::vector<ViewSummary> densify_summary(const MultiviewNetwork& net) {
    std::vector<ViewSummary> out;
    out.reserve(net.views.size());
    for (const auto& v : net.views) {
        ViewSummary s;
        s.name = v.name;
        s.kind = v.kind;
        s.n = v.n();
        s.edges = v.edge_count();
        s.self_loops_dropped = v.self_loops_dropped;
        s.duplicate_rows_merged = v.duplicate_rows_merged;
        s.total_weight = v.adj.sum();
        int n = v.n();
        if (n > 0) {
            long deg_sum = 0;
            for (int i = 0; i < n; ++i) {
                long d = 0;
                for (int j = 0; j < n; ++j)
                    if (j != i && (v.adj(i, j) != 0.0 || v.adj(j, i) != 0.0)) ++d;
                deg_sum += d;
            }
            s.mean_degree = static_cast<double>(deg_sum) / n;
            if (n > 1)
                s.density = static_cast<double>(s.edges) / (static_cast<double>(n) * (n - 1));
        }
        out.push_back(std::move(s));
    }
    return out;
}

NodeTable load_node_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open node table '" + path + "'");
    NodeTable table;
    std::string line;
    long lineno = 0;
    char delim = 0;
    bool have_header = false;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (delim == 0) delim = t.find('\t') != std::string::npos ? '\t' : ',';
        auto fields = split(t, delim);
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        if (!have_header) {
            if (fields.empty() || lower(fields[0]) != "id")
                throw ParseError(where() + ": first header column must be 'id'");
            header = fields;
            table.columns.assign(header.begin() + 1, header.end());
            have_header = true;
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError(where() + ": expected " + std::to_string(header.size()) +
                             " columns, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(where() + ": empty id");
        std::map<std::string, std::string> row;
        for (size_t c = 1; c < fields.size(); ++c) row[header[c]] = fields[c];
        auto [it, inserted] = table.rows.emplace(fields[0], std::move(row));
        if (!inserted) {
            ++table.duplicate_ids;
            std::map<std::string, std::string> replacement;
            for (size_t c = 1; c < fields.size(); ++c) replacement[header[c]] = fields[c];
            it->second = std::move(replacement);
        }
    }
    if (!have_header) throw ParseError(path + ": no header row");
    return table;
}

} // namespace mvinf
