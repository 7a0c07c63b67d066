#include "mvinf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mvinf {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, long line, const std::string& msg) {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

// strip a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_str) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_str = false;
            }
        } else if (c == '"') {
            in_str = true;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

TomlValue parse_scalar(const std::string& raw, const std::string& origin, long line);

TomlValue parse_value(const std::string& raw, const std::string& origin, long line) {
    std::string s = trim(raw);
    if (s.empty()) fail(origin, line, "missing value");
    if (s.front() == '[') {
        if (s.back() != ']') fail(origin, line, "unterminated array");
        TomlValue v;
        v.type = TomlValue::Type::array;
        v.line = line;
        std::string body = s.substr(1, s.size() - 2);
        // split on top-level commas, honouring string literals
        std::vector<std::string> parts;
        std::string cur;
        bool in_str = false;
        for (size_t i = 0; i < body.size(); ++i) {
            char c = body[i];
            if (in_str) {
                cur.push_back(c);
                if (c == '\\' && i + 1 < body.size()) {
                    cur.push_back(body[++i]);
                } else if (c == '"') {
                    in_str = false;
                }
            } else if (c == '"') {
                in_str = true;
                cur.push_back(c);
            } else if (c == ',') {
                parts.push_back(cur);
                cur.clear();
            } else if (c == '[' || c == ']') {
                fail(origin, line, "nested arrays are not supported");
            } else {
                cur.push_back(c);
            }
        }
        if (in_str) fail(origin, line, "unterminated string in array");
        if (!trim(cur).empty()) parts.push_back(cur);
        for (const auto& part : parts) {
            std::string p = trim(part);
            if (p.empty()) fail(origin, line, "empty array element");
            v.items.push_back(parse_scalar(p, origin, line));
        }
        return v;
    }
    return parse_scalar(s, origin, line);
}

TomlValue parse_scalar(const std::string& raw, const std::string& origin, long line) {
    TomlValue v;
    v.line = line;
    std::string s = trim(raw);
    if (s.empty()) fail(origin, line, "missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(origin, line, "unterminated string");
        v.type = TomlValue::Type::string;
        std::string out;
        for (size_t i = 1; i + 1 < s.size(); ++i) {
            char c = s[i];
            if (c == '\\') {
                if (i + 2 >= s.size()) fail(origin, line, "dangling escape");
                char e = s[++i];
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail(origin, line, std::string("unknown escape \\") + e);
                }
            } else if (c == '"') {
                fail(origin, line, "unexpected '\"' inside string (escape it)");
            } else {
                out.push_back(c);
            }
        }
        v.str = out;
        return v;
    }
    if (s == "true" || s == "false") {
        v.type = TomlValue::Type::boolean;
        v.flag = s == "true";
        return v;
    }
    char* end = nullptr;
    double num = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size() && std::isfinite(num)) {
        v.type = TomlValue::Type::number;
        v.num = num;
        return v;
    }
    fail(origin, line, "cannot parse value '" + s + "'");
}

const TomlValue* find_value(const TomlTable& t, const std::string& key) {
    auto it = t.values.find(key);
    return it == t.values.end() ? nullptr : &it->second;
}

[[noreturn]] void type_fail(const std::string& key, const char* want, const TomlValue& v) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(v.line) + "): expected " +
                      want);
}

} // namespace

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
    const TomlValue* v = find_value(*this, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::string) type_fail(key, "a string", *v);
    return v->str;
}

std::string TomlTable::require_string(const std::string& key, const std::string& context) const {
    const TomlValue* v = find_value(*this, key);
    if (!v) throw ConfigError(context + ": missing required key '" + key + "'");
    if (v->type != TomlValue::Type::string) type_fail(key, "a string", *v);
    return v->str;
}

double TomlTable::get_number(const std::string& key, double fallback) const {
    const TomlValue* v = find_value(*this, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::number) type_fail(key, "a number", *v);
    return v->num;
}

long TomlTable::get_integer(const std::string& key, long fallback) const {
    const TomlValue* v = find_value(*this, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::number) type_fail(key, "an integer", *v);
    double r = std::round(v->num);
    if (std::abs(v->num - r) > 1e-9) type_fail(key, "an integer", *v);
    return static_cast<long>(r);
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
    const TomlValue* v = find_value(*this, key);
    if (!v) return fallback;
    if (v->type != TomlValue::Type::boolean) type_fail(key, "a boolean", *v);
    return v->flag;
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key) const {
    const TomlValue* v = find_value(*this, key);
    std::vector<std::string> out;
    if (!v) return out;
    if (v->type == TomlValue::Type::string) { // single value accepted
        out.push_back(v->str);
        return out;
    }
    if (v->type != TomlValue::Type::array) type_fail(key, "an array of strings", *v);
    for (const auto& item : v->items) {
        if (item.type != TomlValue::Type::string) type_fail(key, "an array of strings", *v);
        out.push_back(item.str);
    }
    return out;
}

std::vector<double> TomlTable::get_number_array(const std::string& key) const {
    const TomlValue* v = find_value(*this, key);
    std::vector<double> out;
    if (!v) return out;
    if (v->type == TomlValue::Type::number) {
        out.push_back(v->num);
        return out;
    }
    if (v->type != TomlValue::Type::array) type_fail(key, "an array of numbers", *v);
    for (const auto& item : v->items) {
        if (item.type != TomlValue::Type::number) type_fail(key, "an array of numbers", *v);
        out.push_back(item.num);
    }
    return out;
}

const TomlTable* TomlDoc::table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end() || it->second.empty()) return nullptr;
    return &it->second.front();
}

const std::vector<TomlTable>* TomlDoc::table_array(const std::string& name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
}

TomlDoc parse_toml(const std::string& text, const std::string& origin) {
    TomlDoc doc;
    TomlTable* current = &doc.root;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            bool array = s.size() > 1 && s[1] == '[';
            std::string close = array ? "]]" : "]";
            if (s.size() < 2 + close.size() ||
                s.substr(s.size() - close.size()) != close)
                fail(origin, lineno, "malformed table header");
            std::string name =
                trim(s.substr(array ? 2 : 1, s.size() - (array ? 4 : 2)));
            if (!valid_key(name)) fail(origin, lineno, "invalid table name '" + name + "'");
            auto& vec = doc.tables[name];
            if (array) {
                vec.emplace_back();
            } else {
                if (!vec.empty()) fail(origin, lineno, "table '" + name + "' defined twice");
                vec.emplace_back();
            }
            vec.back().line = lineno;
            current = &vec.back();
            continue;
        }
        size_t eq = std::string::npos;
        {
            bool in_str = false;
            for (size_t i = 0; i < s.size(); ++i) {
                char c = s[i];
                if (in_str) {
                    if (c == '\\')
                        ++i;
                    else if (c == '"')
                        in_str = false;
                } else if (c == '"') {
                    in_str = true;
                } else if (c == '=') {
                    eq = i;
                    break;
                }
            }
        }
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        if (!valid_key(key)) fail(origin, lineno, "invalid key '" + key + "'");
        if (current->values.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
        current->values[key] = parse_value(s.substr(eq + 1), origin, lineno);
    }
    return doc;
}

TomlDoc parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str(), path);
}

RunConfig RunConfig::from_doc(const TomlDoc& doc, const std::string& origin) {
    RunConfig cfg;
    const TomlTable& root = doc.root;
    long seed = root.get_integer("seed", 1);
    if (seed < 0) throw ConfigError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.threads = static_cast<int>(root.get_integer("threads", 1));
    cfg.out_dir = root.get_string("out", "out");

    if (const auto* views = doc.table_array("views")) {
        for (const auto& t : *views) {
            ViewConfig vc;
            vc.name = t.require_string("name", origin + ": [[views]]");
            vc.path = t.require_string("path", origin + ": view '" + vc.name + "'");
            vc.kind = view_kind_from_string(t.get_string("kind", "weighted"));
            vc.transform = transform_from_string(t.get_string("transform", "none"));
            cfg.views.push_back(std::move(vc));
        }
    }
    if (const auto* meta = doc.table("metadata")) cfg.metadata_path = meta->get_string("path", "");

    if (const auto* stats = doc.table("stats")) {
        auto names = stats->get_string_array("statistics");
        if (!names.empty()) {
            cfg.statistics.clear();
            for (const auto& s : names) cfg.statistics.push_back(statistic_from_string(s));
        }
        cfg.standardize = stats->get_bool("standardize", cfg.standardize);
    }

    if (const auto* fact = doc.table("factorization")) {
        cfg.fact.rank = static_cast<int>(fact->get_integer("rank", cfg.fact.rank));
        cfg.fact.epsilon = fact->get_number("epsilon", cfg.fact.epsilon);
        cfg.fact.tol = fact->get_number("tol", cfg.fact.tol);
        cfg.fact.max_iters = static_cast<int>(fact->get_integer("max_iters", cfg.fact.max_iters));
        cfg.fact.restarts = static_cast<int>(fact->get_integer("restarts", cfg.fact.restarts));
        cfg.fact.init_mean = fact->get_number("init_mean", cfg.fact.init_mean);
        cfg.fact.init_sd = fact->get_number("init_sd", cfg.fact.init_sd);
    }

    if (const auto* scree = doc.table("scree")) {
        cfg.scree_kmin = static_cast<int>(scree->get_integer("kmin", cfg.scree_kmin));
        cfg.scree_kmax = static_cast<int>(scree->get_integer("kmax", cfg.scree_kmax));
        cfg.scree_subsets = scree->get_bool("subsets", cfg.scree_subsets);
        cfg.subset_min_size =
            static_cast<int>(scree->get_integer("subset_min_size", cfg.subset_min_size));
    }

    if (const auto* sub = doc.table("subgraph")) {
        cfg.subgraph_view = sub->get_string("view", "");
        cfg.q = sub->get_number("q", cfg.q);
    }

    if (const auto* base = doc.table("baseline")) {
        cfg.baseline_method = base->get_string("method", cfg.baseline_method);
        cfg.baseline_view = base->get_string("view", "");
        cfg.damping = base->get_number("damping", cfg.damping);
    }

    if (const auto* rank = doc.table("rank"))
        cfg.rank_top = static_cast<int>(rank->get_integer("top", cfg.rank_top));

    if (const auto* reg = doc.table("regress")) {
        cfg.regress_outcome_path = reg->get_string("outcome", "");
        cfg.regress_outcome_column = reg->get_string("outcome_column", cfg.regress_outcome_column);
        cfg.regress_covariates_path = reg->get_string("covariates", "");
        cfg.regress_covariate_columns = reg->get_string_array("covariate_columns");
        cfg.regress_influence_paths = reg->get_string_array("influence");
        cfg.regress_exclude_ids = reg->get_string_array("exclude_ids");
    }

    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    RunConfig cfg = from_doc(parse_toml(text, path), path);
    cfg.source_text = text;
    return cfg;
}

void RunConfig::validate() const {
    if (threads < 1) throw ConfigError("threads must be at least 1");
    std::set<std::string> names;
    for (const auto& v : views) {
        if (v.name.empty()) throw ConfigError("view name must not be empty");
        if (!names.insert(v.name).second) throw ConfigError("duplicate view name '" + v.name + "'");
    }
    if (statistics.empty()) throw ConfigError("statistics list must not be empty");
    if (fact.rank < 1) throw ConfigError("rank must be at least 1");
    if (fact.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (fact.tol <= 0.0) throw ConfigError("tol must be positive");
    if (fact.max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (fact.restarts < 1) throw ConfigError("restarts must be at least 1");
    if (scree_kmin < 1 || scree_kmin > scree_kmax)
        throw ConfigError("scree range requires 1 <= kmin <= kmax");
    if (subset_min_size < 1) throw ConfigError("subset_min_size must be at least 1");
    if (q < 0.0 || q >= 100.0) throw ConfigError("percentile q must lie in [0, 100)");
    if (baseline_method != "pagerank" && baseline_method != "hits")
        throw ConfigError("baseline method must be 'pagerank' or 'hits'");
    if (damping < 0.0 || damping >= 1.0) throw ConfigError("damping must lie in [0, 1)");
}

SynthSpec synth_spec_from_doc(const TomlDoc& doc, const std::string& origin) {
    SynthSpec spec;
    const TomlTable& root = doc.root;
    spec.n = static_cast<int>(root.get_integer("n", 0));
    auto sizes = root.get_number_array("community_sizes");
    for (double s : sizes) spec.community_sizes.push_back(static_cast<int>(std::llround(s)));
    spec.within_probs = root.get_number_array("within_prob");
    if (spec.within_probs.empty()) spec.within_probs = root.get_number_array("within_probs");
    spec.between_prob = root.get_number("between_prob", 0.0);
    auto hubs = root.get_number_array("hub_nodes");
    for (double h : hubs) spec.hub_nodes.push_back(static_cast<int>(std::llround(h)));
    spec.hub_multiplier = root.get_number("hub_multiplier", 1.0);
    long seed = root.get_integer("seed", 1);
    if (seed < 0) throw ConfigError("seed must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(seed);
    const auto* views = doc.table_array("views");
    if (!views || views->empty()) throw ConfigError(origin + ": synthetic spec needs [[views]]");
    for (const auto& t : *views) {
        SynthViewSpec vs;
        vs.name = t.require_string("name", origin + ": [[views]]");
        vs.kind = view_kind_from_string(t.get_string("kind", "weighted"));
        vs.transform = transform_from_string(
            t.get_string("transform", vs.kind == ViewKind::weighted ? "log1p" : "none"));
        vs.geom_p = t.get_number("geom_p", 0.5);
        spec.views.push_back(std::move(vs));
    }
    return spec;
}

SynthSpec synth_spec_from_file(const std::string& path) {
    return synth_spec_from_doc(parse_toml_file(path), path);
}

} // namespace mvinf
