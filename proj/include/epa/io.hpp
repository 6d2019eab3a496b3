#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/partition.hpp"

namespace epa {

enum class GraphFormat { EdgeList, Gml };

inline GraphFormat parse_graph_format(std::string_view s) {
    if (s == "edgelist" || s == "edge-list")
        return GraphFormat::EdgeList;
    if (s == "gml")
        return GraphFormat::Gml;
    throw ConfigError("unknown graph format '" + std::string(s) + "'");
}

/// A graph as read from disk: dense node IDs, the original labels, and the
/// ground-truth communities when the file carries them.
struct LoadedGraph {
    Graph graph;
    std::vector<std::string> labels;
    std::optional<Partition> truth;
};

namespace detail {

/// Drops self-loops, duplicates and isolated nodes, then builds the graph.
/// `raw_edges` refer to indices into `labels`.
inline LoadedGraph finish_load(std::vector<std::string> labels,
                               const std::vector<std::pair<std::size_t, std::size_t>>& raw_edges,
                               const std::vector<std::optional<long long>>& values) {
    std::vector<char> used(labels.size(), 0);
    for (const auto& [a, b] : raw_edges) {
        if (a != b) {
            used[a] = 1;
            used[b] = 1;
        }
    }
    std::vector<NodeId> remap(labels.size(), 0);
    LoadedGraph out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (used[i]) {
            remap[i] = static_cast<NodeId>(out.labels.size());
            out.labels.push_back(std::move(labels[i]));
        }
    }
    if (out.labels.empty())
        throw ParseError("graph has no edges", 0);

    std::vector<NodePair> edges;
    edges.reserve(raw_edges.size());
    for (const auto& [a, b] : raw_edges)
        if (a != b)
            edges.emplace_back(remap[a], remap[b]);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.graph = Graph(out.labels.size(), std::move(edges));

    bool all_valued = !values.empty();
    std::vector<long long> truth;
    for (std::size_t i = 0; i < values.size() && all_valued; ++i) {
        if (!used[i])
            continue;
        if (!values[i])
            all_valued = false;
        else
            truth.push_back(*values[i]);
    }
    if (all_valued && truth.size() == out.labels.size())
        out.truth = Partition::from_labels(truth);
    return out;
}

} // namespace detail

/// Whitespace-separated endpoint pairs, one per line; '#' starts a comment.
/// Endpoints may be integers or arbitrary tokens and are mapped to dense IDs
/// in numeric order when every endpoint is an integer, otherwise in order of
/// first appearance.
inline LoadedGraph parse_edge_list(std::istream& in) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> ids;
    std::vector<std::pair<std::size_t, std::size_t>> raw;
    const auto intern = [&](const std::string& tok) {
        const auto [it, fresh] = ids.try_emplace(tok, labels.size());
        if (fresh)
            labels.push_back(tok);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        for (std::string tok; ls >> tok;)
            tokens.push_back(tok);
        if (tokens.empty())
            continue;
        if (tokens.size() != 2)
            throw ParseError("expected two endpoints, got " + std::to_string(tokens.size()) + " fields", lineno);
        const std::size_t a = intern(tokens[0]);
        const std::size_t b = intern(tokens[1]);
        raw.emplace_back(a, b);
    }

    // Integer labels keep their numeric order so that written graphs read back unchanged.
    const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& l) {
        return !l.empty() && l.size() < 19 && std::all_of(l.begin(), l.end(), [](unsigned char ch) { return std::isdigit(ch); });
    });
    if (numeric) {
        std::vector<std::size_t> order(labels.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return std::stoll(labels[x]) < std::stoll(labels[y]); });
        std::vector<std::size_t> rank(labels.size());
        std::vector<std::string> sorted(labels.size());
        for (std::size_t r = 0; r < order.size(); ++r) {
            rank[order[r]] = r;
            sorted[r] = labels[order[r]];
        }
        for (auto& [a, b] : raw) {
            a = rank[a];
            b = rank[b];
        }
        labels = std::move(sorted);
    }
    return detail::finish_load(std::move(labels), raw, {});
}

namespace detail {

struct GmlToken {
    enum class Kind { Word, Number, String, Open, Close, End } kind;
    std::string text;
    std::size_t line;
};

class GmlLexer {
public:
    explicit GmlLexer(std::istream& in) : in_(in) {}

    GmlToken next() {
        skip_space();
        const int c = in_.peek();
        if (c == EOF)
            return {GmlToken::Kind::End, {}, line_};
        if (c == '[') {
            in_.get();
            return {GmlToken::Kind::Open, "[", line_};
        }
        if (c == ']') {
            in_.get();
            return {GmlToken::Kind::Close, "]", line_};
        }
        if (c == '"') {
            in_.get();
            const std::size_t start = line_;
            std::string s;
            for (int ch = in_.get(); ch != '"'; ch = in_.get()) {
                if (ch == EOF)
                    throw ParseError("unterminated string", start);
                if (ch == '\n')
                    ++line_;
                s.push_back(static_cast<char>(ch));
            }
            return {GmlToken::Kind::String, s, start};
        }
        std::string s;
        while (in_.peek() != EOF && !std::isspace(in_.peek()) && in_.peek() != '[' && in_.peek() != ']')
            s.push_back(static_cast<char>(in_.get()));
        const bool numeric = !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' ||
                                            s[0] == '+' || s[0] == '.');
        return {numeric ? GmlToken::Kind::Number : GmlToken::Kind::Word, s, line_};
    }

private:
    void skip_space() {
        for (;;) {
            const int c = in_.peek();
            if (c == '\n') {
                ++line_;
                in_.get();
            } else if (c != EOF && std::isspace(c)) {
                in_.get();
            } else if (c == '#') {
                while (in_.peek() != EOF && in_.peek() != '\n')
                    in_.get();
            } else {
                return;
            }
        }
    }

    std::istream& in_;
    std::size_t line_ = 1;
};

/// GML value tree: scalars keep their text, lists keep ordered children.
struct GmlNode {
    std::string key;
    std::string scalar;
    bool is_list = false;
    std::size_t line = 0;
    std::vector<GmlNode> children;

    const GmlNode* find(std::string_view k) const {
        for (const auto& c : children)
            if (c.key == k)
                return &c;
        return nullptr;
    }
};

inline void parse_gml_list(GmlLexer& lex, GmlNode& parent, bool top) {
    for (;;) {
        GmlToken key = lex.next();
        if (key.kind == GmlToken::Kind::End) {
            if (!top)
                throw ParseError("unexpected end of file inside '" + parent.key + "'", key.line);
            return;
        }
        if (key.kind == GmlToken::Kind::Close) {
            if (top)
                throw ParseError("unbalanced ']'", key.line);
            return;
        }
        if (key.kind != GmlToken::Kind::Word)
            throw ParseError("expected a key, got '" + key.text + "'", key.line);
        GmlToken value = lex.next();
        GmlNode node{key.text, {}, false, key.line, {}};
        switch (value.kind) {
        case GmlToken::Kind::Open:
            node.is_list = true;
            parse_gml_list(lex, node, false);
            break;
        case GmlToken::Kind::Number:
        case GmlToken::Kind::String:
        case GmlToken::Kind::Word:
            node.scalar = value.text;
            break;
        default:
            throw ParseError("missing value for key '" + key.text + "'", key.line);
        }
        parent.children.push_back(std::move(node));
    }
}

inline long long gml_integer(const GmlNode& n) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(n.scalar, &pos);
        if (pos != n.scalar.size())
            throw ParseError("'" + n.key + "' is not an integer: " + n.scalar, n.line);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("'" + n.key + "' is not an integer: " + n.scalar, n.line);
    }
}

} // namespace detail

/// Subset of GML: `graph [ node [ id N label "..." value V ] edge [ source A target B ] ]`.
/// Node `value` fields, when present on every node, become the ground truth.
inline LoadedGraph parse_gml(std::istream& in) {
    detail::GmlLexer lex(in);
    detail::GmlNode root;
    detail::parse_gml_list(lex, root, true);
    const detail::GmlNode* g = root.find("graph");
    if (!g || !g->is_list)
        throw ParseError("no 'graph [ ... ]' block", 0);
    if (const auto* dir = g->find("directed"); dir && detail::gml_integer(*dir) != 0)
        throw ParseError("directed graphs are not supported", dir->line);

    std::vector<std::string> labels;
    std::vector<std::optional<long long>> values;
    std::map<long long, std::size_t> by_id;
    std::vector<std::pair<std::size_t, std::size_t>> raw;
    for (const auto& c : g->children) {
        if (c.key != "node" || !c.is_list)
            continue;
        const auto* id = c.find("id");
        if (!id)
            throw ParseError("node without id", c.line);
        const long long key = detail::gml_integer(*id);
        if (!by_id.try_emplace(key, labels.size()).second)
            throw ParseError("duplicate node id " + id->scalar, id->line);
        const auto* label = c.find("label");
        labels.push_back(label ? label->scalar : id->scalar);
        const auto* value = c.find("value");
        values.push_back(value ? std::optional<long long>(detail::gml_integer(*value)) : std::nullopt);
    }
    for (const auto& c : g->children) {
        if (c.key != "edge" || !c.is_list)
            continue;
        const auto* s = c.find("source");
        const auto* t = c.find("target");
        if (!s || !t)
            throw ParseError("edge without source/target", c.line);
        const auto si = by_id.find(detail::gml_integer(*s));
        const auto ti = by_id.find(detail::gml_integer(*t));
        if (si == by_id.end() || ti == by_id.end())
            throw ParseError("edge references an undeclared node", c.line);
        raw.emplace_back(si->second, ti->second);
    }
    return detail::finish_load(std::move(labels), raw, values);
}

inline LoadedGraph load_graph(const std::string& path, GraphFormat format) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    return format == GraphFormat::Gml ? parse_gml(in) : parse_edge_list(in);
}

inline LoadedGraph load_edge_list(const std::string& path) { return load_graph(path, GraphFormat::EdgeList); }

inline void write_edge_list(std::ostream& out, const Graph& g) {
    for (const auto& e : g.edges())
        out << e.u << ' ' << e.v << '\n';
}

inline void write_gml(std::ostream& out, const Graph& g, const Partition* truth = nullptr) {
    out << "graph\n[\n  directed 0\n";
    for (NodeId u = 0; u < g.node_count(); ++u) {
        out << "  node\n  [\n    id " << u << "\n    label \"" << u << "\"\n";
        if (truth)
            out << "    value " << truth->community_of(u) << "\n";
        out << "  ]\n";
    }
    for (const auto& e : g.edges())
        out << "  edge\n  [\n    source " << e.u << "\n    target " << e.v << "\n  ]\n";
    out << "]\n";
}

} // namespace epa
