#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "epa/attack.hpp"
#include "epa/baselines.hpp"
#include "epa/detection.hpp"
#include "epa/engine.hpp"
#include "epa/error.hpp"
#include "epa/generators.hpp"
#include "epa/io.hpp"
#include "epa/metrics.hpp"
#include "epa/report.hpp"
#include "epa/structure.hpp"

namespace epa {

struct PlantedSpec {
    std::vector<std::size_t> sizes{32, 32, 32, 32};
    double p_in = 0.3;
    double p_out = 0.02;
    std::uint64_t seed = 0;
};

/// A graph read from disk or drawn from the planted-partition generator.
struct DatasetSpec {
    std::string name;
    std::optional<std::string> path;
    GraphFormat format = GraphFormat::EdgeList;
    std::optional<PlantedSpec> planted;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    Method method = Method::Epa;
    std::string scale = "global";
    std::string target; // selector, see select_target_*
    std::optional<std::size_t> budget;
    std::optional<double> budget_pct;
    GAConfig ga;
    std::vector<Detector> detectors{Detector::Louvain};
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;
    std::optional<std::string> output;
    ReportFormat output_format = ReportFormat::Csv;
    bool record_walltime = true;
};

inline constexpr double default_budget_pct = 5.0;

/// θ from an explicit budget or k% of the links, rounded up and at least 1.
inline std::size_t resolve_budget(const ExperimentConfig& cfg, std::size_t edge_count) {
    if (cfg.budget)
        return *cfg.budget;
    const double k = cfg.budget_pct.value_or(default_budget_pct);
    const auto b = static_cast<std::size_t>(std::ceil(k * static_cast<double>(edge_count) / 100.0 - 1e-9));
    return std::max<std::size_t>(b, 1);
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
            throw ConfigError("unknown key '" + where + k + "'");
    }
}

template <typename T>
T config_value(const nlohmann::json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("key '" + where + key + "' has the wrong type");
    }
}

inline void check_range(bool ok, const std::string& key, const std::string& what) {
    if (!ok)
        throw ConfigError("key '" + key + "' " + what);
}

} // namespace detail

inline void validate(const ExperimentConfig& cfg) {
    if (!cfg.dataset.path && !cfg.dataset.planted)
        throw ConfigError("key 'dataset' needs a path or a planted generator");
    if (cfg.scale != "global" && cfg.scale != "community" && cfg.scale != "node")
        throw ConfigError("key 'scale' must be global, community or node");
    if (auto s = method_scale_index(cfg.method)) {
        static const char* names[] = {"global", "community", "node"};
        if (cfg.scale != names[*s])
            throw ConfigError("key 'method' " + method_name(cfg.method) + " runs at " + names[*s] + " scale only");
    }
    detail::check_range(!cfg.budget || *cfg.budget >= 1, "budget", "must be at least 1");
    detail::check_range(!cfg.budget_pct || (*cfg.budget_pct > 0.0 && *cfg.budget_pct <= 100.0), "budget_pct",
                        "must lie in (0,100]");
    detail::check_range(cfg.repetitions >= 1, "repetitions", "must be at least 1");
    detail::check_range(!cfg.detectors.empty(), "detectors", "must not be empty");
    detail::check_range(cfg.ga.population >= 2, "ga.population", "must be at least 2");
    detail::check_range(cfg.ga.crossover_rate >= 0.0 && cfg.ga.crossover_rate <= 1.0, "ga.crossover_rate",
                        "must lie in [0,1]");
    detail::check_range(cfg.ga.mutation_rate >= 0.0 && cfg.ga.mutation_rate <= 1.0, "ga.mutation_rate",
                        "must lie in [0,1]");
    detail::check_range(cfg.ga.attenuation > 0.0, "ga.c", "must be positive");
    detail::check_range(cfg.ga.epsilon >= 0.0 && cfg.ga.epsilon <= 1.0, "ga.epsilon", "must lie in [0,1]");
    if (cfg.dataset.planted) {
        const auto& p = *cfg.dataset.planted;
        detail::check_range(!p.sizes.empty(), "dataset.planted.sizes", "must not be empty");
        detail::check_range(p.p_in >= 0.0 && p.p_in <= 1.0, "dataset.planted.p_in", "must lie in [0,1]");
        detail::check_range(p.p_out >= 0.0 && p.p_out <= 1.0, "dataset.planted.p_out", "must lie in [0,1]");
    }
}

/// Reads an experiment description. Every key is optional except `dataset`;
/// unknown keys and out-of-range values raise ConfigError naming the key.
inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
    using detail::config_value;
    detail::reject_unknown(j,
                           {"dataset", "method", "scale", "target", "budget", "budget_pct", "ga", "detectors",
                            "repetitions", "seed", "output", "output_format", "record_walltime"},
                           "");
    ExperimentConfig cfg;
    if (!j.contains("dataset"))
        throw ConfigError("missing key 'dataset'");
    const auto& d = j.at("dataset");
    detail::reject_unknown(d, {"name", "path", "format", "planted"}, "dataset.");
    if (d.contains("path"))
        cfg.dataset.path = config_value<std::string>(d, "path", "dataset.");
    if (d.contains("format")) {
        try {
            cfg.dataset.format = parse_graph_format(config_value<std::string>(d, "format", "dataset."));
        } catch (const ParseError&) {
            throw ConfigError("key 'dataset.format' must be edgelist or gml");
        }
    }
    if (d.contains("planted")) {
        const auto& p = d.at("planted");
        detail::reject_unknown(p, {"sizes", "p_in", "p_out", "seed"}, "dataset.planted.");
        PlantedSpec spec;
        if (p.contains("sizes"))
            spec.sizes = config_value<std::vector<std::size_t>>(p, "sizes", "dataset.planted.");
        if (p.contains("p_in"))
            spec.p_in = config_value<double>(p, "p_in", "dataset.planted.");
        if (p.contains("p_out"))
            spec.p_out = config_value<double>(p, "p_out", "dataset.planted.");
        if (p.contains("seed"))
            spec.seed = config_value<std::uint64_t>(p, "seed", "dataset.planted.");
        cfg.dataset.planted = spec;
    }
    if (cfg.dataset.path && cfg.dataset.planted)
        throw ConfigError("key 'dataset' takes either a path or a planted generator");
    cfg.dataset.name = d.contains("name") ? config_value<std::string>(d, "name", "dataset.")
                       : cfg.dataset.path ? *cfg.dataset.path
                                          : std::string("planted");

    if (j.contains("method")) {
        try {
            cfg.method = parse_method(config_value<std::string>(j, "method", ""));
        } catch (const ConfigError&) {
            throw ConfigError("key 'method' must be one of epa, ab, ad, aq, as, dw, dr, random");
        }
    }
    if (j.contains("scale"))
        cfg.scale = config_value<std::string>(j, "scale", "");
    else if (auto s = method_scale_index(cfg.method))
        cfg.scale = *s == 1 ? "community" : *s == 2 ? "node" : "global";
    if (j.contains("target"))
        cfg.target = config_value<std::string>(j, "target", "");
    if (j.contains("budget"))
        cfg.budget = config_value<std::size_t>(j, "budget", "");
    if (j.contains("budget_pct"))
        cfg.budget_pct = config_value<double>(j, "budget_pct", "");
    if (cfg.budget && cfg.budget_pct)
        throw ConfigError("keys 'budget' and 'budget_pct' are mutually exclusive");
    if (j.contains("ga")) {
        const auto& g = j.at("ga");
        detail::reject_unknown(
            g, {"population", "generations", "crossover_rate", "mutation_rate", "c", "epsilon", "node_mode", "threads"},
            "ga.");
        if (g.contains("population"))
            cfg.ga.population = config_value<std::size_t>(g, "population", "ga.");
        if (g.contains("generations"))
            cfg.ga.generations = config_value<std::size_t>(g, "generations", "ga.");
        if (g.contains("crossover_rate"))
            cfg.ga.crossover_rate = config_value<double>(g, "crossover_rate", "ga.");
        if (g.contains("mutation_rate"))
            cfg.ga.mutation_rate = config_value<double>(g, "mutation_rate", "ga.");
        if (g.contains("c"))
            cfg.ga.attenuation = config_value<double>(g, "c", "ga.");
        if (g.contains("epsilon"))
            cfg.ga.epsilon = config_value<double>(g, "epsilon", "ga.");
        if (g.contains("node_mode")) {
            const auto mode = config_value<std::string>(g, "node_mode", "ga.");
            if (mode == "add")
                cfg.ga.node_mode = NodeAttackMode::AddOnly;
            else if (mode == "rewire")
                cfg.ga.node_mode = NodeAttackMode::Rewire;
            else
                throw ConfigError("key 'ga.node_mode' must be add or rewire");
        }
        if (g.contains("threads"))
            cfg.ga.threads = config_value<std::size_t>(g, "threads", "ga.");
    }
    if (j.contains("detectors")) {
        cfg.detectors.clear();
        for (const auto& name : config_value<std::vector<std::string>>(j, "detectors", "")) {
            try {
                cfg.detectors.push_back(parse_detector(name));
            } catch (const Error&) {
                throw ConfigError("key 'detectors' has unknown detector '" + name + "'");
            }
        }
    }
    if (j.contains("repetitions"))
        cfg.repetitions = config_value<std::size_t>(j, "repetitions", "");
    if (j.contains("seed"))
        cfg.seed = config_value<std::uint64_t>(j, "seed", "");
    if (j.contains("output"))
        cfg.output = config_value<std::string>(j, "output", "");
    if (j.contains("output_format")) {
        try {
            cfg.output_format = parse_report_format(config_value<std::string>(j, "output_format", ""));
        } catch (const ConfigError&) {
            throw ConfigError("key 'output_format' must be csv or json");
        }
    }
    if (j.contains("record_walltime"))
        cfg.record_walltime = config_value<bool>(j, "record_walltime", "");
    validate(cfg);
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config_json(j);
}

inline LoadedGraph load_dataset(const DatasetSpec& spec) {
    if (spec.path) {
        if (!std::filesystem::is_regular_file(*spec.path))
            throw ConfigError("dataset.path: cannot open '" + *spec.path + "'");
        return load_graph(*spec.path, spec.format);
    }
    const auto& p = *spec.planted;
    auto pg = generate_planted_partition(p.sizes, p.p_in, p.p_out, p.seed);
    LoadedGraph lg{std::move(pg.graph), {}, std::move(pg.truth)};
    for (NodeId u = 0; u < lg.graph.node_count(); ++u)
        lg.labels.push_back(std::to_string(u));
    return lg;
}

/// Community by size rank in `p`: "0" or "size:0" is the largest, ties go to
/// the lower community index.
inline CommunityId select_target_community(const Partition& p, const std::string& selector) {
    std::string s = selector.empty() ? "0" : selector;
    if (s.rfind("size:", 0) == 0)
        s = s.substr(5);
    std::size_t rank = 0;
    try {
        std::size_t used = 0;
        rank = std::stoul(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ConfigError("key 'target' must be a community size rank, got '" + selector + "'");
    }
    const auto sizes = p.sizes();
    std::vector<CommunityId> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](CommunityId a, CommunityId b) { return sizes[a] > sizes[b]; });
    if (rank >= order.size())
        throw InfeasibleAttack("only " + std::to_string(order.size()) + " communities to choose from");
    return order[rank];
}

namespace detail {

/// Position of each node when sorted by decreasing key, ties by lower ID.
inline std::vector<std::size_t> descending_ranks(const std::vector<double>& key) {
    std::vector<NodeId> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return key[a] > key[b] + 1e-12; });
    std::vector<std::size_t> rank(key.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        rank[order[i]] = i;
    return rank;
}

} // namespace detail

/// Target node from a selector: "T1" (largest degree), "T2" (largest
/// betweenness), "T3" (smallest sum of degree and betweenness ranks),
/// "degree:k", "betweenness:k", "combined:k" for the k-th such node, or
/// "node:<id>". Ties go to the lower node ID.
inline NodeId select_target_node(const Graph& g, const std::string& selector) {
    std::string s = selector.empty() ? "T1" : selector;
    if (s == "T1")
        s = "degree:0";
    else if (s == "T2")
        s = "betweenness:0";
    else if (s == "T3")
        s = "combined:0";
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw ConfigError("key 'target' is not a node selector: '" + selector + "'");
    const std::string kind = s.substr(0, colon);
    std::size_t k = 0;
    try {
        std::size_t used = 0;
        k = std::stoul(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1)
            throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ConfigError("key 'target' is not a node selector: '" + selector + "'");
    }
    if (k >= g.node_count())
        throw InfeasibleAttack("target selector '" + selector + "' exceeds the node count");
    if (kind == "node")
        return static_cast<NodeId>(k);
    std::vector<double> degree(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u)
        degree[u] = static_cast<double>(g.degree(u));
    std::vector<double> key;
    if (kind == "degree") {
        key = degree;
    } else if (kind == "betweenness") {
        key = node_betweenness(g);
    } else if (kind == "combined") {
        const auto rd = detail::descending_ranks(degree);
        const auto rb = detail::descending_ranks(node_betweenness(g));
        key.resize(g.node_count());
        for (NodeId u = 0; u < g.node_count(); ++u)
            key[u] = -static_cast<double>(rd[u] + rb[u]);
    } else {
        throw ConfigError("key 'target' has unknown node ranking '" + kind + "'");
    }
    const auto rank = detail::descending_ranks(key);
    return static_cast<NodeId>(std::find(rank.begin(), rank.end(), k) - rank.begin());
}

/// Runs one attack of the configured method on `g` for seed `seed`.
inline AttackReport run_attack(const ExperimentConfig& cfg, const Graph& g, std::uint64_t seed) {
    GAConfig ga = cfg.ga;
    ga.seed = seed;
    ga.max_budget = resolve_budget(cfg, g.edge_count());
    const Partition baseline = louvain(g, seed);

    AttackScale scale = GlobalScale{};
    if (cfg.scale == "community")
        scale = TargetCommunityScale{select_target_community(baseline, cfg.target)};
    else if (cfg.scale == "node")
        scale = TargetNodeScale{select_target_node(g, cfg.target)};

    switch (cfg.method) {
    case Method::Epa:
        return run_epa(AttackContext(g, scale, ga, baseline));
    case Method::AB:
        return report_from_perturbation(g, "ab", scale, attack_AB(g, ga.max_budget), seed);
    case Method::AD:
        return report_from_perturbation(g, "ad", scale, attack_AD(g, ga.max_budget), seed);
    case Method::Random:
        return report_from_perturbation(g, "random", scale, random_rewiring(g, ga.max_budget, seed), seed);
    case Method::AQ:
        return attack_AQ(g, ga);
    case Method::AS:
        return attack_AS(g, ga);
    case Method::Dw: {
        const auto members = baseline.members(std::get<TargetCommunityScale>(scale).community);
        return report_from_perturbation(g, "dw", scale, attack_Dw(g, members, ga.max_budget, seed), seed);
    }
    case Method::Dr: {
        const NodeId t = std::get<TargetNodeScale>(scale).node;
        return attack_Dr(g, t, [seed](const Graph& x) { return louvain(x, seed); }, ga.epsilon, ga.max_budget, seed);
    }
    }
    throw ConfigError("unsupported method");
}

/// Scores one attack under one detector.
inline ResultRow score_attack(const ExperimentConfig& cfg, const LoadedGraph& data, const AttackReport& report,
                              Detector detector, std::uint64_t seed) {
    ResultRow row;
    row.dataset = cfg.dataset.name;
    row.method = method_name(cfg.method);
    row.scale = cfg.scale;
    row.detector = std::string(detector_name(detector));
    row.seed = seed;
    row.budget = report.budget;
    const Partition before = detect(data.graph, detector, seed);
    const Partition after = detect(report.adversarial, detector, seed);
    row.nmi = nmi(before, after);
    row.ari = ari(before, after);
    if (data.truth) {
        row.nmi_gt = nmi(*data.truth, after);
        row.ari_gt = ari(*data.truth, after);
    }
    if (const auto* tc = std::get_if<TargetCommunityScale>(&report.scale)) {
        const auto members = report.baseline.members(tc->community);
        if (members.size() >= 2)
            row.h = deception_score(members, after, report.adversarial);
    }
    if (const auto* tn = std::get_if<TargetNodeScale>(&report.scale)) {
        row.delta = node_attack_succeeded(before, after, tn->node, cfg.ga.epsilon);
        row.degree_increment_pct =
            100.0 * static_cast<double>(report.budget) / static_cast<double>(data.graph.degree(tn->node));
    }
    return row;
}

/// Repetition r uses seed base + r. Infeasible attacks yield one error row
/// per detector and the run continues. Rows come back sorted by (seed,
/// detector name).
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const LoadedGraph data = load_dataset(cfg.dataset);
    std::vector<ResultRow> rows;
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
        const std::uint64_t seed = cfg.seed + r;
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<AttackReport> report;
        std::string failure;
        try {
            report = run_attack(cfg, data.graph, seed);
        } catch (const InfeasibleAttack& e) {
            failure = e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (Detector d : cfg.detectors) {
            if (!report) {
                ResultRow row;
                row.dataset = cfg.dataset.name;
                row.method = method_name(cfg.method);
                row.scale = cfg.scale;
                row.detector = std::string(detector_name(d));
                row.seed = seed;
                row.error = failure;
                rows.push_back(std::move(row));
                continue;
            }
            ResultRow row = score_attack(cfg, data, *report, d, seed);
            if (cfg.record_walltime)
                row.walltime_s = elapsed;
            rows.push_back(std::move(row));
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.seed, a.detector) < std::tie(b.seed, b.detector);
    });
    return rows;
}

} // namespace epa
