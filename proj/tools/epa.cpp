#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "epa/experiment.hpp"
#include "epa/io.hpp"
#include "epa/report.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_infeasible = 3;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

/// Evaluation threads: the configured count (0 = all cores) capped by EPA_THREADS.
std::size_t thread_count(std::size_t configured) {
    std::size_t n = configured == 0 ? std::max(1u, std::thread::hardware_concurrency()) : configured;
    if (const char* env = std::getenv("EPA_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1)
            throw epa::ConfigError("EPA_THREADS must be a positive integer");
        n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return n;
}

struct AttackFlags {
    std::string config;
    std::string dataset;
    std::string format;
    std::string method;
    std::string scale;
    std::string target;
    std::string detectors;
    std::optional<double> budget_pct;
    std::optional<std::size_t> budget;
    std::optional<double> c;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> generations;
    std::optional<std::size_t> population;
    std::string node_mode;
    std::string out;
    std::string out_format;
    bool no_walltime = false;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f) {
    cmd->add_option("--config", f.config, "JSON experiment config; flags override its values");
    cmd->add_option("--dataset", f.dataset, "graph file");
    cmd->add_option("--format", f.format, "graph file format")->check(CLI::IsMember({"edgelist", "gml"}));
    cmd->add_option("--scale", f.scale, "attack scale")->check(CLI::IsMember({"global", "community", "node"}));
    cmd->add_option("--target", f.target,
                    "community size rank, or node selector T1|T2|T3|degree:k|betweenness:k|combined:k|node:<id>");
    cmd->add_option("--budget-pct", f.budget_pct, "budget as k% of the links");
    cmd->add_option("--budget", f.budget, "maximum budget θ");
    cmd->add_option("--c", f.c, "attenuation factor");
    cmd->add_option("--epsilon", f.epsilon, "target-node success threshold");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--reps", f.reps, "repetitions");
    cmd->add_option("--generations", f.generations, "GA generations");
    cmd->add_option("--population", f.population, "GA population size");
    cmd->add_option("--node-mode", f.node_mode, "target-node attack mode")->check(CLI::IsMember({"add", "rewire"}));
    cmd->add_option("--detectors", f.detectors, "comma-separated detectors to evaluate (louvain,greedy,labelprop)");
    cmd->add_option("--out", f.out, "result file (stdout when omitted)");
    cmd->add_option("--out-format", f.out_format, "result format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--no-walltime", f.no_walltime, "leave walltime_s empty for reproducible output");
}

/// Merges the config file (if any) with command-line flags into JSON and
/// validates it through the regular config parser.
epa::ExperimentConfig build_config(const AttackFlags& f, const std::string& method) {
    nlohmann::json j = nlohmann::json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in)
            throw epa::ConfigError("cannot read config file " + f.config);
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw epa::ConfigError("config file " + f.config + " is not valid JSON: " + e.what());
        }
    }
    if (!f.dataset.empty()) {
        j["dataset"] = nlohmann::json{{"path", f.dataset}};
    }
    if (!f.format.empty()) {
        if (!j.contains("dataset"))
            throw epa::ConfigError("--format needs --dataset");
        j["dataset"]["format"] = f.format;
    }
    if (!method.empty())
        j["method"] = method;
    if (!f.scale.empty())
        j["scale"] = f.scale;
    if (!f.target.empty())
        j["target"] = f.target;
    if (f.budget) {
        j.erase("budget_pct");
        j["budget"] = *f.budget;
    }
    if (f.budget_pct) {
        j.erase("budget");
        j["budget_pct"] = *f.budget_pct;
    }
    if (f.c)
        j["ga"]["c"] = *f.c;
    if (f.epsilon)
        j["ga"]["epsilon"] = *f.epsilon;
    if (f.generations)
        j["ga"]["generations"] = *f.generations;
    if (f.population)
        j["ga"]["population"] = *f.population;
    if (!f.node_mode.empty())
        j["ga"]["node_mode"] = f.node_mode;
    if (f.seed)
        j["seed"] = *f.seed;
    if (f.reps)
        j["repetitions"] = *f.reps;
    if (!f.detectors.empty())
        j["detectors"] = split_list(f.detectors);
    if (!f.out.empty())
        j["output"] = f.out;
    if (!f.out_format.empty())
        j["output_format"] = f.out_format;
    if (f.no_walltime)
        j["record_walltime"] = false;
    if (!j.contains("dataset"))
        throw epa::ConfigError("no dataset given (use --dataset or a config file)");
    const bool threads_set = j.contains("ga") && j["ga"].contains("threads");
    epa::ExperimentConfig cfg = epa::parse_config_json(j);
    cfg.ga.threads = thread_count(threads_set ? cfg.ga.threads : 0);
    return cfg;
}

void write_output(const std::vector<epa::ResultRow>& rows, const epa::ExperimentConfig& cfg) {
    if (cfg.output)
        epa::emit_report(rows, cfg.output_format, *cfg.output);
    else
        epa::write_rows(std::cout, rows, cfg.output_format);
}

int finish(const std::vector<epa::ResultRow>& rows) {
    for (const auto& r : rows) {
        if (r.error) {
            std::cerr << "infeasible attack (seed " << r.seed << "): " << *r.error << '\n';
            return exit_infeasible;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary perturbation attacks on community detection"};
    app.require_subcommand(1);

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "run a community detector and print the partition");
    std::string d_dataset;
    std::string d_format = "edgelist";
    std::string d_detector = "louvain";
    std::uint64_t d_seed = 0;
    std::string d_out;
    detect_cmd->add_option("--dataset", d_dataset, "graph file")->required();
    detect_cmd->add_option("--format", d_format, "graph file format")->check(CLI::IsMember({"edgelist", "gml"}));
    detect_cmd->add_option("--detector", d_detector, "detector")->check(CLI::IsMember({"louvain", "greedy", "labelprop"}));
    detect_cmd->add_option("--seed", d_seed, "seed");
    detect_cmd->add_option("--out", d_out, "write 'label community' lines here instead of stdout");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "run an attack with repetitions and report metrics");
    AttackFlags a_flags;
    std::string a_method;
    add_attack_flags(attack_cmd, a_flags);
    attack_cmd->add_option("--method", a_method, "attack method")
        ->check(CLI::IsMember({"epa", "ab", "ad", "aq", "as", "dw", "dr", "random"}));

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "draw a planted-partition graph");
    std::string g_sizes = "32,32,32,32";
    double g_pin = 0.3;
    double g_pout = 0.02;
    std::uint64_t g_seed = 0;
    std::string g_out;
    std::string g_format = "gml";
    gen_cmd->add_option("--sizes", g_sizes, "comma-separated community sizes");
    gen_cmd->add_option("--p-in", g_pin, "intra-community link probability");
    gen_cmd->add_option("--p-out", g_pout, "inter-community link probability");
    gen_cmd->add_option("--seed", g_seed, "seed");
    gen_cmd->add_option("--out", g_out, "output file (stdout when omitted)");
    gen_cmd->add_option("--format", g_format, "output format; gml keeps the planted labels")
        ->check(CLI::IsMember({"edgelist", "gml"}));

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "compare several methods on one dataset");
    AttackFlags b_flags;
    std::string b_methods = "epa,ab,ad,random";
    add_attack_flags(bench_cmd, b_flags);
    bench_cmd->add_option("--methods", b_methods, "comma-separated methods");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*detect_cmd) {
            const auto data = epa::load_graph(d_dataset, epa::parse_graph_format(d_format));
            const auto p = epa::detect(data.graph, epa::parse_detector(d_detector), d_seed);
            std::ofstream file;
            if (!d_out.empty()) {
                file.open(d_out);
                if (!file)
                    throw epa::Error("cannot write " + d_out);
            }
            std::ostream& out = d_out.empty() ? std::cout : file;
            for (epa::NodeId u = 0; u < data.graph.node_count(); ++u)
                out << data.labels[u] << ' ' << p.community_of(u) << '\n';
            std::cerr << "communities: " << p.community_count() << "  modularity: " << epa::modularity(data.graph, p);
            if (data.truth)
                std::cerr << "  nmi_gt: " << epa::nmi(*data.truth, p) << "  ari_gt: " << epa::ari(*data.truth, p);
            std::cerr << '\n';
            return 0;
        }
        if (*gen_cmd) {
            std::vector<std::size_t> sizes;
            for (const auto& s : split_list(g_sizes)) {
                try {
                    sizes.push_back(std::stoul(s));
                } catch (const std::exception&) {
                    throw epa::ConfigError("--sizes must list positive integers");
                }
            }
            const auto pg = epa::generate_planted_partition(sizes, g_pin, g_pout, g_seed);
            std::ofstream file;
            if (!g_out.empty()) {
                file.open(g_out);
                if (!file)
                    throw epa::Error("cannot write " + g_out);
            }
            std::ostream& out = g_out.empty() ? std::cout : file;
            if (g_format == "gml")
                epa::write_gml(out, pg.graph, &pg.truth);
            else
                epa::write_edge_list(out, pg.graph);
            return 0;
        }
        if (*attack_cmd) {
            const auto cfg = build_config(a_flags, a_method);
            const auto rows = epa::run_experiment(cfg);
            write_output(rows, cfg);
            return finish(rows);
        }
        if (*bench_cmd) {
            std::vector<epa::ResultRow> rows;
            std::optional<epa::ExperimentConfig> last;
            for (const auto& m : split_list(b_methods)) {
                auto cfg = build_config(b_flags, m);
                auto part = epa::run_experiment(cfg);
                rows.insert(rows.end(), part.begin(), part.end());
                last = cfg;
            }
            if (!last)
                throw epa::ConfigError("--methods is empty");
            write_output(rows, *last);
            if (!last->output)
                epa::write_summary(std::cerr, epa::summarize(rows), epa::ReportFormat::Csv);
            return finish(rows);
        }
    } catch (const epa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const epa::InfeasibleAttack& e) {
        std::cerr << "infeasible attack: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
