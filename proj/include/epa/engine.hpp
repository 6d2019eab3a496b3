#pragma once

#include <algorithm>
#include <atomic>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "epa/attack.hpp"
#include "epa/fitness.hpp"
#include "epa/operators.hpp"

namespace epa {

using FitnessFunction = std::function<double(const AttackContext&, const Chromosome&)>;

/// Called with the population after "init", "crossover" and "mutation".
using PopulationObserver = std::function<void(std::string_view stage, std::span<const Chromosome>)>;

struct GAResult {
    Chromosome best;
    double best_fitness = 0.0;
    std::vector<double> history; // elite fitness after each generation
    std::size_t evaluations = 0;  // distinct chromosomes scored
};

namespace detail {

inline std::string chromosome_key(const Chromosome& c) {
    std::string key((c.additions.size() + c.deletions.size()) * sizeof(LinkId) + sizeof(std::size_t), '\0');
    char* out = key.data();
    const std::size_t na = c.additions.size();
    std::memcpy(out, &na, sizeof na);
    out += sizeof na;
    std::memcpy(out, c.additions.data(), na * sizeof(LinkId));
    out += na * sizeof(LinkId);
    std::memcpy(out, c.deletions.data(), c.deletions.size() * sizeof(LinkId));
    return key;
}

/// Scores a population, reusing cached values. Fitness is a pure function of
/// the chromosome, so evaluation order and thread count do not affect results.
class Evaluator {
public:
    Evaluator(const AttackContext& ctx, FitnessFunction fn) : ctx_(ctx), fn_(std::move(fn)) {
        threads_ = ctx.config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : ctx.config.threads;
    }

    std::vector<double> operator()(const std::vector<Chromosome>& pop) {
        std::vector<std::string> keys(pop.size());
        std::vector<std::size_t> todo;
        std::unordered_map<std::string, std::size_t> pending;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            keys[i] = chromosome_key(pop[i]);
            if (!cache_.count(keys[i]) && pending.emplace(keys[i], i).second)
                todo.push_back(i);
        }
        std::vector<double> fresh(todo.size());
        const std::size_t workers = std::min(threads_, todo.size());
        if (workers <= 1) {
            for (std::size_t k = 0; k < todo.size(); ++k)
                fresh[k] = fn_(ctx_, pop[todo[k]]);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t k = next++; k < todo.size(); k = next++)
                        fresh[k] = fn_(ctx_, pop[todo[k]]);
                });
            }
            for (auto& t : pool)
                t.join();
        }
        for (std::size_t k = 0; k < todo.size(); ++k)
            cache_.emplace(keys[todo[k]], fresh[k]);
        evaluations_ += todo.size();

        std::vector<double> out(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i)
            out[i] = cache_.at(keys[i]);
        return out;
    }

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    const AttackContext& ctx_;
    FitnessFunction fn_;
    std::size_t threads_ = 1;
    std::unordered_map<std::string, double> cache_;
    std::size_t evaluations_ = 0;
};

inline std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

} // namespace detail

/// Generational loop: evaluate, keep the elite, fill the rest by roulette,
/// cross consecutive pairs at the crossover rate, mutate per gene. The elite
/// skips crossover and mutation, so the best fitness never decreases.
inline GAResult run_ga(const AttackContext& ctx, const FitnessFunction& fitness, const PopulationObserver& observe = {}) {
    const GAConfig& cfg = ctx.config;
    Rng rng(cfg.seed);
    detail::Evaluator evaluate(ctx, fitness);

    std::vector<Chromosome> pop = initialize_population(ctx, rng);
    if (observe)
        observe("init", pop);
    std::vector<double> fit = evaluate(pop);
    std::size_t elite = detail::argmax(fit);

    GAResult result;
    result.history.reserve(cfg.generations);
    std::bernoulli_distribution cross(cfg.crossover_rate);
    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Chromosome> next;
        next.reserve(pop.size());
        next.push_back(pop[elite]);
        for (std::size_t i : roulette_select(fit, pop.size() - 1, rng))
            next.push_back(pop[i]);

        for (std::size_t k = 1; k + 1 < next.size(); k += 2) {
            if (cross(rng)) {
                auto [x, y] = crossover_nonequal(next[k], next[k + 1], ctx.max_budget, ctx.add_only, rng);
                next[k] = std::move(x);
                next[k + 1] = std::move(y);
            }
        }
        if (observe)
            observe("crossover", next);
        for (std::size_t k = 1; k < next.size(); ++k)
            next[k] = mutate(std::move(next[k]), ctx, cfg.mutation_rate, rng);
        if (observe)
            observe("mutation", next);

        pop = std::move(next);
        fit = evaluate(pop);
        elite = detail::argmax(fit);
        result.history.push_back(fit[elite]);
    }
    result.best = pop[elite];
    result.best_fitness = fit[elite];
    result.evaluations = evaluate.evaluations();
    return result;
}

/// Outcome of one attack: the chosen rewiring, the resulting graph and what
/// the surrogate detector sees on it.
struct AttackReport {
    std::string method;
    AttackScale scale;
    Chromosome best;
    Perturbation perturbation;
    Graph adversarial;
    double best_fitness = 0.0;
    std::vector<double> history;
    Partition baseline;
    Partition detected_after;
    std::size_t budget = 0;
    // Target-node scale only.
    std::optional<bool> success;
    std::optional<double> degree_increment_pct;
};

inline AttackReport make_report(const AttackContext& ctx, std::string method, const GAResult& ga) {
    AttackReport r;
    r.method = std::move(method);
    r.scale = ctx.scale;
    r.best = ga.best;
    r.perturbation = decode(ctx.index, ga.best);
    r.adversarial = apply_perturbation(ctx.graph, r.perturbation);
    r.best_fitness = ga.best_fitness;
    r.history = ga.history;
    r.baseline = ctx.baseline;
    r.detected_after = louvain(r.adversarial, ctx.surrogate_seed);
    r.budget = ga.best.budget();
    if (std::holds_alternative<TargetNodeScale>(ctx.scale)) {
        r.success = node_attack_succeeded(ctx.baseline, r.detected_after, ctx.target_node, ctx.config.epsilon);
        r.degree_increment_pct =
            100.0 * static_cast<double>(ga.best.additions.size()) / static_cast<double>(ctx.target_degree);
    }
    return r;
}

inline AttackReport run_epa(const AttackContext& ctx, const PopulationObserver& observe = {}) {
    return make_report(ctx, "epa", run_ga(ctx, fitness_epa, observe));
}

inline AttackReport run_epa(const Graph& g, const AttackScale& scale, const GAConfig& config) {
    const AttackContext ctx(g, scale, config);
    return run_epa(ctx);
}

} // namespace epa
