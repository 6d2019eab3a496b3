#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "epa/error.hpp"
#include "epa/graph.hpp"
#include "epa/partition.hpp"
#include "epa/structure.hpp"

namespace epa {

/// Overlap counts between two partitions: rows index the first ("before",
/// N_a communities), columns the second ("after", N_b communities).
class ConfusionMatrix {
public:
    ConfusionMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> counts)
        : rows_(rows), cols_(cols), counts_(std::move(counts)), row_sums_(rows, 0), col_sums_(cols, 0) {
        if (counts_.size() != rows * cols)
            throw Error("confusion matrix shape mismatch");
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                row_sums_[i] += at(i, j);
                col_sums_[j] += at(i, j);
                total_ += at(i, j);
            }
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
    std::uint64_t row_sum(std::size_t i) const { return row_sums_[i]; }
    std::uint64_t col_sum(std::size_t j) const { return col_sums_[j]; }
    std::uint64_t total() const noexcept { return total_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> row_sums_;
    std::vector<std::uint64_t> col_sums_;
    std::uint64_t total_ = 0;
};

inline ConfusionMatrix confusion(const Partition& before, const Partition& after) {
    if (before.node_count() != after.node_count())
        throw Error("partitions cover different node sets");
    const std::size_t rows = before.community_count();
    const std::size_t cols = after.community_count();
    std::vector<std::uint64_t> counts(rows * cols, 0);
    for (NodeId u = 0; u < before.node_count(); ++u)
        ++counts[before.community_of(u) * cols + after.community_of(u)];
    return {rows, cols, std::move(counts)};
}

namespace detail {

/// -x log2 x with 0 log 0 = 0.
inline double plogp(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

} // namespace detail

struct Entropies {
    double rows = 0.0;    // E_Mr: spread of each row over columns, at most log2(cols)
    double columns = 0.0; // E_Mc: spread of each column over rows, at most log2(rows)
};

inline Entropies global_entropies(const ConfusionMatrix& m) {
    Entropies h;
    const double n = static_cast<double>(m.total());
    if (n == 0.0)
        return h;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double ri = static_cast<double>(m.row_sum(i));
        if (ri == 0.0)
            continue;
        double row = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j)
            row += detail::plogp(static_cast<double>(m.at(i, j)) / ri);
        h.rows += ri / n * row;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double cj = static_cast<double>(m.col_sum(j));
        if (cj == 0.0)
            continue;
        double col = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            col += detail::plogp(static_cast<double>(m.at(i, j)) / cj);
        h.columns += cj / n * col;
    }
    return h;
}

/// Per detected community: how many members come from the target community
/// (`inside`) and how many do not (`outside`).
struct TargetConfusion {
    struct Row {
        std::uint64_t inside = 0;
        std::uint64_t outside = 0;
        std::uint64_t size() const noexcept { return inside + outside; }
    };
    std::vector<Row> rows;
    std::uint64_t target_size = 0;
};

inline TargetConfusion target_confusion(std::span<const NodeId> target, const Partition& after) {
    TargetConfusion t;
    t.rows.resize(after.community_count());
    std::vector<char> in_target(after.node_count(), 0);
    for (NodeId u : target) {
        if (u >= after.node_count())
            throw Error("target node out of range");
        in_target[u] = 1;
    }
    for (NodeId u = 0; u < after.node_count(); ++u) {
        auto& row = t.rows[after.community_of(u)];
        if (in_target[u]) {
            ++row.inside;
            ++t.target_size;
        } else {
            ++row.outside;
        }
    }
    return t;
}

/// Target-community entropies: E_Mr in [0,1] (purity of the detected
/// communities with respect to the target), E_Mc in [0, log2 N_a] (spread of
/// the target over detected communities).
inline Entropies target_entropies(const TargetConfusion& t, std::size_t n) {
    if (t.target_size == 0)
        throw Error("target community is empty");
    Entropies h;
    const double total = static_cast<double>(n);
    const double ts = static_cast<double>(t.target_size);
    for (const auto& row : t.rows) {
        const double size = static_cast<double>(row.size());
        if (size == 0.0)
            continue;
        h.rows += size / total *
                  (detail::plogp(static_cast<double>(row.inside) / size) +
                   detail::plogp(static_cast<double>(row.outside) / size));
        h.columns += detail::plogp(static_cast<double>(row.inside) / ts);
    }
    return h;
}

/// d = 1/4 * sum_i |d_i - d̄_i|.
inline double degree_distance(const DegreeSequence& before, const DegreeSequence& after) {
    if (before.size() != after.size())
        throw Error("degree sequences differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
        sum += std::abs(static_cast<double>(before[i]) - static_cast<double>(after[i]));
    return sum / 4.0;
}

/// Ψ(d') = exp(-c d'), a decay in (0, 1].
inline double attenuation(double normalized_distance, double c) {
    if (!(c > 0.0))
        throw ConfigError("attenuation factor c must be positive");
    if (normalized_distance < 0.0)
        throw Error("normalized degree distance must be non-negative");
    return std::exp(-c * normalized_distance);
}

/// Normalized mutual information in natural log. Two single-community
/// partitions score 1; a single-community partition against anything else
/// scores 0.
inline double nmi(const Partition& x, const Partition& y) {
    if (x.node_count() != y.node_count())
        throw Error("partitions cover different node sets");
    if (x == y)
        return 1.0;
    // Fixed argument order keeps the floating-point result exactly symmetric.
    const bool swap = std::lexicographical_compare(y.assignment().begin(), y.assignment().end(),
                                                   x.assignment().begin(), x.assignment().end());
    const ConfusionMatrix m = swap ? confusion(y, x) : confusion(x, y);
    if (m.rows() == 1 && m.cols() == 1)
        return 1.0;
    const double n = static_cast<double>(m.total());
    double mutual = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double mij = static_cast<double>(m.at(i, j));
            if (mij > 0.0)
                mutual += mij * std::log(mij * n / (static_cast<double>(m.row_sum(i)) * static_cast<double>(m.col_sum(j))));
        }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double r = static_cast<double>(m.row_sum(i));
        denom += r * std::log(r / n);
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double c = static_cast<double>(m.col_sum(j));
        denom += c * std::log(c / n);
    }
    if (denom == 0.0)
        return 1.0;
    return std::clamp(-2.0 * mutual / denom, 0.0, 1.0);
}

/// Hubert-Arabie adjusted Rand index. When the chance-corrected denominator
/// vanishes (both all-singletons or both single-community) the score is 1 for
/// equal partitions and 0 otherwise.
inline double ari(const Partition& x, const Partition& y) {
    if (x.node_count() != y.node_count())
        throw Error("partitions cover different node sets");
    if (x.node_count() < 2)
        throw Error("adjusted Rand index needs at least two nodes");
    if (x == y)
        return 1.0;
    const bool swap = std::lexicographical_compare(y.assignment().begin(), y.assignment().end(),
                                                   x.assignment().begin(), x.assignment().end());
    const ConfusionMatrix m = swap ? confusion(y, x) : confusion(x, y);
    const auto choose2 = [](std::uint64_t k) { return static_cast<double>(k) * static_cast<double>(k - (k > 0)) / 2.0; };
    double index = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            index += choose2(m.at(i, j));
    double a = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        a += choose2(m.row_sum(i));
    double b = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
        b += choose2(m.col_sum(j));
    const double expected = a * b / choose2(m.total());
    const double maximum = 0.5 * (a + b);
    const double denom = maximum - expected;
    if (std::abs(denom) < 1e-12)
        return x == y ? 1.0 : 0.0;
    return (index - expected) / denom;
}

/// Deception score of a target community under a detected partition on the
/// adversarial graph. Precision and recall are taken over the detected
/// communities that intersect the target.
inline double deception_score(std::span<const NodeId> target, const Partition& detected, const Graph& adversarial) {
    if (target.size() < 2)
        throw Error("deception score needs a target of at least two nodes");
    if (detected.node_count() != adversarial.node_count())
        throw Error("partition does not cover the graph");
    const double size = static_cast<double>(target.size());
    const double components = static_cast<double>(induced_component_count(adversarial, target));
    const double reach = 1.0 - (components - 1.0) / (size - 1.0);

    std::vector<std::uint64_t> overlap(detected.community_count(), 0);
    for (NodeId u : target)
        ++overlap[detected.community_of(u)];
    const auto sizes = detected.sizes();
    double max_recall = 0.0;
    double precision_sum = 0.0;
    std::size_t hit = 0;
    for (std::size_t c = 0; c < overlap.size(); ++c) {
        if (overlap[c] == 0)
            continue;
        ++hit;
        precision_sum += static_cast<double>(overlap[c]) / static_cast<double>(sizes[c]);
        max_recall = std::max(max_recall, static_cast<double>(overlap[c]) / size);
    }
    const double mean_precision = precision_sum / static_cast<double>(hit);
    return reach * (0.5 * (1.0 - max_recall) + 0.5 * (1.0 - mean_precision));
}

} // namespace epa
