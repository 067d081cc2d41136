#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fingerprint.hpp"
#include "kmeans.hpp"

namespace flowmotif {

/// Binary merge tree. Leaves are nodes 0..n-1 in input order; merge i creates
/// node n+i. Heights are the increase in total within-cluster sum of squares
/// caused by each merge (not its square root).
struct Dendrogram {
    struct Merge {
        std::size_t left = 0;
        std::size_t right = 0;
        double height = 0.0;
        std::size_t size = 0;
    };

    std::vector<std::string> leaves;
    std::vector<Merge> merges;

    std::size_t root() const noexcept { return leaves.size() + merges.size() - 1; }
    bool is_leaf(std::size_t node) const noexcept { return node < leaves.size(); }
    const Merge& merge_of(std::size_t node) const { return merges.at(node - leaves.size()); }

    /// Leaf indices in drawing order (left subtree first).
    std::vector<std::size_t> leaf_order() const {
        std::vector<std::size_t> order;
        std::vector<std::size_t> stack{root()};
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            if (is_leaf(node)) {
                order.push_back(node);
            } else {
                stack.push_back(merge_of(node).right);
                stack.push_back(merge_of(node).left);
            }
        }
        return order;
    }
};

/// Ward agglomeration with Lance-Williams updates on the merge-cost matrix
/// cost(i, j) = n_i n_j / (n_i + n_j) * |c_i - c_j|^2. Equal costs are broken
/// by the lexicographically smallest (smallest team id in each cluster) pair.
inline Dendrogram ward_cluster(const std::vector<Point>& points,
                               const std::vector<std::string>& ids) {
    const std::size_t n = points.size();
    if (n < 2)
        throw DomainError("ward clustering needs at least two teams");
    if (ids.size() != n)
        throw ContractViolation("ward_cluster: one id per point required");

    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            cost[i][j] = cost[j][i] = 0.5 * squared_distance(points[i], points[j]);

    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> node(n); // tree node currently represented by slot i
    std::vector<std::string> key = ids; // smallest team id in the cluster
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i)
        node[i] = i;

    Dendrogram out{ids, {}};
    out.merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t a = n, b = n;
        auto pair_key = [&](std::size_t i, std::size_t j) {
            return key[i] < key[j] ? std::pair(key[i], key[j]) : std::pair(key[j], key[i]);
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i])
                continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j])
                    continue;
                if (cost[i][j] < best || (cost[i][j] == best && pair_key(i, j) < pair_key(a, b))) {
                    best = cost[i][j];
                    a = i;
                    b = j;
                }
            }
        }
        if (key[b] < key[a])
            std::swap(a, b);

        const double na = static_cast<double>(size[a]);
        const double nb = static_cast<double>(size[b]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == a || k == b)
                continue;
            const double nk = static_cast<double>(size[k]);
            const double updated =
                ((na + nk) * cost[a][k] + (nb + nk) * cost[b][k] - nk * best) / (na + nb + nk);
            cost[a][k] = cost[k][a] = updated;
        }
        out.merges.push_back({node[a], node[b], best, size[a] + size[b]});
        size[a] += size[b];
        node[a] = n + step;
        key[a] = std::min(key[a], key[b]);
        active[b] = false;
    }
    return out;
}

inline Dendrogram ward_cluster(const std::vector<TeamFingerprint>& fingerprints) {
    return ward_cluster(feature_rows(fingerprints), team_ids(fingerprints));
}

} // namespace flowmotif
