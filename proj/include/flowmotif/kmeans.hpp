#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fingerprint.hpp"
#include "seeding.hpp"

namespace flowmotif {

using Point = std::vector<double>;

inline double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline Point grand_mean(const std::vector<Point>& points) {
    Point mean(points.empty() ? 0 : points.front().size(), 0.0);
    for (const auto& p : points)
        for (std::size_t i = 0; i < mean.size(); ++i)
            mean[i] += p[i];
    for (auto& v : mean)
        v /= static_cast<double>(points.size());
    return mean;
}

/// Sum of squared deviations from the grand mean.
inline double total_sum_of_squares(const std::vector<Point>& points) {
    const auto mean = grand_mean(points);
    double ss = 0.0;
    for (const auto& p : points)
        ss += squared_distance(p, mean);
    return ss;
}

struct KMeansOptions {
    std::size_t clusters = 4;
    std::uint64_t seed = 0;
    int max_iter = 300;
    int restarts = 10;
};

/// Result of k-means. Cluster indices are renumbered by first appearance in
/// input order, so equal partitions always print the same labels.
struct ClusterAssignment {
    std::vector<std::string> team_ids;
    std::vector<int> labels; // parallel to team_ids
    std::vector<Point> centroids;
    double within_ss = 0.0;
    double between_ss = 0.0;
    double total_ss = 0.0;
    double within_over_total = 0.0;
    double between_over_total = 0.0;
    int iterations = 0;
    std::vector<double> within_ss_trace; // after every assignment step of the winning restart

    int cluster_of(const std::string& team) const {
        for (std::size_t i = 0; i < team_ids.size(); ++i)
            if (team_ids[i] == team)
                return labels[i];
        throw DomainError("unknown team '" + team + "'");
    }

    std::size_t cluster_size(int c) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
    }
};

namespace detail {

struct LloydRun {
    std::vector<int> labels;
    std::vector<Point> centroids;
    double within_ss = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

inline std::vector<Point> kmeanspp_init(const std::vector<Point>& pts, std::size_t k,
                                        std::mt19937_64& rng) {
    const std::size_t n = pts.size();
    std::vector<Point> centers;
    centers.push_back(pts[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
            total += d2[i];
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (d2[pick] == 0.0) // u landed in rounding slack at the end
                --pick;
        } else {
            pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        }
        centers.push_back(pts[pick]);
    }
    return centers;
}

inline double assign(const std::vector<Point>& pts, const std::vector<Point>& centers,
                     std::vector<int>& labels) {
    double within = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double d = squared_distance(pts[i], centers[c]);
            if (d < best) {
                best = d;
                arg = static_cast<int>(c);
            }
        }
        labels[i] = arg;
        within += best;
    }
    return within;
}

// Recomputes centroids as member means. An empty cluster takes over the point
// farthest from its own centroid, unless every point already sits on its
// centroid (then there is nothing left to split and it stays empty).
inline void update_centroids(const std::vector<Point>& pts, std::vector<int>& labels,
                             std::vector<Point>& centers) {
    const std::size_t k = centers.size();
    const std::size_t dim = pts.front().size();
    for (;;) {
        std::vector<Point> sums(k, Point(dim, 0.0));
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto c = static_cast<std::size_t>(labels[i]);
            ++sizes[c];
            for (std::size_t j = 0; j < dim; ++j)
                sums[c][j] += pts[i][j];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (sizes[c] > 0)
                for (std::size_t j = 0; j < dim; ++j)
                    centers[c][j] = sums[c][j] / static_cast<double>(sizes[c]);

        auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
        if (empty == sizes.end())
            return;
        double far = 0.0;
        std::size_t far_i = pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (sizes[static_cast<std::size_t>(labels[i])] < 2)
                continue;
            const double d = squared_distance(pts[i], centers[static_cast<std::size_t>(labels[i])]);
            if (d > far) {
                far = d;
                far_i = i;
            }
        }
        if (far_i == pts.size())
            return;
        const auto c = static_cast<std::size_t>(empty - sizes.begin());
        labels[far_i] = static_cast<int>(c);
        centers[c] = pts[far_i];
    }
}

inline LloydRun lloyd(const std::vector<Point>& pts, std::vector<Point> centers, int max_iter) {
    LloydRun run;
    run.labels.assign(pts.size(), -1);
    std::vector<int> previous;
    for (int it = 0; it < max_iter; ++it) {
        previous = run.labels;
        assign(pts, centers, run.labels);
        update_centroids(pts, run.labels, centers);
        run.iterations = it + 1;
        double within = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            within += squared_distance(pts[i], centers[static_cast<std::size_t>(run.labels[i])]);
        run.trace.push_back(within);
        if (run.labels == previous)
            break;
    }
    run.centroids = std::move(centers);
    run.within_ss = run.trace.back();
    return run;
}

} // namespace detail

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares (ties go to the earliest restart).
inline ClusterAssignment kmeans(const std::vector<Point>& points,
                                const std::vector<std::string>& ids, const KMeansOptions& opt) {
    const std::size_t n = points.size();
    if (n == 0)
        throw DomainError("kmeans needs at least one point");
    if (opt.clusters < 1 || opt.clusters > n)
        throw DomainError("kmeans: K=" + std::to_string(opt.clusters) + " must be in [1, " +
                          std::to_string(n) + "]");
    if (ids.size() != n)
        throw ContractViolation("kmeans: one id per point required");
    if (opt.max_iter < 1 || opt.restarts < 1)
        throw DomainError("kmeans: max_iter and restarts must be positive");

    detail::LloydRun best;
    bool have_best = false;
    for (int r = 0; r < opt.restarts; ++r) {
        std::mt19937_64 rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
        auto run = detail::lloyd(points, detail::kmeanspp_init(points, opt.clusters, rng),
                                 opt.max_iter);
        if (!have_best || run.within_ss < best.within_ss) {
            best = std::move(run);
            have_best = true;
        }
    }

    // Renumber clusters by first appearance; empty clusters go last.
    const std::size_t k = opt.clusters;
    std::vector<int> rename(k, -1);
    int next = 0;
    for (int label : best.labels)
        if (rename[static_cast<std::size_t>(label)] < 0)
            rename[static_cast<std::size_t>(label)] = next++;
    for (auto& r : rename)
        if (r < 0)
            r = next++;

    ClusterAssignment out;
    out.team_ids = ids;
    out.labels.resize(n);
    out.centroids.resize(k);
    for (std::size_t i = 0; i < n; ++i)
        out.labels[i] = rename[static_cast<std::size_t>(best.labels[i])];
    for (std::size_t c = 0; c < k; ++c)
        out.centroids[static_cast<std::size_t>(rename[c])] = best.centroids[c];

    out.within_ss = best.within_ss;
    out.total_ss = total_sum_of_squares(points);
    const auto mean = grand_mean(points);
    for (std::size_t c = 0; c < k; ++c)
        out.between_ss += static_cast<double>(out.cluster_size(static_cast<int>(c))) *
                          squared_distance(out.centroids[c], mean);
    // With zero total spread there is nothing to explain: all of it (zero)
    // counts as within-cluster.
    out.within_over_total = out.total_ss > 0.0 ? out.within_ss / out.total_ss : 1.0;
    out.between_over_total = 1.0 - out.within_over_total;
    out.iterations = best.iterations;
    out.within_ss_trace = std::move(best.trace);
    return out;
}

inline ClusterAssignment kmeans(const std::vector<TeamFingerprint>& fingerprints,
                                const KMeansOptions& opt) {
    return kmeans(feature_rows(fingerprints), team_ids(fingerprints), opt);
}

} // namespace flowmotif
