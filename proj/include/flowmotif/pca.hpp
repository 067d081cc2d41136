#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fingerprint.hpp"
#include "kmeans.hpp"

namespace flowmotif {

/// Thin SVD of a row-major rows x cols matrix: A = U diag(s) V^T.
struct SingularValueDecomposition {
    std::vector<double> singular_values;  // descending, length cols
    std::vector<std::vector<double>> v;   // cols x cols, column j = right vector j
};

/// One-sided Jacobi (Hestenes) SVD. Rotates column pairs of A until they are
/// mutually orthogonal; the accumulated rotations form V and the final column
/// norms are the singular values. Meant for the small, tall matrices used
/// here (tens to hundreds of teams by a handful of motif features).
inline SingularValueDecomposition jacobi_svd(std::vector<std::vector<double>> a,
                                             std::size_t cols) {
    const std::size_t rows = a.size();
    std::vector<std::vector<double>> v(cols, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < cols; ++i)
        v[i][i] = 1.0;

    constexpr double kEps = 1e-15;
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            for (std::size_t j = i + 1; j < cols; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t r = 0; r < rows; ++r) {
                    alpha += a[r][i] * a[r][i];
                    beta += a[r][j] * a[r][j];
                    gamma += a[r][i] * a[r][j];
                }
                if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t r = 0; r < rows; ++r) {
                    const double ai = a[r][i], aj = a[r][j];
                    a[r][i] = c * ai - s * aj;
                    a[r][j] = s * ai + c * aj;
                }
                for (std::size_t r = 0; r < cols; ++r) {
                    const double vi = v[r][i], vj = v[r][j];
                    v[r][i] = c * vi - s * vj;
                    v[r][j] = s * vi + c * vj;
                }
            }
        }
        if (!rotated)
            break;
    }

    std::vector<double> norms(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
            s += a[r][j] * a[r][j];
        norms[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    SingularValueDecomposition out{std::vector<double>(cols),
                                   std::vector<std::vector<double>>(cols, std::vector<double>(cols))};
    for (std::size_t j = 0; j < cols; ++j) {
        out.singular_values[j] = norms[order[j]];
        for (std::size_t r = 0; r < cols; ++r)
            out.v[r][j] = v[r][order[j]];
    }
    return out;
}

struct PcaOptions {
    std::size_t dims = 2;
    bool standardize = false; // divide each feature by its sample deviation
};

struct PcaProjection {
    std::vector<std::string> team_ids;
    std::vector<std::vector<double>> coordinates; // teams x dims
    std::vector<double> explained_variance;        // per kept axis, s^2 / (n - 1)
    std::vector<double> explained_variance_ratio;  // per kept axis
    std::vector<std::vector<double>> components;   // dims x features, unit rows
    std::vector<double> mean;
    std::vector<double> scale; // 1 unless standardized
};

/// Centers the feature rows, takes the SVD of the centered matrix and
/// projects onto the leading `dims` right singular vectors. Each axis is
/// flipped so that its largest-magnitude loading is positive.
inline PcaProjection pca_project(const std::vector<Point>& points,
                                 const std::vector<std::string>& ids, const PcaOptions& opt = {}) {
    const std::size_t n = points.size();
    if (n < 2)
        throw DomainError("pca needs at least two teams");
    if (ids.size() != n)
        throw ContractViolation("pca_project: one id per point required");
    const std::size_t p = points.front().size();
    if (opt.dims < 1 || opt.dims > p)
        throw DomainError("pca: dims=" + std::to_string(opt.dims) + " must be in [1, " +
                          std::to_string(p) + "]");

    PcaProjection out;
    out.team_ids = ids;
    out.mean = grand_mean(points);
    out.scale.assign(p, 1.0);
    if (opt.standardize) {
        for (std::size_t j = 0; j < p; ++j) {
            double ss = 0.0;
            for (const auto& row : points)
                ss += (row[j] - out.mean[j]) * (row[j] - out.mean[j]);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (sd > 0.0)
                out.scale[j] = sd;
        }
    }
    std::vector<std::vector<double>> centered(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            centered[i][j] = (points[i][j] - out.mean[j]) / out.scale[j];

    auto svd = jacobi_svd(centered, p);
    double total = 0.0;
    for (double s : svd.singular_values)
        total += s * s;

    out.components.assign(opt.dims, std::vector<double>(p));
    for (std::size_t c = 0; c < opt.dims; ++c) {
        std::size_t lead = 0;
        for (std::size_t j = 1; j < p; ++j)
            if (std::abs(svd.v[j][c]) > std::abs(svd.v[lead][c]))
                lead = j;
        const double sign = svd.v[lead][c] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < p; ++j)
            out.components[c][j] = sign * svd.v[j][c];
        const double s2 = svd.singular_values[c] * svd.singular_values[c];
        out.explained_variance.push_back(s2 / static_cast<double>(n - 1));
        out.explained_variance_ratio.push_back(total > 0.0 ? s2 / total : 0.0);
    }
    out.coordinates.assign(n, std::vector<double>(opt.dims, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < opt.dims; ++c)
            for (std::size_t j = 0; j < p; ++j)
                out.coordinates[i][c] += centered[i][j] * out.components[c][j];
    return out;
}

inline PcaProjection pca_project(const std::vector<TeamFingerprint>& fingerprints,
                                 const PcaOptions& opt = {}) {
    return pca_project(feature_rows(fingerprints), team_ids(fingerprints), opt);
}

} // namespace flowmotif
