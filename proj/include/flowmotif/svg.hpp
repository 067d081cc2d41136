#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "kmeans.hpp"
#include "pca.hpp"
#include "ward.hpp"

namespace flowmotif::svg {

// Minimal static SVG writers. Coordinates are printed with two decimals so
// the files are byte-stable across runs.

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline const char* color(int cluster) {
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                              "#bcbd22", "#17becf"};
    return palette[static_cast<std::size_t>(cluster) % std::size(palette)];
}

/// Teams on the first two principal axes, colored by k-means cluster when
/// `labels` is non-empty.
inline std::string pca_scatter(const PcaProjection& p, const std::vector<int>& labels = {}) {
    constexpr double W = 640, H = 480, M = 60;
    std::vector<double> xs, ys;
    for (const auto& c : p.coordinates) {
        xs.push_back(c[0]);
        ys.push_back(c.size() > 1 ? c[1] : 0.0);
    }
    auto span = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double a = *lo, b = *hi;
        if (b - a < 1e-12) {
            a -= 1.0;
            b += 1.0;
        }
        const double pad = 0.05 * (b - a);
        return std::pair(a - pad, b + pad);
    };
    const auto [x0, x1] = span(xs);
    const auto [y0, y1] = span(ys);
    auto sx = [&](double x) { return M + (x - x0) / (x1 - x0) * (W - 2 * M); };
    auto sy = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M
        << "\" stroke=\"black\"/>\n";
    auto axis = [&](std::size_t i) {
        std::string s = "PC" + std::to_string(i + 1);
        if (i < p.explained_variance_ratio.size())
            s += " (" + num(100.0 * p.explained_variance_ratio[i]) + "%)";
        return s;
    };
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << axis(0)
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << H / 2 << ")\">" << axis(1) << "</text>\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const char* fill = labels.empty() ? "#1f77b4" : color(labels[i]);
        out << "<circle cx=\"" << num(sx(xs[i])) << "\" cy=\"" << num(sy(ys[i]))
            << "\" r=\"4\" fill=\"" << fill << "\"/>\n";
        out << "<text x=\"" << num(sx(xs[i]) + 6) << "\" y=\"" << num(sy(ys[i]) - 6) << "\">"
            << escape(p.team_ids[i]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

/// Ward dendrogram with leaves along the bottom and merge height upwards.
inline std::string dendrogram(const Dendrogram& d) {
    constexpr double H = 480, M = 60, Bottom = 120;
    const auto order = d.leaf_order();
    const double W = std::max(640.0, 2 * M + 24.0 * static_cast<double>(order.size()));
    double top = 0.0;
    for (const auto& m : d.merges)
        top = std::max(top, m.height);
    if (top <= 0.0)
        top = 1.0;
    const double step = (W - 2 * M) / static_cast<double>(std::max<std::size_t>(1, order.size() - 1));
    auto sy = [&](double h) { return H - Bottom - h / top * (H - Bottom - M); };

    std::vector<double> x(d.leaves.size() + d.merges.size(), 0.0);
    std::vector<double> y(x.size(), sy(0.0));
    for (std::size_t i = 0; i < order.size(); ++i)
        x[order[i]] = M + step * static_cast<double>(i);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(W / 2) << "\" y=\"" << M / 2
        << "\" text-anchor=\"middle\">Ward linkage (height = within-cluster SS increase, max "
        << num(top) << ")</text>\n";
    for (std::size_t i = 0; i < d.merges.size(); ++i) {
        const auto& m = d.merges[i];
        const auto node = d.leaves.size() + i;
        x[node] = 0.5 * (x[m.left] + x[m.right]);
        y[node] = sy(m.height);
        out << "<path d=\"M" << num(x[m.left]) << ' ' << num(y[m.left]) << " V" << num(y[node])
            << " H" << num(x[m.right]) << " V" << num(y[m.right])
            << "\" fill=\"none\" stroke=\"black\"/>\n";
    }
    for (std::size_t leaf : order) {
        const double lx = x[leaf], ly = sy(0.0) + 8;
        out << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" transform=\"rotate(60 "
            << num(lx) << ' ' << num(ly) << ")\">" << escape(d.leaves[leaf]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace flowmotif::svg
