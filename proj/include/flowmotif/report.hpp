#pragma once

#include <istream>
#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "csv.hpp"
#include "errors.hpp"
#include "fingerprint.hpp"
#include "kmeans.hpp"
#include "pca.hpp"
#include "pipeline.hpp"
#include "ward.hpp"

namespace flowmotif {

inline constexpr const char* kVersion = "0.1.0";

// Tabular outputs. Every writer has a reader for the tables that feed a later
// command, so `zscores -> fingerprint -> cluster` can be chained on disk.

inline void write_motif_counts_csv(std::ostream& out, const std::vector<MotifCountVector>& rows) {
    out << "match_id,team_id,k,pattern,count\n";
    for (const auto& v : rows)
        for (std::size_t m = 0; m < v.patterns.size(); ++m)
            out << csv::escape(v.match_id) << ',' << csv::escape(v.team_id) << ',' << v.k << ','
                << v.patterns[m].label << ',' << v.counts[m] << '\n';
}

inline void write_zscores_csv(std::ostream& out, const std::vector<MatchAnalysis>& rows) {
    out << "match_id,team_id,k,pattern,count,null_mean,null_std,z,degenerate\n";
    for (const auto& a : rows)
        for (std::size_t m = 0; m < a.counts.patterns.size(); ++m)
            out << csv::escape(a.counts.match_id) << ',' << csv::escape(a.counts.team_id) << ','
                << a.counts.k << ',' << a.counts.patterns[m].label << ',' << a.counts.counts[m]
                << ',' << csv::format_real(a.null.mean[m]) << ','
                << csv::format_real(a.null.stddev[m]) << ',' << csv::format_real(a.z.z[m]) << ','
                << (a.z.degenerate[m] ? 1 : 0) << '\n';
}

namespace detail {

// Reads a CSV table whose header must contain `required`; returns rows as
// maps from column name to field. Any malformed line is a FormatError.
inline std::vector<std::map<std::string, std::string>>
read_table(std::istream& in, const std::vector<std::string>& required, std::string_view what,
           std::vector<std::string>* header_out = nullptr) {
    std::vector<std::map<std::string, std::string>> rows;
    std::vector<std::string> header;
    std::string raw;
    std::size_t line_no = 0;
    while (getline_checked(in, raw)) {
        ++line_no;
        const auto line = csv::chomp(raw);
        if (csv::is_blank(line))
            continue;
        auto fields = csv::split_line(line);
        if (!fields)
            throw FormatError(std::string(what) + ": unterminated quote at line " +
                              std::to_string(line_no));
        if (header.empty()) {
            header = *fields;
            for (const auto& col : required)
                if (std::find(header.begin(), header.end(), col) == header.end())
                    throw FormatError(std::string(what) + ": header is missing column '" + col + "'");
            if (header_out)
                *header_out = header;
            continue;
        }
        if (fields->size() != header.size())
            throw FormatError(std::string(what) + ": line " + std::to_string(line_no) +
                              " has " + std::to_string(fields->size()) + " fields, expected " +
                              std::to_string(header.size()));
        std::map<std::string, std::string> row;
        for (std::size_t c = 0; c < header.size(); ++c)
            row[header[c]] = (*fields)[c];
        rows.push_back(std::move(row));
    }
    if (header.empty())
        throw FormatError(std::string(what) + ": empty file");
    return rows;
}

inline double real_field(const std::map<std::string, std::string>& row, const std::string& col,
                         std::string_view what) {
    auto v = csv::parse_real(row.at(col));
    if (!v || !std::isfinite(*v))
        throw FormatError(std::string(what) + ": column '" + col + "' is not a finite number");
    return *v;
}

inline long long integer_field(const std::map<std::string, std::string>& row,
                               const std::string& col, std::string_view what) {
    auto v = csv::parse_integer(row.at(col));
    if (!v)
        throw FormatError(std::string(what) + ": column '" + col + "' is not an integer");
    return *v;
}

} // namespace detail

/// Reads the z-score table back into per-match profiles (in file order). Each
/// match must list every pattern of its alphabet exactly once.
inline std::vector<ZScoreProfile> read_zscores_csv(std::istream& in) {
    constexpr std::string_view what = "z-score table";
    const auto rows = detail::read_table(in, {"match_id", "team_id", "k", "pattern", "z"}, what);
    std::vector<ZScoreProfile> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& row : rows) {
        const auto k = static_cast<int>(detail::integer_field(row, "k", what));
        auto [it, inserted] = index.try_emplace({row.at("match_id"), row.at("team_id")}, out.size());
        if (inserted)
            out.push_back({row.at("match_id"), row.at("team_id"), k, {}, {}, {}});
        auto& profile = out[it->second];
        if (profile.k != k)
            throw FormatError("z-score table: match '" + profile.match_id + "' mixes k values");
        profile.patterns.push_back({row.at("pattern")});
        profile.z.push_back(detail::real_field(row, "z", what));
        profile.degenerate.push_back(row.count("degenerate") && row.at("degenerate") == "1");
    }
    for (auto& profile : out) {
        std::vector<std::size_t> order(profile.patterns.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return profile.patterns[a] < profile.patterns[b];
        });
        ZScoreProfile sorted{profile.match_id, profile.team_id, profile.k, {}, {}, {}};
        for (auto i : order) {
            sorted.patterns.push_back(profile.patterns[i]);
            sorted.z.push_back(profile.z[i]);
            sorted.degenerate.push_back(profile.degenerate[i]);
        }
        if (sorted.patterns != enumerate_patterns(profile.k))
            throw FormatError("z-score table: match '" + profile.match_id +
                              "' does not list every k=" + std::to_string(profile.k) +
                              " pattern exactly once");
        profile = std::move(sorted);
    }
    return out;
}

inline void write_fingerprints_csv(std::ostream& out, const std::vector<TeamFingerprint>& fps) {
    out << "team_id,k,matches_used";
    const auto patterns = fps.empty() ? std::vector<MotifPattern>{} : fps.front().patterns;
    for (const auto& p : patterns)
        out << ',' << p.label;
    out << '\n';
    for (const auto& fp : fps) {
        out << csv::escape(fp.team_id) << ',' << fp.k << ',' << fp.matches_used;
        for (double f : fp.features)
            out << ',' << csv::format_real(f);
        out << '\n';
    }
}

inline std::vector<TeamFingerprint> read_fingerprints_csv(std::istream& in) {
    constexpr std::string_view what = "fingerprint table";
    std::vector<std::string> header;
    const auto rows = detail::read_table(in, {"team_id", "k", "matches_used"}, what, &header);
    std::vector<TeamFingerprint> out;
    for (const auto& row : rows) {
        TeamFingerprint fp;
        fp.team_id = row.at("team_id");
        fp.k = static_cast<int>(detail::integer_field(row, "k", what));
        const auto used = detail::integer_field(row, "matches_used", what);
        if (used < 1)
            throw FormatError("fingerprint table: matches_used must be positive");
        fp.matches_used = static_cast<std::size_t>(used);
        fp.patterns = enumerate_patterns(fp.k);
        for (const auto& p : fp.patterns) {
            if (!row.count(p.label))
                throw FormatError("fingerprint table: header is missing column '" + p.label + "'");
            fp.features.push_back(detail::real_field(row, p.label, what));
        }
        if (!out.empty() && out.front().k != fp.k)
            throw FormatError("fingerprint table mixes k values");
        out.push_back(std::move(fp));
    }
    return out;
}

inline void write_clusters_csv(std::ostream& out, const ClusterAssignment& a) {
    out << "team_id,cluster\n";
    for (std::size_t i = 0; i < a.team_ids.size(); ++i)
        out << csv::escape(a.team_ids[i]) << ',' << a.labels[i] << '\n';
}

inline nlohmann::ordered_json to_json(const ClusterAssignment& a,
                                      const std::vector<MotifPattern>& patterns) {
    nlohmann::ordered_json j;
    j["clusters"] = a.centroids.size();
    j["within_ss"] = a.within_ss;
    j["between_ss"] = a.between_ss;
    j["total_ss"] = a.total_ss;
    j["within_over_total"] = a.within_over_total;
    j["between_over_total"] = a.between_over_total;
    j["iterations"] = a.iterations;
    std::vector<std::string> labels;
    for (const auto& p : patterns)
        labels.push_back(p.label);
    j["features"] = labels;
    auto centroids = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < a.centroids.size(); ++c)
        centroids.push_back({{"cluster", c},
                             {"size", a.cluster_size(static_cast<int>(c))},
                             {"centroid", a.centroids[c]}});
    j["centroids"] = centroids;
    return j;
}

/// Nested dendrogram: leaves are {"team_id"}, merges carry "height" and
/// "size" plus their two "children".
inline nlohmann::ordered_json to_json(const Dendrogram& d) {
    auto node_json = [&](auto& self, std::size_t node) -> nlohmann::ordered_json {
        if (d.is_leaf(node))
            return {{"team_id", d.leaves[node]}};
        const auto& m = d.merge_of(node);
        nlohmann::ordered_json j;
        j["height"] = m.height;
        j["size"] = m.size;
        j["children"] = {self(self, m.left), self(self, m.right)};
        return j;
    };
    nlohmann::ordered_json j;
    j["linkage"] = "ward";
    j["height_convention"] = "increase in total within-cluster sum of squares";
    j["tree"] = node_json(node_json, d.root());
    return j;
}

inline void write_pca_csv(std::ostream& out, const PcaProjection& p) {
    out << "team_id";
    for (std::size_t c = 0; c < p.components.size(); ++c)
        out << ",pc" << (c + 1);
    out << '\n';
    for (std::size_t i = 0; i < p.team_ids.size(); ++i) {
        out << csv::escape(p.team_ids[i]);
        for (double x : p.coordinates[i])
            out << ',' << csv::format_real(x);
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(const PcaProjection& p,
                                      const std::vector<MotifPattern>& patterns) {
    nlohmann::ordered_json j;
    std::vector<std::string> labels;
    for (const auto& pat : patterns)
        labels.push_back(pat.label);
    j["features"] = labels;
    j["mean"] = p.mean;
    j["scale"] = p.scale;
    j["explained_variance"] = p.explained_variance;
    j["explained_variance_ratio"] = p.explained_variance_ratio;
    j["components"] = p.components;
    return j;
}

/// What a run did, sufficient to redo it. The wall-clock field is the only
/// entry that changes between otherwise identical runs.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::string>> inputs; // path, sha256
    double wall_clock_seconds = 0.0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["artifact"] = "flowmotif";
        j["version"] = kVersion;
        j["command"] = command;
        j["config"] = config;
        auto files = nlohmann::ordered_json::array();
        for (const auto& [path, digest] : inputs)
            files.push_back({{"path", path}, {"sha256", digest}});
        j["inputs"] = files;
        j["wall_clock_seconds"] = wall_clock_seconds;
        return j;
    }
};

} // namespace flowmotif
