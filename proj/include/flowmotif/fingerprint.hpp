#pragma once

#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "motif.hpp"
#include "null_model.hpp"

namespace flowmotif {

/// Season-level motif signature of a team: mean z-score per pattern.
struct TeamFingerprint {
    std::string team_id;
    int k = 3;
    std::vector<MotifPattern> patterns;
    std::vector<double> features; // parallel to `patterns`
    std::size_t matches_used = 0;
};

inline TeamFingerprint team_fingerprint(const std::vector<ZScoreProfile>& profiles) {
    if (profiles.empty())
        throw DomainError("team_fingerprint needs at least one z-score profile");
    const auto& first = profiles.front();
    TeamFingerprint out{first.team_id, first.k, first.patterns,
                        std::vector<double>(first.patterns.size(), 0.0), profiles.size()};
    for (const auto& profile : profiles) {
        if (profile.team_id != first.team_id)
            throw ContractViolation("team_fingerprint: profiles from teams '" + first.team_id +
                                    "' and '" + profile.team_id + "'");
        if (profile.k != first.k || profile.patterns != first.patterns)
            throw ContractViolation("team_fingerprint: profiles with different k");
        for (std::size_t m = 0; m < out.features.size(); ++m)
            out.features[m] += profile.z[m];
    }
    for (auto& f : out.features)
        f /= static_cast<double>(profiles.size());
    return out;
}

/// One fingerprint per team, ordered by team id.
inline std::vector<TeamFingerprint> fingerprints_by_team(const std::vector<ZScoreProfile>& profiles) {
    std::map<std::string, std::vector<ZScoreProfile>> by_team;
    for (const auto& p : profiles)
        by_team[p.team_id].push_back(p);
    std::vector<TeamFingerprint> out;
    out.reserve(by_team.size());
    for (const auto& [team, group] : by_team)
        out.push_back(team_fingerprint(group));
    return out;
}

/// Row-major copy of the feature vectors; all fingerprints must share k.
inline std::vector<std::vector<double>> feature_rows(const std::vector<TeamFingerprint>& fps) {
    std::vector<std::vector<double>> rows;
    rows.reserve(fps.size());
    for (const auto& fp : fps) {
        if (fp.features.size() != fps.front().features.size())
            throw ContractViolation("fingerprints have different feature dimensions");
        rows.push_back(fp.features);
    }
    return rows;
}

inline std::vector<std::string> team_ids(const std::vector<TeamFingerprint>& fps) {
    std::vector<std::string> ids;
    ids.reserve(fps.size());
    for (const auto& fp : fps)
        ids.push_back(fp.team_id);
    return ids;
}

} // namespace flowmotif
