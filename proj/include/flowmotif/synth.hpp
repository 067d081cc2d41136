#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "ingest.hpp"
#include "seeding.hpp"

namespace flowmotif {

/// Parameters of a synthetic team. Possessions are random walks over the
/// squad; `back_pass_bias` is the chance of returning the ball to the player
/// it just came from.
struct TeamStyleParams {
    std::string team_id;
    int squad_size = 11;
    int possessions_per_match = 80;
    double mean_possession_length = 4.0; // passes, geometric on {1, 2, ...}
    double back_pass_bias = 0.0;
    int matches = 38;

    void validate(int k = 3) const {
        if (team_id.empty())
            throw DomainError("team style needs a team_id");
        if (squad_size < 4 || squad_size < k + 1)
            throw DomainError("team '" + team_id + "': squad_size must be at least max(4, k+1)");
        if (possessions_per_match < 1)
            throw DomainError("team '" + team_id + "': possessions_per_match must be positive");
        if (!(mean_possession_length >= 1.0) || !std::isfinite(mean_possession_length))
            throw DomainError("team '" + team_id + "': mean_possession_length must be >= 1");
        if (!(back_pass_bias >= 0.0 && back_pass_bias <= 1.0))
            throw DomainError("team '" + team_id + "': back_pass_bias must be in [0, 1]");
        if (matches < 1)
            throw DomainError("team '" + team_id + "': matches must be positive");
    }
};

inline void to_json(nlohmann::json& j, const TeamStyleParams& p) {
    j = nlohmann::json{{"team_id", p.team_id},
                       {"squad_size", p.squad_size},
                       {"possessions_per_match", p.possessions_per_match},
                       {"mean_possession_length", p.mean_possession_length},
                       {"back_pass_bias", p.back_pass_bias},
                       {"matches", p.matches}};
}

inline void from_json(const nlohmann::json& j, TeamStyleParams& p) {
    p = TeamStyleParams{};
    j.at("team_id").get_to(p.team_id);
    if (j.contains("squad_size"))
        j.at("squad_size").get_to(p.squad_size);
    if (j.contains("possessions_per_match"))
        j.at("possessions_per_match").get_to(p.possessions_per_match);
    if (j.contains("mean_possession_length"))
        j.at("mean_possession_length").get_to(p.mean_possession_length);
    if (j.contains("back_pass_bias"))
        j.at("back_pass_bias").get_to(p.back_pass_bias);
    if (j.contains("matches"))
        j.at("matches").get_to(p.matches);
}

inline std::string synthetic_match_id(const std::string& team_id, int match_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "-M%02d", match_index + 1);
    return team_id + buf;
}

/// One match of passes. Passes inside a possession are 1 s apart and
/// possessions are t_max + 1 s apart, so segmentation with the same t_max
/// recovers exactly the generated possessions.
inline MatchEventLog generate_match(const TeamStyleParams& params, int match_index,
                                    std::uint64_t seed, double t_max = 5.0) {
    params.validate();
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(match_index)));
    std::geometric_distribution<int> extra(1.0 / params.mean_possession_length);
    std::uniform_int_distribution<int> anyone(0, params.squad_size - 1);
    std::uniform_int_distribution<int> other(0, params.squad_size - 2);
    std::bernoulli_distribution back(params.back_pass_bias);

    MatchEventLog log{synthetic_match_id(params.team_id, match_index), params.team_id, {}};
    auto name = [](int player) { return "p" + std::to_string(player + 1); };
    double clock = 0.0;
    for (int p = 0; p < params.possessions_per_match; ++p) {
        const int passes = 1 + extra(rng);
        int holder = anyone(rng);
        int previous = -1;
        for (int m = 0; m < passes; ++m) {
            int next;
            if (previous >= 0 && params.back_pass_bias > 0.0 && back(rng)) {
                next = previous;
            } else {
                next = other(rng);
                if (next >= holder)
                    ++next;
            }
            log.events.push_back({log.match_id, log.team_id, name(holder), name(next), clock});
            clock += 1.0;
            previous = holder;
            holder = next;
        }
        clock += t_max; // last pass sits at clock - 1, so the gap is t_max + 1
    }
    return log;
}

/// All matches of all teams, team-major. Team i draws from derive_seed(seed, i).
inline std::vector<MatchEventLog> generate_league(const std::vector<TeamStyleParams>& teams,
                                                  std::uint64_t seed, double t_max = 5.0) {
    std::vector<MatchEventLog> logs;
    for (std::size_t t = 0; t < teams.size(); ++t) {
        const auto team_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
        for (int m = 0; m < teams[t].matches; ++m)
            logs.push_back(generate_match(teams[t], m, team_seed, t_max));
    }
    return logs;
}

} // namespace flowmotif
