#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "ingest.hpp"

namespace flowmotif {

struct SegmentationConfig {
    double t_max = 5.0; // seconds allowed between consecutive passes

    void validate() const {
        if (!(t_max > 0.0) || !std::isfinite(t_max))
            throw DomainError("t_max must be a positive number of seconds");
    }
};

/// A chain of passes where each receiver makes the next pass within t_max.
struct Possession {
    std::string match_id;
    std::string team_id;
    std::vector<PassEvent> passes;

    std::size_t size() const noexcept { return passes.size(); }
};

/// True when `next` may extend a possession whose last pass is `last`.
inline bool continues(const PassEvent& last, const PassEvent& next, double t_max) {
    const double gap = next.timestamp - last.timestamp;
    return last.receiver == next.passer && gap >= 0.0 && gap <= t_max;
}

/// Greedy left-to-right segmentation: a possession grows while the chaining
/// and time-gap constraints both hold, otherwise the current pass opens a new
/// one. Every input pass lands in exactly one possession, in input order.
inline std::vector<Possession> segment_possessions(const MatchEventLog& log,
                                                   const SegmentationConfig& config = {}) {
    config.validate();
    std::vector<Possession> out;
    for (const auto& pass : log.events) {
        if (out.empty() || !continues(out.back().passes.back(), pass, config.t_max))
            out.push_back({log.match_id, log.team_id, {}});
        out.back().passes.push_back(pass);
    }
    return out;
}

/// The ordered ball holders: passer of the first pass, then every receiver.
inline std::vector<std::string> touch_sequence(const Possession& possession) {
    std::vector<std::string> touches;
    if (possession.passes.empty())
        return touches;
    touches.reserve(possession.passes.size() + 1);
    touches.push_back(possession.passes.front().passer);
    for (const auto& p : possession.passes)
        touches.push_back(p.receiver);
    return touches;
}

} // namespace flowmotif
