#pragma once

#include <string>
#include <vector>

#include "flowmotif/flowmotif.hpp"

namespace testing_helpers {

// Possession whose touch sequence is `touches` (players named by number),
// passes one second apart starting at t0.
inline flowmotif::Possession possession_of(const std::vector<int>& touches,
                                           const std::string& match = "M1",
                                           const std::string& team = "T1", double t0 = 0.0) {
    flowmotif::Possession p{match, team, {}};
    for (std::size_t i = 0; i + 1 < touches.size(); ++i)
        p.passes.push_back({match, team, std::to_string(touches[i]), std::to_string(touches[i + 1]),
                            t0 + static_cast<double>(i)});
    return p;
}

inline flowmotif::PassEvent pass(const std::string& from, const std::string& to, double t,
                                 const std::string& match = "M1", const std::string& team = "T1") {
    return {match, team, from, to, t};
}

inline std::vector<int> touch_ints(const flowmotif::Possession& p) {
    std::vector<int> out;
    for (const auto& name : flowmotif::touch_sequence(p))
        out.push_back(std::stoi(name));
    return out;
}

} // namespace testing_helpers
