#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "motif.hpp"
#include "parallel.hpp"
#include "possession.hpp"
#include "seeding.hpp"

namespace flowmotif {

/// How a replicate reassigns players to touch slots.
enum class NullPolicy {
    touch_shuffle_match,      // permute all touch slots of the match
    touch_shuffle_possession, // permute slots within each possession
    uniform_walk,             // draw each touch uniformly, no immediate repeat
};

inline NullPolicy parse_null_policy(std::string_view name) {
    std::string key(name);
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "touch-shuffle-match")
        return NullPolicy::touch_shuffle_match;
    if (key == "touch-shuffle-possession")
        return NullPolicy::touch_shuffle_possession;
    if (key == "uniform-walk")
        return NullPolicy::uniform_walk;
    throw DomainError("unknown null model '" + std::string(name) + "'");
}

inline std::string_view to_string(NullPolicy policy) {
    switch (policy) {
    case NullPolicy::touch_shuffle_match:
        return "touch-shuffle-match";
    case NullPolicy::touch_shuffle_possession:
        return "touch-shuffle-possession";
    case NullPolicy::uniform_walk:
        return "uniform-walk";
    }
    return "unknown";
}

struct NullModelConfig {
    std::size_t replicates = 1000;
    NullPolicy policy = NullPolicy::touch_shuffle_match;
    std::uint64_t master_seed = 0;
    int max_repair_attempts = 100;

    void validate() const {
        if (replicates < 1)
            throw DomainError("replicates must be at least 1");
        if (max_repair_attempts < 1)
            throw DomainError("max_repair_attempts must be at least 1");
    }
};

/// Z-scores whose null deviation is zero but whose count differs from the
/// null mean are clamped to this magnitude and flagged.
inline constexpr double kZCap = 10.0;

/// Integer view of one match: players interned to 0..P-1 (in order of first
/// touch) and all touch slots laid out possession after possession.
class TouchLayout {
public:
    explicit TouchLayout(const std::vector<Possession>& possessions) {
        offsets_.push_back(0);
        std::map<std::string, std::int32_t, std::less<>> ids;
        auto intern = [&](const std::string& name) {
            auto [it, inserted] = ids.try_emplace(name, static_cast<std::int32_t>(players_.size()));
            if (inserted)
                players_.push_back(name);
            return it->second;
        };
        for (std::size_t p = 0; p < possessions.size(); ++p) {
            const auto& passes = possessions[p].passes;
            if (!passes.empty()) {
                touches_.push_back(intern(passes.front().passer));
                for (const auto& pass : passes)
                    touches_.push_back(intern(pass.receiver));
            }
            offsets_.push_back(touches_.size());
        }
        owner_.resize(touches_.size());
        starts_.assign(touches_.size(), 0);
        for (std::size_t p = 0; p + 1 < offsets_.size(); ++p) {
            if (offsets_[p] < offsets_[p + 1])
                starts_[offsets_[p]] = 1;
            for (auto i = offsets_[p]; i < offsets_[p + 1]; ++i)
                owner_[i] = static_cast<std::int32_t>(p);
        }
    }

    std::size_t possession_count() const noexcept { return offsets_.size() - 1; }
    std::size_t slot_count() const noexcept { return touches_.size(); }
    std::size_t player_count() const noexcept { return players_.size(); }
    std::span<const std::int32_t> touches() const noexcept { return touches_; }
    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    const std::vector<std::string>& players() const noexcept { return players_; }
    bool is_start(std::size_t slot) const noexcept { return starts_[slot] != 0; }
    std::size_t owner(std::size_t slot) const noexcept { return static_cast<std::size_t>(owner_[slot]); }

private:
    std::vector<std::int32_t> touches_;
    std::vector<std::size_t> offsets_;
    std::vector<std::string> players_;
    std::vector<std::int32_t> owner_;
    std::vector<std::uint8_t> starts_;
};

/// Produces randomized touch arrays with the same layout as the source match.
/// Holds no RNG; every draw takes the generator explicitly.
class TouchRandomizer {
public:
    TouchRandomizer(const TouchLayout& layout, NullPolicy policy, int max_repair_attempts)
        : layout_(layout), policy_(policy), attempts_(max_repair_attempts) {
        if (policy_ == NullPolicy::touch_shuffle_possession)
            check_possessions_feasible();
    }

    /// Fills `out` (resized to slot_count) with one replicate.
    template <typename Rng>
    void draw(Rng& rng, std::vector<std::int32_t>& out) const {
        const auto src = layout_.touches();
        out.assign(src.begin(), src.end());
        switch (policy_) {
        case NullPolicy::touch_shuffle_match:
            shuffle_range(rng, out, 0, out.size());
            break;
        case NullPolicy::touch_shuffle_possession: {
            const auto off = layout_.offsets();
            for (std::size_t p = 0; p + 1 < off.size(); ++p)
                shuffle_range(rng, out, off[p], off[p + 1]);
            break;
        }
        case NullPolicy::uniform_walk:
            uniform_walk(rng, out);
            break;
        }
    }

private:
    bool clash(const std::vector<std::int32_t>& t, std::size_t i) const {
        return !layout_.is_start(i) && t[i] == t[i - 1];
    }

    bool clean_around(const std::vector<std::int32_t>& t, std::size_t i) const {
        return !clash(t, i) && !(i + 1 < t.size() && clash(t, i + 1));
    }

    // Shuffles slots [begin, end) and repairs adjacent repeats by swapping the
    // offending slot with random partners from the same range. After
    // attempts_ failed swaps for one slot the whole range is reshuffled; after
    // attempts_ reshuffles the input is declared degenerate.
    template <typename Rng>
    void shuffle_range(Rng& rng, std::vector<std::int32_t>& t, std::size_t begin,
                       std::size_t end) const {
        const std::size_t len = end - begin;
        if (len < 2)
            return;
        std::size_t failed_slot = begin;
        for (int round = 0; round < attempts_; ++round) {
            std::shuffle(t.begin() + static_cast<std::ptrdiff_t>(begin),
                         t.begin() + static_cast<std::ptrdiff_t>(end), rng);
            std::uniform_int_distribution<std::size_t> partner(begin, end - 2);
            bool ok = true;
            for (std::size_t i = begin; i < end && ok; ++i) {
                if (!clash(t, i))
                    continue;
                bool fixed = false;
                for (int tries = 0; tries < attempts_ && !fixed; ++tries) {
                    std::size_t j = partner(rng);
                    if (j >= i)
                        ++j;
                    if (t[j] == t[i])
                        continue;
                    std::swap(t[i], t[j]);
                    if (clean_around(t, i) && clean_around(t, j))
                        fixed = true;
                    else
                        std::swap(t[i], t[j]);
                }
                if (!fixed) {
                    ok = false;
                    failed_slot = i;
                }
            }
            if (ok)
                return;
        }
        const auto p = layout_.owner(failed_slot);
        throw DegenerateInputError("no valid touch arrangement found for possession " +
                                       std::to_string(p) + " after " + std::to_string(attempts_) +
                                       " reshuffles",
                                   p);
    }

    template <typename Rng>
    void uniform_walk(Rng& rng, std::vector<std::int32_t>& t) const {
        const auto players = static_cast<std::int32_t>(layout_.player_count());
        if (t.empty())
            return;
        if (players < 2)
            throw DegenerateInputError("uniform walk needs at least two players", layout_.owner(0));
        std::uniform_int_distribution<std::int32_t> any(0, players - 1);
        std::uniform_int_distribution<std::int32_t> other(0, players - 2);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (layout_.is_start(i)) {
                t[i] = any(rng);
            } else {
                auto next = other(rng);
                if (next >= t[i - 1])
                    ++next;
                t[i] = next;
            }
        }
    }

    // A multiset of L touches admits a no-repeat order iff no player holds
    // more than ceil(L/2) of them.
    void check_possessions_feasible() const {
        const auto off = layout_.offsets();
        const auto src = layout_.touches();
        std::vector<std::size_t> tally(layout_.player_count());
        for (std::size_t p = 0; p + 1 < off.size(); ++p) {
            const auto len = off[p + 1] - off[p];
            std::fill(tally.begin(), tally.end(), 0);
            for (auto i = off[p]; i < off[p + 1]; ++i)
                if (++tally[static_cast<std::size_t>(src[i])] > (len + 1) / 2)
                    throw DegenerateInputError(
                        "possession " + std::to_string(p) +
                            ": one player holds more than half of its touches",
                        p);
        }
    }

    const TouchLayout& layout_;
    NullPolicy policy_;
    int attempts_;
};

/// Seed of replicate `replicate` for one match; independent of scheduling.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::string_view match_id,
                                    std::string_view team_id, std::uint64_t replicate) {
    return derive_seed(master_seed, fnv1a64(match_id), fnv1a64(team_id), replicate);
}

/// One randomized copy of `possessions`: same count, same lengths, same
/// timestamps; only the players in each touch slot change.
inline std::vector<Possession> randomize_possessions(const std::vector<Possession>& possessions,
                                                     NullPolicy policy, std::uint64_t seed,
                                                     int max_repair_attempts = 100) {
    if (max_repair_attempts < 1)
        throw DomainError("max_repair_attempts must be at least 1");
    for (const auto& p : possessions)
        if (p.match_id != possessions.front().match_id || p.team_id != possessions.front().team_id)
            throw ContractViolation("randomize_possessions: possessions from different matches");
    TouchLayout layout(possessions);
    TouchRandomizer randomizer(layout, policy, max_repair_attempts);
    std::mt19937_64 rng(seed);
    std::vector<std::int32_t> touches;
    randomizer.draw(rng, touches);

    std::vector<Possession> out = possessions;
    const auto off = layout.offsets();
    const auto& names = layout.players();
    for (std::size_t p = 0; p < out.size(); ++p) {
        auto& passes = out[p].passes;
        for (std::size_t m = 0; m < passes.size(); ++m) {
            passes[m].passer = names[static_cast<std::size_t>(touches[off[p] + m])];
            passes[m].receiver = names[static_cast<std::size_t>(touches[off[p] + m + 1])];
        }
    }
    return out;
}

/// Adds the motif counts of one touch array into `counts`.
inline void accumulate_motifs(const TouchLayout& layout, std::span<const std::int32_t> touches,
                              const MotifAlphabet& alphabet, std::span<std::uint64_t> counts) {
    const auto off = layout.offsets();
    const auto window = static_cast<std::size_t>(alphabet.k()) + 1;
    for (std::size_t p = 0; p + 1 < off.size(); ++p) {
        if (off[p + 1] - off[p] < window)
            continue;
        for (auto s = off[p]; s + window <= off[p + 1]; ++s)
            ++counts[static_cast<std::size_t>(alphabet.classify(touches.data() + s))];
    }
}

/// Motif counts of every replicate, row-major: replicates x patterns.
struct ReplicateCounts {
    std::vector<MotifPattern> patterns;
    std::size_t replicates = 0;
    std::vector<std::uint64_t> counts;

    std::span<const std::uint64_t> row(std::size_t r) const {
        return std::span(counts).subspan(r * patterns.size(), patterns.size());
    }
};

/// Draws config.replicates null replicates and counts their motifs. Replicate
/// r uses replicate_seed(master_seed, match, team, r), so the result does not
/// depend on `threads`.
inline ReplicateCounts null_replicate_counts(const std::vector<Possession>& possessions, int k,
                                             const NullModelConfig& config, unsigned threads = 1) {
    config.validate();
    for (const auto& p : possessions)
        if (p.match_id != possessions.front().match_id || p.team_id != possessions.front().team_id)
            throw ContractViolation("null model: possessions from different matches or teams");
    const MotifAlphabet alphabet(k);
    const std::string match_id = possessions.empty() ? std::string{} : possessions.front().match_id;
    const std::string team_id = possessions.empty() ? std::string{} : possessions.front().team_id;

    TouchLayout layout(possessions);
    TouchRandomizer randomizer(layout, config.policy, config.max_repair_attempts);

    ReplicateCounts out{alphabet.patterns(), config.replicates,
                        std::vector<std::uint64_t>(config.replicates * alphabet.size(), 0)};
    constexpr std::size_t kChunk = 32;
    const std::size_t chunks = (config.replicates + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::vector<std::int32_t> touches;
        const std::size_t last = std::min(config.replicates, (c + 1) * kChunk);
        for (std::size_t r = c * kChunk; r < last; ++r) {
            std::mt19937_64 rng(replicate_seed(config.master_seed, match_id, team_id, r));
            randomizer.draw(rng, touches);
            accumulate_motifs(layout, touches, alphabet,
                              std::span(out.counts).subspan(r * alphabet.size(), alphabet.size()));
        }
    });
    return out;
}

/// Per-pattern sample mean and Bessel-corrected deviation of null counts.
struct NullDistribution {
    int k = 3;
    std::vector<MotifPattern> patterns;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::size_t replicates = 0;
    bool degenerate = false; // fewer than two replicates: stddev reported as 0
};

/// Moments over the replicate rows selected by `use` (all rows when empty).
inline NullDistribution summarize(const ReplicateCounts& counts, int k,
                                  std::span<const std::size_t> use = {}) {
    std::vector<std::size_t> rows(use.begin(), use.end());
    if (rows.empty())
        for (std::size_t r = 0; r < counts.replicates; ++r)
            rows.push_back(r);
    const std::size_t width = counts.patterns.size();
    NullDistribution out{k, counts.patterns, std::vector<double>(width, 0.0),
                         std::vector<double>(width, 0.0), rows.size(), rows.size() < 2};
    if (rows.empty())
        return out;
    for (std::size_t m = 0; m < width; ++m) {
        std::uint64_t sum = 0;
        for (auto r : rows)
            sum += counts.row(r)[m];
        const double mean = static_cast<double>(sum) / static_cast<double>(rows.size());
        double ss = 0.0;
        for (auto r : rows) {
            const double d = static_cast<double>(counts.row(r)[m]) - mean;
            ss += d * d;
        }
        out.mean[m] = mean;
        out.stddev[m] = rows.size() < 2 ? 0.0 : std::sqrt(ss / static_cast<double>(rows.size() - 1));
    }
    return out;
}

inline NullDistribution null_distribution(const std::vector<Possession>& possessions, int k,
                                          const NullModelConfig& config, unsigned threads = 1) {
    return summarize(null_replicate_counts(possessions, k, config, threads), k);
}

/// Standardized motif prevalence of one match against its null ensemble.
struct ZScoreProfile {
    std::string match_id;
    std::string team_id;
    int k = 3;
    std::vector<MotifPattern> patterns;
    std::vector<double> z;
    std::vector<bool> degenerate; // capped, or null distribution itself degenerate

    double at(const MotifPattern& p) const {
        auto it = std::find(patterns.begin(), patterns.end(), p);
        if (it == patterns.end())
            throw DomainError("pattern " + p.label + " is not in this profile");
        return z[static_cast<std::size_t>(it - patterns.begin())];
    }
};

/// z = (count - mean) / stddev. A zero deviation gives 0 when the count equals
/// the mean and +/-kZCap (flagged) otherwise, so values stay finite.
inline ZScoreProfile z_scores(const MotifCountVector& real, const NullDistribution& null) {
    if (real.k != null.k || real.patterns != null.patterns)
        throw ContractViolation("z_scores: observed counts and null distribution disagree on k");
    ZScoreProfile out{real.match_id, real.team_id, real.k, real.patterns,
                      std::vector<double>(real.patterns.size(), 0.0),
                      std::vector<bool>(real.patterns.size(), null.degenerate)};
    for (std::size_t m = 0; m < real.patterns.size(); ++m) {
        const double deviation = static_cast<double>(real.counts[m]) - null.mean[m];
        if (null.stddev[m] > 0.0) {
            out.z[m] = deviation / null.stddev[m];
        } else if (deviation != 0.0) {
            out.z[m] = deviation > 0.0 ? kZCap : -kZCap;
            out.degenerate[m] = true;
        }
    }
    return out;
}

} // namespace flowmotif
