#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "possession.hpp"

namespace flowmotif {

/// Largest supported number of passes per motif. The alphabet for k has
/// Bell(k) members, so k = 10 already means 115975 patterns.
inline constexpr int kMaxMotifPasses = 10;

/// Canonical flow-motif label, e.g. "ABAC": players are lettered in order of
/// first appearance, so the label ignores who the players actually were.
struct MotifPattern {
    std::string label;

    std::size_t passes() const noexcept { return label.empty() ? 0 : label.size() - 1; }

    friend auto operator<=>(const MotifPattern&, const MotifPattern&) = default;
    friend bool operator==(const MotifPattern&, const MotifPattern&) = default;
};

/// Checks the restricted-growth and no-adjacent-repeat properties.
inline bool is_canonical(const MotifPattern& p) {
    if (p.label.empty() || p.label.front() != 'A')
        return false;
    char next = 'B';
    for (std::size_t i = 1; i < p.label.size(); ++i) {
        const char c = p.label[i];
        if (c == p.label[i - 1] || c < 'A' || c > next)
            return false;
        if (c == next)
            ++next;
    }
    return true;
}

namespace detail {

inline void require_k(int k, int lowest) {
    if (k < lowest || k > kMaxMotifPasses)
        throw DomainError("motif length k=" + std::to_string(k) + " outside [" +
                          std::to_string(lowest) + ", " + std::to_string(kMaxMotifPasses) + "]");
}

} // namespace detail

/// Relabels a touch window by order of first appearance. Throws
/// ContractViolation if two adjacent touches are the same player.
template <std::ranges::forward_range Window>
MotifPattern canonicalize(const Window& window) {
    using Player = std::ranges::range_value_t<Window>;
    std::vector<Player> seen;
    MotifPattern out;
    std::optional<Player> prev;
    for (const auto& player : window) {
        if (prev && *prev == player)
            throw ContractViolation("adjacent duplicate touch in motif window");
        auto it = std::find(seen.begin(), seen.end(), player);
        if (it == seen.end()) {
            if (seen.size() == 26)
                throw DomainError("motif window has more than 26 distinct players");
            seen.push_back(player);
            out.label.push_back(static_cast<char>('A' + seen.size() - 1));
        } else {
            out.label.push_back(static_cast<char>('A' + (it - seen.begin())));
        }
        prev = player;
    }
    return out;
}

/// Every canonical pattern with k passes (k + 1 letters), lexicographically.
inline std::vector<MotifPattern> enumerate_patterns(int k) {
    detail::require_k(k, 1);
    std::vector<MotifPattern> out;
    std::string label = "A";
    // Depth-first in letter order emits labels already sorted.
    auto grow = [&](auto& self, char fresh) -> void {
        if (label.size() == static_cast<std::size_t>(k) + 1) {
            out.push_back({label});
            return;
        }
        for (char c = 'A'; c <= fresh; ++c) {
            if (c == label.back())
                continue;
            label.push_back(c);
            self(self, c == fresh ? static_cast<char>(fresh + 1) : fresh);
            label.pop_back();
        }
    };
    grow(grow, 'B');
    return out;
}

/// The pattern set for one k plus a fast map from integer touch windows to
/// pattern indices. Used on the hot path of the null model.
class MotifAlphabet {
public:
    explicit MotifAlphabet(int k) : k_(k), patterns_(enumerate_patterns(k)) {
        const auto width = static_cast<std::uint64_t>(k) + 1;
        std::uint64_t table_size = 1;
        for (std::uint64_t i = 0; i < width; ++i)
            table_size *= width;
        dense_ = table_size <= (1u << 16);
        if (dense_)
            dense_index_.assign(table_size, -1);
        for (std::size_t i = 0; i < patterns_.size(); ++i) {
            const auto code = code_of_label(patterns_[i].label);
            if (dense_)
                dense_index_[code] = static_cast<std::int32_t>(i);
            else
                sparse_index_.emplace(code, static_cast<std::int32_t>(i));
        }
    }

    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return patterns_.size(); }
    const std::vector<MotifPattern>& patterns() const noexcept { return patterns_; }
    const MotifPattern& operator[](std::size_t i) const { return patterns_[i]; }

    /// Index of `p` in patterns(), or -1 when it is not part of this alphabet.
    std::int32_t index_of(const MotifPattern& p) const {
        if (p.label.size() != static_cast<std::size_t>(k_) + 1 || !is_canonical(p))
            return -1;
        return lookup(code_of_label(p.label));
    }

    /// Pattern index of the window touches[0..k]. The caller guarantees no
    /// adjacent duplicates; players are small integers.
    std::int32_t classify(const std::int32_t* touches) const {
        std::int32_t seen[kMaxMotifPasses + 1];
        int distinct = 0;
        std::uint64_t code = 0;
        const auto width = static_cast<std::uint64_t>(k_) + 1;
        for (int i = 0; i <= k_; ++i) {
            int letter = 0;
            while (letter < distinct && seen[letter] != touches[i])
                ++letter;
            if (letter == distinct)
                seen[distinct++] = touches[i];
            code = code * width + static_cast<std::uint64_t>(letter);
        }
        return lookup(code);
    }

private:
    std::uint64_t code_of_label(const std::string& label) const {
        const auto width = static_cast<std::uint64_t>(k_) + 1;
        std::uint64_t code = 0;
        for (char c : label)
            code = code * width + static_cast<std::uint64_t>(c - 'A');
        return code;
    }

    std::int32_t lookup(std::uint64_t code) const {
        if (dense_)
            return dense_index_[code];
        auto it = sparse_index_.find(code);
        return it == sparse_index_.end() ? -1 : it->second;
    }

    int k_;
    std::vector<MotifPattern> patterns_;
    bool dense_ = true;
    std::vector<std::int32_t> dense_index_;
    std::unordered_map<std::uint64_t, std::int32_t> sparse_index_;
};

/// Canonical motifs of every k-pass window of one possession, in order.
/// Possessions shorter than k passes yield nothing.
inline std::vector<MotifPattern> extract_motifs(const Possession& possession, int k = 3) {
    detail::require_k(k, 2);
    const auto touches = touch_sequence(possession);
    std::vector<MotifPattern> out;
    const auto n = possession.passes.size();
    const auto window = static_cast<std::size_t>(k);
    if (n < window)
        return out;
    out.reserve(n - window + 1);
    for (std::size_t start = 0; start + window <= n; ++start)
        out.push_back(canonicalize(std::span(touches).subspan(start, window + 1)));
    return out;
}

/// Motif occurrence counts for one match/team, keyed by the full alphabet.
struct MotifCountVector {
    std::string match_id;
    std::string team_id;
    int k = 3;
    std::vector<MotifPattern> patterns;
    std::vector<std::uint64_t> counts; // parallel to `patterns`

    std::uint64_t count(const MotifPattern& p) const {
        auto it = std::lower_bound(patterns.begin(), patterns.end(), p);
        if (it == patterns.end() || *it != p)
            throw DomainError("pattern " + p.label + " is not in the k=" + std::to_string(k) +
                              " alphabet");
        return counts[static_cast<std::size_t>(it - patterns.begin())];
    }

    std::uint64_t total() const {
        return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    }
};

/// Aggregates extract_motifs over possessions of a single match and team.
/// With no possessions the ids are taken from the arguments.
inline MotifCountVector count_motifs(const std::vector<Possession>& possessions, int k = 3,
                                     std::string match_id = {}, std::string team_id = {}) {
    detail::require_k(k, 2);
    if (!possessions.empty()) {
        match_id = possessions.front().match_id;
        team_id = possessions.front().team_id;
    }
    for (const auto& p : possessions)
        if (p.match_id != match_id || p.team_id != team_id)
            throw ContractViolation("count_motifs: possessions from different matches or teams");

    MotifAlphabet alphabet(k);
    MotifCountVector out{std::move(match_id), std::move(team_id), k, alphabet.patterns(),
                         std::vector<std::uint64_t>(alphabet.size(), 0)};
    for (const auto& p : possessions)
        for (const auto& m : extract_motifs(p, k))
            ++out.counts[static_cast<std::size_t>(alphabet.index_of(m))];
    return out;
}

} // namespace flowmotif
