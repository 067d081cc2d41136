#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "flowmotif/null_model.hpp"
#include "helpers.hpp"

using namespace flowmotif;
using testing_helpers::possession_of;
using testing_helpers::touch_ints;

namespace {

constexpr NullPolicy kPolicies[] = {NullPolicy::touch_shuffle_match,
                                    NullPolicy::touch_shuffle_possession,
                                    NullPolicy::uniform_walk};

std::map<int, int> multiset(const std::vector<Possession>& ps) {
    std::map<int, int> out;
    for (const auto& p : ps)
        for (int x : touch_ints(p))
            ++out[x];
    return out;
}

std::vector<Possession> random_match(std::mt19937_64& rng, int possessions, int players) {
    std::vector<Possession> ps;
    for (int p = 0; p < possessions; ++p) {
        const int n = 1 + static_cast<int>(rng() % 8);
        std::vector<int> touches = {static_cast<int>(rng() % static_cast<unsigned>(players))};
        for (int i = 0; i < n; ++i) {
            int x;
            do {
                x = static_cast<int>(rng() % static_cast<unsigned>(players));
            } while (x == touches.back());
            touches.push_back(x);
        }
        ps.push_back(possession_of(touches, "M1", "T1", 20.0 * p));
    }
    return ps;
}

void expect_valid(const std::vector<Possession>& original, const std::vector<Possession>& r) {
    ASSERT_EQ(r.size(), original.size());
    for (std::size_t p = 0; p < r.size(); ++p) {
        ASSERT_EQ(r[p].size(), original[p].size());
        for (std::size_t m = 0; m < r[p].size(); ++m) {
            EXPECT_NE(r[p].passes[m].passer, r[p].passes[m].receiver);
            EXPECT_EQ(r[p].passes[m].timestamp, original[p].passes[m].timestamp);
            if (m + 1 < r[p].size())
                EXPECT_EQ(r[p].passes[m].receiver, r[p].passes[m + 1].passer);
        }
    }
}

} // namespace

TEST(Randomize, SinglePassPossessionAnyPolicy) {
    const std::vector<Possession> ps = {possession_of({1, 2})};
    for (auto policy : kPolicies) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto r = randomize_possessions(ps, policy, seed);
            ASSERT_EQ(r.size(), 1u);
            ASSERT_EQ(r[0].size(), 1u);
            const auto& pass = r[0].passes[0];
            EXPECT_NE(pass.passer, pass.receiver);
            EXPECT_TRUE(pass.passer == "1" || pass.passer == "2");
            EXPECT_TRUE(pass.receiver == "1" || pass.receiver == "2");
        }
    }
}

TEST(Randomize, TwoPlayerMultisetIsConserved) {
    std::vector<Possession> ps;
    for (int i = 0; i < 5; ++i)
        ps.push_back(possession_of({1, 2, 1, 2}, "M1", "T1", 20.0 * i));
    ASSERT_EQ(multiset(ps), (std::map<int, int>{{1, 10}, {2, 10}}));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto r = randomize_possessions(ps, NullPolicy::touch_shuffle_match, seed);
        expect_valid(ps, r);
        EXPECT_EQ(multiset(r), (std::map<int, int>{{1, 10}, {2, 10}}));
    }
}

TEST(Randomize, ThreePlayerTouchFrequenciesExact) {
    const std::vector<Possession> ps = {possession_of({1, 2, 3, 1, 2}),
                                        possession_of({3, 1, 3}, "M1", "T1", 30),
                                        possession_of({2, 1}, "M1", "T1", 60)};
    const auto original = multiset(ps);
    std::map<int, int> total;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        for (auto [player, n] : multiset(randomize_possessions(ps, NullPolicy::touch_shuffle_match, seed)))
            total[player] += n;
    for (auto [player, n] : original)
        EXPECT_EQ(total[player], 1000 * n);
}

TEST(Randomize, ShapeAndValidityAllPolicies) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ps = random_match(rng, 25, 3 + trial % 9);
        for (auto policy : kPolicies) {
            auto r = randomize_possessions(ps, policy, rng());
            expect_valid(ps, r);
            if (policy == NullPolicy::touch_shuffle_match)
                EXPECT_EQ(multiset(r), multiset(ps));
            if (policy == NullPolicy::touch_shuffle_possession)
                for (std::size_t p = 0; p < ps.size(); ++p)
                    EXPECT_EQ(multiset({r[p]}), multiset({ps[p]}));
            if (policy == NullPolicy::uniform_walk)
                for (auto [player, n] : multiset(r))
                    EXPECT_TRUE(multiset(ps).count(player));
        }
    }
}

TEST(Randomize, ShuffleActuallyMovesPlayers) {
    std::mt19937_64 rng(2);
    const auto ps = random_match(rng, 30, 11);
    const auto r = randomize_possessions(ps, NullPolicy::touch_shuffle_match, 99);
    std::size_t moved = 0;
    for (std::size_t p = 0; p < ps.size(); ++p)
        moved += touch_ints(ps[p]) != touch_ints(r[p]);
    EXPECT_GT(moved, ps.size() / 2);
}

TEST(Randomize, InfeasiblePossessionIsDegenerate) {
    // Hand-built possession holding player 1 in three of four touches.
    Possession bad{"M1", "T1", {{"M1", "T1", "1", "1", 0}, {"M1", "T1", "1", "2", 1},
                                {"M1", "T1", "2", "1", 2}}};
    const std::vector<Possession> ps = {possession_of({3, 4}, "M1", "T1", -10), bad};
    try {
        randomize_possessions(ps, NullPolicy::touch_shuffle_possession, 1);
        FAIL() << "expected DegenerateInputError";
    } catch (const DegenerateInputError& e) {
        EXPECT_EQ(e.possession_index(), 1u);
        EXPECT_NE(std::string(e.what()).find("possession 1"), std::string::npos);
    }
}

TEST(Randomize, SinglePlayerMatchExhaustsRetryBudget) {
    Possession solo{"M1", "T1", {{"M1", "T1", "7", "7", 0}, {"M1", "T1", "7", "7", 1}}};
    EXPECT_THROW(randomize_possessions({solo}, NullPolicy::touch_shuffle_match, 3, 5),
                 DegenerateInputError);
    EXPECT_THROW(randomize_possessions({solo}, NullPolicy::uniform_walk, 3), DegenerateInputError);
}

TEST(Randomize, UniformWalkStartsAreUniform) {
    std::vector<Possession> ps;
    for (int i = 0; i < 4; ++i)
        ps.push_back(possession_of({i, (i + 1) % 4}, "M1", "T1", 20.0 * i));
    std::map<std::string, int> starts;
    const int draws = 5000;
    for (int s = 0; s < draws; ++s)
        ++starts[randomize_possessions(ps, NullPolicy::uniform_walk, static_cast<std::uint64_t>(s))[0]
                     .passes[0]
                     .passer];
    ASSERT_EQ(starts.size(), 4u);
    for (auto [name, n] : starts)
        EXPECT_NEAR(n, draws / 4, 150) << name; // ~5 sigma
}

TEST(Randomize, PolicyNames) {
    for (auto policy : kPolicies)
        EXPECT_EQ(parse_null_policy(to_string(policy)), policy);
    EXPECT_EQ(parse_null_policy("touch_shuffle_match"), NullPolicy::touch_shuffle_match);
    EXPECT_THROW(parse_null_policy("rewire"), DomainError);
}

TEST(NullDistribution, SingleReplicateIsDegenerate) {
    std::mt19937_64 rng(8);
    const auto ps = random_match(rng, 20, 6);
    NullModelConfig config;
    config.replicates = 1;
    const auto d = null_distribution(ps, 3, config);
    EXPECT_TRUE(d.degenerate);
    EXPECT_EQ(d.replicates, 1u);
    for (double s : d.stddev)
        EXPECT_EQ(s, 0.0);
    const auto z = z_scores(count_motifs(ps, 3), d);
    for (bool flag : z.degenerate)
        EXPECT_TRUE(flag);
}

TEST(NullDistribution, NoWindowsGivesZeroMoments) {
    NullModelConfig config;
    config.replicates = 50;
    const auto d = null_distribution({possession_of({1, 2})}, 3, config);
    EXPECT_FALSE(d.degenerate);
    ASSERT_EQ(d.mean.size(), 5u);
    for (std::size_t m = 0; m < 5; ++m) {
        EXPECT_EQ(d.mean[m], 0.0);
        EXPECT_EQ(d.stddev[m], 0.0);
    }
}

TEST(NullDistribution, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(12);
    const auto ps = random_match(rng, 60, 11);
    for (auto policy : kPolicies) {
        NullModelConfig config;
        config.replicates = 300;
        config.master_seed = 77;
        config.policy = policy;
        const auto a = null_replicate_counts(ps, 3, config, 1);
        const auto b = null_replicate_counts(ps, 3, config, 1);
        const auto c = null_replicate_counts(ps, 3, config, 4);
        EXPECT_EQ(a.counts, b.counts);
        EXPECT_EQ(a.counts, c.counts);
        const auto da = summarize(a, 3), dc = summarize(c, 3);
        EXPECT_EQ(da.mean, dc.mean);
        EXPECT_EQ(da.stddev, dc.stddev);
        config.master_seed = 78;
        EXPECT_NE(null_replicate_counts(ps, 3, config, 1).counts, a.counts);
    }
}

TEST(NullDistribution, BesselCorrectedMoments) {
    ReplicateCounts counts{enumerate_patterns(2), 4, {1, 0, 3, 0, 5, 0, 7, 2}};
    const auto d = summarize(counts, 2);
    EXPECT_DOUBLE_EQ(d.mean[0], 4.0);
    EXPECT_DOUBLE_EQ(d.stddev[0], std::sqrt(20.0 / 3.0));
    EXPECT_DOUBLE_EQ(d.mean[1], 0.5);
    EXPECT_DOUBLE_EQ(d.stddev[1], 1.0);
    const std::size_t subset[] = {0, 1};
    EXPECT_DOUBLE_EQ(summarize(counts, 2, subset).mean[0], 2.0);
}

TEST(NullDistribution, CountsPerReplicateConserveWindows) {
    std::mt19937_64 rng(5);
    const auto ps = random_match(rng, 40, 8);
    const auto windows = count_motifs(ps, 3).total();
    NullModelConfig config;
    config.replicates = 100;
    const auto counts = null_replicate_counts(ps, 3, config);
    for (std::size_t r = 0; r < counts.replicates; ++r) {
        std::uint64_t sum = 0;
        for (auto c : counts.row(r))
            sum += c;
        EXPECT_EQ(sum, windows);
    }
}

namespace {

MotifCountVector counts_of(std::vector<std::uint64_t> c) {
    return {"M", "T", 2, enumerate_patterns(2), std::move(c)};
}

NullDistribution null_of(std::vector<double> mean, std::vector<double> sd) {
    return {2, enumerate_patterns(2), std::move(mean), std::move(sd), 100, false};
}

} // namespace

TEST(ZScores, DirectFormulaAndConventions) {
    const auto z = z_scores(counts_of({8, 4}), null_of({4, 4}, {2, 0}));
    EXPECT_DOUBLE_EQ(z.z[0], 2.0);
    EXPECT_FALSE(z.degenerate[0]);
    EXPECT_EQ(z.z[1], 0.0);
    EXPECT_FALSE(z.degenerate[1]);

    const auto capped = z_scores(counts_of({5, 3}), null_of({4, 4}, {0, 0}));
    EXPECT_EQ(capped.z[0], kZCap);
    EXPECT_TRUE(capped.degenerate[0]);
    EXPECT_EQ(capped.z[1], -kZCap);
    EXPECT_TRUE(capped.degenerate[1]);
}

TEST(ZScores, KMismatchIsContractViolation) {
    NullDistribution three{3, enumerate_patterns(3), std::vector<double>(5, 0.0),
                           std::vector<double>(5, 1.0), 10, false};
    EXPECT_THROW(z_scores(counts_of({1, 1}), three), ContractViolation);
}
