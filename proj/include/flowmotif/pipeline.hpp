#pragma once

#include <vector>

#include "ingest.hpp"
#include "motif.hpp"
#include "null_model.hpp"
#include "parallel.hpp"
#include "possession.hpp"

namespace flowmotif {

struct PipelineConfig {
    SegmentationConfig segmentation;
    int k = 3;
    NullModelConfig null;
};

/// Everything computed for one team in one match.
struct MatchAnalysis {
    MotifCountVector counts;
    NullDistribution null;
    ZScoreProfile z;
};

inline MotifCountVector count_match_motifs(const MatchEventLog& log, const PipelineConfig& config) {
    return count_motifs(segment_possessions(log, config.segmentation), config.k, log.match_id,
                        log.team_id);
}

inline MatchAnalysis analyze_match(const MatchEventLog& log, const PipelineConfig& config,
                                   unsigned threads = 1) {
    const auto possessions = segment_possessions(log, config.segmentation);
    MatchAnalysis out;
    out.counts = count_motifs(possessions, config.k, log.match_id, log.team_id);
    out.null = null_distribution(possessions, config.k, config.null, threads);
    out.z = z_scores(out.counts, out.null);
    return out;
}

/// Runs analyze_match over every log. Matches are distributed over `threads`
/// workers; each match draws its replicates from its own derived seeds, so
/// the output is identical for any thread count.
inline std::vector<MatchAnalysis> analyze_matches(const std::vector<MatchEventLog>& logs,
                                                  const PipelineConfig& config, unsigned threads) {
    config.segmentation.validate();
    config.null.validate();
    std::vector<MatchAnalysis> out(logs.size());
    if (logs.size() == 1) {
        out[0] = analyze_match(logs[0], config, threads);
        return out;
    }
    parallel_for(logs.size(), threads, [&](std::size_t i) { out[i] = analyze_match(logs[i], config); });
    return out;
}

} // namespace flowmotif
