#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "dialogseg/corpus.hpp"

namespace dialogseg {

/// Adjacent-utterance similarity callback. For asymmetric scorers the first
/// argument is the earlier utterance.
using ScoreFn =
    std::function<double(const std::vector<std::string>&, const std::vector<std::string>&)>;

enum class SegmentationMode { offline, online };

struct SegmenterConfig {
    double alpha = 0.5;
    SegmentationMode mode = SegmentationMode::offline;
    std::size_t smoothing_width = 3;   // odd; 1 disables smoothing
    std::size_t min_gaps_online = 3;   // depths required before any emission
    std::size_t min_segment_len = 0;   // 0 disables the minimum-length filter

    void validate() const;
};

/// Per-gap similarities and depths with their population statistics.
struct DepthProfile {
    std::vector<double> sims;
    std::vector<double> depths;
    double mu = 0.0;
    double sigma = 0.0;

    double cutoff(double alpha) const { return mu + alpha * sigma; }
};

struct SegmentationResult {
    std::set<std::size_t> boundaries;
    DepthProfile profile;
};

/// Entry i scores utterances i and i+1. Throws TooShort below 2 utterances.
std::vector<double> similarity_profile(const Session& session, const ScoreFn& scorer);

/// Centered moving average; edges use the truncated window. width must be
/// odd; width 1 is the identity.
std::vector<double> smooth(const std::vector<double>& profile, std::size_t width);

/// Peak reached by climbing from i while values are non-decreasing.
double left_peak(std::span<const double> profile, std::size_t i);
double right_peak(std::span<const double> profile, std::size_t i);

/// Two-sided valley depth (left peak - value) + (right peak - value).
/// The first gap has no left context and never forms a valley: depth 0.
double depth_offline(std::span<const double> profile, std::size_t i);

/// Depth of the newest gap using only its left side.
double depth_online(std::span<const double> prefix_profile);

/// Depths and statistics for an already-smoothed similarity profile.
DepthProfile build_depth_profile(std::vector<double> sims);

/// Gaps whose depth strictly exceeds cutoff(alpha) = mu + alpha * sigma.
std::set<std::size_t> apply_cutoff(const DepthProfile& profile, double alpha);

/// Drops boundaries that would close a segment shorter than min_len,
/// scanning left to right. min_len 0 keeps everything.
std::set<std::size_t> enforce_min_segment(const std::set<std::size_t>& boundaries,
                                          std::size_t min_len);

/// profile -> smooth -> two-sided depths -> per-session mu/sigma -> cutoff.
SegmentationResult segment_offline(const Session& session, const ScoreFn& scorer,
                                   const SegmenterConfig& config);

struct OnlineBoundary {
    std::size_t gap_index;
    double depth;
    double cutoff;
};

/// Streaming segmenter: one instance per conversation. Each push computes
/// the newest gap's similarity and left-only depth, updates the running
/// depth statistics, and reports a boundary when the depth strictly exceeds
/// the cutoff after the warm-up. Smoothing is not applied online.
class OnlineSegmenter {
public:
    OnlineSegmenter(ScoreFn scorer, SegmenterConfig config);

    std::optional<OnlineBoundary> push(const std::vector<std::string>& tokens);
    void reset();

    const std::vector<double>& sims() const { return sims_; }
    const std::vector<double>& depths() const { return depths_; }
    const std::set<std::size_t>& boundaries() const { return boundaries_; }

private:
    ScoreFn scorer_;
    SegmenterConfig config_;
    std::vector<std::string> prev_tokens_;
    bool has_prev_ = false;
    std::vector<double> sims_;
    std::vector<double> depths_;
    std::set<std::size_t> boundaries_;
    double depth_sum_ = 0.0;
    double depth_sq_sum_ = 0.0;
};

/// One `gap_index<TAB>similarity<TAB>depth<TAB>boundary{0,1}` row per gap.
void dump_profile_tsv(std::ostream& out, const SegmentationResult& result);

}  // namespace dialogseg
