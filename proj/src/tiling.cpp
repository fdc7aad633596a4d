#include "dialogseg/tiling.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "dialogseg/errors.hpp"

namespace dialogseg {

void SegmenterConfig::validate() const {
    if (smoothing_width % 2 == 0)
        throw std::invalid_argument("smoothing_width must be odd");
    if (min_gaps_online < 1)
        throw std::invalid_argument("min_gaps_online must be >= 1");
}

std::vector<double> similarity_profile(const Session& session, const ScoreFn& scorer) {
    const auto& utts = session.utterances;
    if (utts.size() < 2) throw TooShort(utts.size());
    std::vector<double> sims;
    sims.reserve(utts.size() - 1);
    for (std::size_t i = 0; i + 1 < utts.size(); ++i)
        sims.push_back(scorer(utts[i].tokens, utts[i + 1].tokens));
    return sims;
}

std::vector<double> smooth(const std::vector<double>& profile, std::size_t width) {
    if (width % 2 == 0) throw std::invalid_argument("smoothing width must be odd");
    if (width == 1 || profile.empty()) return profile;
    const std::size_t n = profile.size();
    const std::size_t half = width / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(i + half, n - 1);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += profile[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

double left_peak(std::span<const double> profile, std::size_t i) {
    double peak = profile[i];
    for (std::size_t j = i; j > 0 && profile[j - 1] >= peak; --j) peak = profile[j - 1];
    return peak;
}

double right_peak(std::span<const double> profile, std::size_t i) {
    double peak = profile[i];
    for (std::size_t j = i; j + 1 < profile.size() && profile[j + 1] >= peak; ++j)
        peak = profile[j + 1];
    return peak;
}

double depth_offline(std::span<const double> profile, std::size_t i) {
    if (i == 0) return 0.0;  // no left context, so no valley
    const double v = profile[i];
    return (left_peak(profile, i) - v) + (right_peak(profile, i) - v);
}

double depth_online(std::span<const double> prefix_profile) {
    const std::size_t last = prefix_profile.size() - 1;
    return left_peak(prefix_profile, last) - prefix_profile[last];
}

DepthProfile build_depth_profile(std::vector<double> sims) {
    DepthProfile dp;
    dp.sims = std::move(sims);
    const std::size_t n = dp.sims.size();
    dp.depths.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dp.depths[i] = depth_offline(dp.sims, i);
        sum += dp.depths[i];
    }
    if (n == 0) return dp;
    dp.mu = sum / static_cast<double>(n);
    double sq = 0.0;
    for (double d : dp.depths) sq += (d - dp.mu) * (d - dp.mu);
    dp.sigma = std::sqrt(sq / static_cast<double>(n));
    return dp;
}

std::set<std::size_t> apply_cutoff(const DepthProfile& profile, double alpha) {
    const double cut = profile.cutoff(alpha);
    std::set<std::size_t> boundaries;
    for (std::size_t i = 0; i < profile.depths.size(); ++i)
        if (profile.depths[i] > cut) boundaries.insert(i);
    return boundaries;
}

std::set<std::size_t> enforce_min_segment(const std::set<std::size_t>& boundaries,
                                          std::size_t min_len) {
    if (min_len == 0) return boundaries;
    std::set<std::size_t> kept;
    std::size_t start = 0;  // a boundary at gap g closes the segment [start, g]
    for (std::size_t g : boundaries) {
        if (g + 1 - start >= min_len) {
            kept.insert(g);
            start = g + 1;
        }
    }
    return kept;
}

SegmentationResult segment_offline(const Session& session, const ScoreFn& scorer,
                                   const SegmenterConfig& config) {
    config.validate();
    SegmentationResult result;
    auto sims = smooth(similarity_profile(session, scorer), config.smoothing_width);
    result.profile = build_depth_profile(std::move(sims));
    result.boundaries =
        enforce_min_segment(apply_cutoff(result.profile, config.alpha), config.min_segment_len);
    return result;
}

OnlineSegmenter::OnlineSegmenter(ScoreFn scorer, SegmenterConfig config)
    : scorer_(std::move(scorer)), config_(std::move(config)) {
    config_.validate();
}

std::optional<OnlineBoundary> OnlineSegmenter::push(const std::vector<std::string>& tokens) {
    if (!has_prev_) {
        prev_tokens_ = tokens;
        has_prev_ = true;
        return std::nullopt;
    }
    sims_.push_back(scorer_(prev_tokens_, tokens));
    prev_tokens_ = tokens;

    const double depth = depth_online(sims_);
    depths_.push_back(depth);
    depth_sum_ += depth;
    depth_sq_sum_ += depth * depth;

    const auto n = static_cast<double>(depths_.size());
    const double mu = depth_sum_ / n;
    const double var = std::max(0.0, depth_sq_sum_ / n - mu * mu);
    const double cut = mu + config_.alpha * std::sqrt(var);

    if (depths_.size() >= config_.min_gaps_online && depth > cut) {
        const std::size_t gap = sims_.size() - 1;
        boundaries_.insert(gap);
        return OnlineBoundary{gap, depth, cut};
    }
    return std::nullopt;
}

void OnlineSegmenter::reset() {
    prev_tokens_.clear();
    has_prev_ = false;
    sims_.clear();
    depths_.clear();
    boundaries_.clear();
    depth_sum_ = 0.0;
    depth_sq_sum_ = 0.0;
}

void dump_profile_tsv(std::ostream& out, const SegmentationResult& result) {
    const auto& p = result.profile;
    for (std::size_t i = 0; i < p.sims.size(); ++i) {
        out << i << '\t' << p.sims[i] << '\t' << p.depths[i] << '\t'
            << (result.boundaries.count(i) ? 1 : 0) << '\n';
    }
}

}  // namespace dialogseg
