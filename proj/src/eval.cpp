#include "dialogseg/eval.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "dialogseg/errors.hpp"
#include "dialogseg/rng.hpp"

namespace dialogseg {

namespace {

// Greedy two-pointer matching over sorted boundary sets; each side is
// consumed at most once. Exact matching is the tolerance-0 case.
std::size_t match_count(const BoundarySet& predicted, const BoundarySet& gold,
                        std::size_t tolerance) {
    std::size_t matched = 0;
    auto p = predicted.begin();
    auto g = gold.begin();
    while (p != predicted.end() && g != gold.end()) {
        const auto a = *p;
        const auto b = *g;
        const std::size_t gap = a > b ? a - b : b - a;
        if (gap <= tolerance) {
            ++matched;
            ++p;
            ++g;
        } else if (a < b) {
            ++p;
        } else {
            ++g;
        }
    }
    return matched;
}

}  // namespace

EvalReport boundary_prf(std::span<const BoundarySet> predicted,
                        std::span<const BoundarySet> gold, std::size_t tolerance) {
    if (predicted.size() != gold.size())
        throw SessionCountMismatch(predicted.size(), gold.size());
    EvalReport r;
    for (std::size_t s = 0; s < predicted.size(); ++s) {
        r.true_positives += match_count(predicted[s], gold[s], tolerance);
        r.predicted_count += predicted[s].size();
        r.gold_count += gold[s].size();
    }
    const auto tp = static_cast<double>(r.true_positives);
    r.precision = r.predicted_count ? tp / static_cast<double>(r.predicted_count) : 0.0;
    r.recall = r.gold_count ? tp / static_cast<double>(r.gold_count) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

double gold_prior(std::span<const Session> sessions) {
    std::size_t gold = 0;
    std::size_t gaps = 0;
    for (const auto& s : sessions) {
        gold += s.gold_boundaries.size();
        gaps += s.gap_count();
    }
    return gaps ? static_cast<double>(gold) / static_cast<double>(gaps) : 0.0;
}

std::vector<BoundarySet> random_baseline(std::span<const Session> sessions, double prior,
                                         std::uint64_t seed) {
    if (prior < 0.0 || prior > 1.0)
        throw std::invalid_argument("prior must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::vector<BoundarySet> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) {
        BoundarySet b;
        for (std::size_t gap = 0; gap < s.gap_count(); ++gap)
            if (uniform01(rng) < prior) b.insert(gap);
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<double> TuneOptions::grid() const {
    if (!alphas.empty()) return alphas;
    std::vector<double> g;
    g.reserve(31);
    for (int k = 0; k <= 30; ++k) g.push_back(static_cast<double>(k - 10) / 10.0);
    return g;
}

double tune_alpha(std::span<const Session> sessions, const ScoreFn& scorer,
                  const SegmenterConfig& config_base, const TuneOptions& options) {
    std::size_t gold = 0;
    std::size_t gaps = 0;
    for (const auto& s : sessions) {
        gold += s.gold_boundaries.size();
        gaps += s.gap_count();
    }
    if (gaps == 0) throw NoGoldBoundaries();

    const auto grid = options.grid();
    if (grid.empty()) throw std::invalid_argument("alpha grid must be non-empty");

    // Depth profiles do not depend on alpha; compute them once.
    std::vector<DepthProfile> profiles;
    profiles.reserve(sessions.size());
    SegmenterConfig cfg = config_base;
    cfg.validate();
    for (const auto& s : sessions) {
        auto sims = smooth(similarity_profile(s, scorer), cfg.smoothing_width);
        profiles.push_back(build_depth_profile(std::move(sims)));
    }

    double best_alpha = grid.front();
    std::size_t best_obj = static_cast<std::size_t>(-1);
    bool first = true;
    for (double alpha : grid) {
        std::size_t predicted = 0;
        for (const auto& p : profiles)
            predicted += enforce_min_segment(apply_cutoff(p, alpha), cfg.min_segment_len).size();
        const std::size_t obj = predicted > gold ? predicted - gold : gold - predicted;
        if (first || obj < best_obj || (obj == best_obj && alpha > best_alpha)) {
            best_obj = obj;
            best_alpha = alpha;
            first = false;
        }
    }
    return best_alpha;
}

}  // namespace dialogseg
