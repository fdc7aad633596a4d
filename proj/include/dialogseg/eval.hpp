#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "dialogseg/corpus.hpp"
#include "dialogseg/tiling.hpp"

namespace dialogseg {

using BoundarySet = std::set<std::size_t>;

struct EvalReport {
    std::size_t true_positives = 0;
    std::size_t predicted_count = 0;
    std::size_t gold_count = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Micro-averaged boundary precision/recall/F over aligned sessions.
/// tolerance 0 requires exact gap matches; tolerance t matches a prediction
/// to an unused gold boundary within t gaps. Throws SessionCountMismatch.
EvalReport boundary_prf(std::span<const BoundarySet> predicted,
                        std::span<const BoundarySet> gold, std::size_t tolerance = 0);

/// Gold boundaries divided by total gaps; the prior for random_baseline.
double gold_prior(std::span<const Session> sessions);

/// Marks each gap a boundary independently with probability prior.
/// Reproducible for a fixed seed.
std::vector<BoundarySet> random_baseline(std::span<const Session> sessions, double prior,
                                         std::uint64_t seed);

struct TuneOptions {
    std::vector<double> alphas;  // empty = default grid -1.0..2.0 step 0.1

    std::vector<double> grid() const;
};

/// Grid search for the alpha whose total predicted boundary count is
/// closest to the gold count over the validation sessions. Ties break
/// toward the larger alpha. Throws NoGoldBoundaries when the validation
/// set has no gaps to segment.
double tune_alpha(std::span<const Session> sessions, const ScoreFn& scorer,
                  const SegmenterConfig& config_base, const TuneOptions& options = {});

}  // namespace dialogseg
