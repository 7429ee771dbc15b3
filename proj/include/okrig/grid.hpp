#pragma once

#include "okrig/evaluation.hpp"
#include "okrig/similarity.hpp"

namespace okrig {

struct GridSpec {
    int n_components = 1;
    double step = 0.1;  // must be a unit fraction (1/step integral)
};

/// All lattice points with each weight in {0, step, ..., 1} and total
/// weight <= 1, in lexicographic order.
std::vector<WeightConfig> enumerate_grid(const GridSpec& spec,
                                         const std::vector<std::string>& names);

struct GridSearchResult {
    WeightConfig best;
    std::vector<GridPointSummary> surface;  // one entry per grid point
    EvaluationReport final_report;          // winning point at final_repeats
};

/// Evaluates every grid point with paired fold plans (the per-repeat
/// seeds depend only on master_seed, so every point sees the same
/// partitions) and re-runs the winner at final_repeats. Ties go to the
/// point with the smallest total weight, then lexicographic order.
GridSearchResult grid_search(const std::vector<SimilarityMatrix>& components,
                             const std::vector<std::string>& names, const Cohort& cohort,
                             int k, int search_repeats, int final_repeats,
                             std::uint64_t master_seed, const GridSpec& spec,
                             Metric metric, CovariateMode mode = CovariateMode::Intercept,
                             int threads = 1);

}  // namespace okrig
