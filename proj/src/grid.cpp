#include "okrig/grid.hpp"

#include <cmath>

namespace okrig {

namespace {

int grid_levels(double step) {
    if (!(step > 0.0 && step <= 1.0))
        throw StepNotUnitFraction("grid step must lie in (0, 1], got " + std::to_string(step));
    double inv = 1.0 / step;
    double rounded = std::round(inv);
    if (std::abs(inv - rounded) > 1e-9)
        throw StepNotUnitFraction("grid step " + std::to_string(step) +
                                  " is not a unit fraction");
    return static_cast<int>(rounded);
}

void enumerate_rec(int component, int remaining, int levels,
                   const std::vector<std::string>& names, std::vector<int>& current,
                   std::vector<WeightConfig>& out) {
    if (component == static_cast<int>(names.size())) {
        WeightConfig wc;
        for (std::size_t s = 0; s < names.size(); ++s)
            wc.component_weights.emplace_back(
                names[s], static_cast<double>(current[s]) / static_cast<double>(levels));
        out.push_back(std::move(wc));
        return;
    }
    for (int level = 0; level <= remaining; ++level) {
        current[static_cast<std::size_t>(component)] = level;
        enumerate_rec(component + 1, remaining - level, levels, names, current, out);
    }
}

}  // namespace

std::vector<WeightConfig> enumerate_grid(const GridSpec& spec,
                                         const std::vector<std::string>& names) {
    if (spec.n_components < 1) throw ValidationError("grid needs at least one component");
    if (static_cast<int>(names.size()) != spec.n_components)
        throw ValidationError("component name count does not match grid spec");
    int levels = grid_levels(spec.step);
    std::vector<WeightConfig> out;
    std::vector<int> current(names.size(), 0);
    enumerate_rec(0, levels, levels, names, current, out);
    return out;
}

namespace {

// mean comparison with NaN (all-degenerate point) treated as worst
bool strictly_better(double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a > b;
}

}  // namespace

GridSearchResult grid_search(const std::vector<SimilarityMatrix>& components,
                             const std::vector<std::string>& names, const Cohort& cohort,
                             int k, int search_repeats, int final_repeats,
                             std::uint64_t master_seed, const GridSpec& spec,
                             Metric metric, CovariateMode mode, int threads) {
    if (components.empty()) throw ValidationError("grid search needs components");
    auto grid = enumerate_grid(spec, names);

    GridSearchResult result;
    result.surface.reserve(grid.size());
    std::size_t best_idx = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        SimilarityMatrix sigma = compose(components, grid[g]);
        EvaluationReport rep = repeat_and_summarize(sigma, cohort, grid[g], k,
                                                    search_repeats, master_seed, metric,
                                                    mode, threads);
        GridPointSummary point;
        point.weights = grid[g];
        point.mean = rep.mean;
        point.ci_lo = rep.ci_lo;
        point.ci_hi = rep.ci_hi;
        point.degenerate_repeats = rep.degenerate_repeats;
        result.surface.push_back(std::move(point));

        const auto& best = result.surface[best_idx];
        const auto& cand = result.surface[g];
        if (strictly_better(cand.mean, best.mean) ||
            (cand.mean == best.mean && cand.weights.sum() < best.weights.sum())) {
            best_idx = g;
        }
        // equal mean and equal total weight: keep the earlier
        // (lexicographically smaller) point
    }

    result.best = result.surface[best_idx].weights;
    SimilarityMatrix sigma_best = compose(components, result.best);
    result.final_report = repeat_and_summarize(sigma_best, cohort, result.best, k,
                                               final_repeats, master_seed, metric, mode,
                                               threads);
    result.final_report.grid = result.surface;
    return result;
}

}  // namespace okrig
