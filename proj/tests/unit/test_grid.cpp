#include <doctest.h>

#include <cmath>

#include "okrig/grid.hpp"
#include "okrig/rng.hpp"

using namespace okrig;

namespace {

RegistryPtr make_reg(int n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
    return std::make_shared<const SampleRegistry>(std::move(ids));
}

std::vector<double> point(const WeightConfig& w) {
    std::vector<double> out;
    for (const auto& [name, theta] : w.component_weights) out.push_back(theta);
    return out;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("single component, step 0.1: the eleven listed points") {
    GridSpec spec{1, 0.1};
    auto grid = enumerate_grid(spec, {"G"});
    REQUIRE(grid.size() == 11);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i].component_weights[0].second ==
              doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-12));
}

TEST_CASE("two components, step 0.5: six points in lexicographic order") {
    GridSpec spec{2, 0.5};
    auto grid = enumerate_grid(spec, {"a", "b"});
    REQUIRE(grid.size() == 6);
    CHECK(point(grid[0]) == std::vector<double>{0.0, 0.0});
    CHECK(point(grid[1]) == std::vector<double>{0.0, 0.5});
    CHECK(point(grid[2]) == std::vector<double>{0.0, 1.0});
    CHECK(point(grid[3]) == std::vector<double>{0.5, 0.0});
    CHECK(point(grid[4]) == std::vector<double>{0.5, 0.5});
    CHECK(point(grid[5]) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("two components, step 0.1: triangular count and constraint") {
    GridSpec spec{2, 0.1};
    auto grid = enumerate_grid(spec, {"a", "b"});
    CHECK(grid.size() == 66);
    for (const auto& w : grid) CHECK(w.sum() <= 1.0 + 1e-12);
}

TEST_CASE("three components have the tetrahedral count") {
    GridSpec spec{3, 0.25};
    auto grid = enumerate_grid(spec, {"a", "b", "c"});
    // levels=4: sum over a+b+c <= 4 of 1 = C(7,3) = 35
    CHECK(grid.size() == 35);
}

TEST_CASE("non-unit-fraction step is rejected") {
    CHECK_THROWS_AS(enumerate_grid(GridSpec{1, 0.3}, {"a"}), StepNotUnitFraction);
    CHECK_THROWS_AS(enumerate_grid(GridSpec{1, 0.0}, {"a"}), StepNotUnitFraction);
    CHECK_THROWS_AS(enumerate_grid(GridSpec{1, 1.5}, {"a"}), StepNotUnitFraction);
    CHECK_NOTHROW(enumerate_grid(GridSpec{1, 0.125}, {"a"}));
}

TEST_CASE("identity component makes every point equal: tie-break picks theta 0") {
    const int n = 20;
    auto registry = make_reg(n);
    SimilarityMatrix ident = identity_similarity(registry);
    Cohort cohort;
    cohort.registry = registry;
    cohort.phenotype.resize(n);
    Rng rng(3);
    for (int i = 0; i < n; ++i) cohort.phenotype(i) = rng.normal();

    GridSearchResult result = grid_search({ident}, {"I"}, cohort, 5, 4, 4, 7,
                                          GridSpec{1, 0.5}, Metric::R2Signed);
    // composite = identity at every theta: all means bit-identical
    CHECK(result.best.component_weights[0].second == 0.0);
    CHECK(result.surface.size() == 3);
    CHECK(result.surface[0].mean == result.surface[1].mean);
    CHECK(result.surface[1].mean == result.surface[2].mean);
}

TEST_CASE("surface has one entry per point and best mean is the max") {
    const int n = 24;
    Rng rng(5);
    auto registry = make_reg(n);
    MatrixXd a(n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j) a(i, j) = rng.normal();
    SimilarityMatrix sim;
    sim.registry = registry;
    sim.values = a * a.transpose() / (2.0 * n);

    Cohort cohort;
    cohort.registry = registry;
    cohort.phenotype.resize(n);
    for (int i = 0; i < n; ++i) cohort.phenotype(i) = rng.normal();

    GridSearchResult result = grid_search({sim}, {"G"}, cohort, 6, 3, 5, 11,
                                          GridSpec{1, 0.25}, Metric::R2Signed);
    CHECK(result.surface.size() == 5);
    double best_mean = -2.0;
    for (const auto& p : result.surface)
        if (!std::isnan(p.mean)) best_mean = std::max(best_mean, p.mean);
    double chosen = -2.0;
    for (const auto& p : result.surface)
        if (point(p.weights) == point(result.best)) chosen = p.mean;
    CHECK(chosen == best_mean);
    CHECK(result.final_report.n_repeats == 5);
    CHECK(result.final_report.grid.size() == 5);
}

TEST_CASE("a grid point scores identically alone and inside the search") {
    const int n = 18;
    Rng rng(7);
    auto registry = make_reg(n);
    MatrixXd a(n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j) a(i, j) = rng.normal();
    SimilarityMatrix sim;
    sim.registry = registry;
    sim.values = a * a.transpose() / (2.0 * n);
    Cohort cohort;
    cohort.registry = registry;
    cohort.phenotype.resize(n);
    for (int i = 0; i < n; ++i) cohort.phenotype(i) = rng.normal();

    const std::uint64_t master = 99;
    const int repeats = 4, k = 6;
    GridSearchResult result = grid_search({sim}, {"G"}, cohort, k, repeats, 2, master,
                                          GridSpec{1, 0.5}, Metric::R2Signed);

    WeightConfig half;
    half.component_weights = {{"G", 0.5}};
    SimilarityMatrix sigma = compose({sim}, half);
    EvaluationReport alone =
        repeat_and_summarize(sigma, cohort, half, k, repeats, master, Metric::R2Signed);
    bool found = false;
    for (const auto& p : result.surface)
        if (p.weights.component_weights[0].second == 0.5) {
            CHECK(p.mean == alone.mean);  // bit-identical
            found = true;
        }
    CHECK(found);
}

}  // TEST_SUITE
