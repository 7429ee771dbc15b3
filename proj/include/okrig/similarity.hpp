#pragma once

#include <utility>
#include <vector>

#include "okrig/types.hpp"

namespace okrig {

/// Weighted combination of prebuilt component matrices; the remainder
/// 1 - sum(theta) goes on the identity (nugget).
struct CompositeSpec {
    std::vector<std::pair<const SimilarityMatrix*, double>> components;
};

struct GrmOptions {
    // Markers with allele frequency outside (maf_min, 1 - maf_min) are
    // excluded, as are markers with undefined frequency.
    double maf_min = 0.001;
    int threads = 1;
};

struct GrmResult {
    SimilarityMatrix matrix;
    MatrixXd pair_counts;     // markers non-missing in both members of each pair
    int markers_used = 0;
    int markers_excluded = 0;
    int all_missing_pairs = 0;  // pairs with no shared marker; entry set to 0
};

/// Genetic relationship matrix: entry (i,j) averages
/// (x_il - 2 p_l)(x_jl - 2 p_l) / (2 p_l (1 - p_l)) over the markers
/// observed in both samples.
GrmResult build_grm(const OmicDataset& data, const GrmOptions& opts = {});

/// Similarity for continuous omic data: Pearson correlation of two
/// samples' profiles across markers, each profile centered by its own
/// mean. Columns are deliberately left unscaled, so high-variance
/// markers contribute more. Diagonal is pinned to exactly 1.
SimilarityMatrix build_correlation_similarity(const OmicDataset& data, int threads = 1);

/// Sigma = sum_s theta_s S_s + (1 - sum theta) I.
SimilarityMatrix compose(const CompositeSpec& spec);
SimilarityMatrix compose(const std::vector<SimilarityMatrix>& components,
                         const WeightConfig& weights);

}  // namespace okrig
