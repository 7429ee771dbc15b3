#pragma once

#include <cstdint>

#include "okrig/similarity.hpp"
#include "okrig/types.hpp"

namespace okrig {

/// Synthetic poly-omic cohort under an additive random-effects model:
/// Y = G + T + O + eps, each component a standardized-marker-matrix
/// times effect sizes drawn with variance theta_s / n_markers_s, so the
/// component contributes variance theta_s; eps has variance 1 - sum(theta).
struct SimConfig {
    int n_samples = 0;
    int m_genetic = 0;      // 0 disables the component
    int l_expression = 0;
    int l_other = 0;
    WeightConfig theta;     // entries for the active components, order G, T, O
    std::uint64_t seed = 0;
    TraitKind trait_kind = TraitKind::Quantitative;
    double case_fraction = 0.5;  // Binary: liability threshold quantile
};

struct SimTruth {
    std::vector<std::string> component_names;
    std::vector<VectorXd> betas;       // per component
    std::vector<VectorXd> components;  // per-sample component values
    VectorXd noise;
    VectorXd liability;  // continuous Y before any thresholding
    double threshold = 0.0;  // Binary only
};

struct SimResult {
    std::vector<OmicDataset> datasets;  // one per active component, order G, T, O
    std::vector<std::string> names;
    Cohort cohort;
    SimTruth truth;
};

SimResult simulate_cohort(const SimConfig& config);

/// The model covariance implied by the additive model for the given
/// datasets: sum_s theta_s * (standardized cross-product matrix of
/// dataset s) + (1 - sum theta) I. Datasets must be complete. Dosage
/// matrices standardize by (x - 2p)/sqrt(2p(1-p)); continuous matrices by
/// column mean and population standard deviation.
SimilarityMatrix theoretical_covariance(const std::vector<OmicDataset>& datasets,
                                        const WeightConfig& theta);

}  // namespace okrig
