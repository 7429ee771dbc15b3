#pragma once

#include <optional>

#include "okrig/evaluation.hpp"
#include "okrig/types.hpp"

namespace okrig {

struct AssociationResult {
    std::string marker_id;
    int column = 0;  // column in the source dataset
    double beta = 0.0;
    double se = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

/// Per-marker simple linear regression of the phenotype on the marker
/// value over the given rows; two-sided p from the t distribution with
/// n-2 degrees of freedom. Zero-variance markers are skipped.
std::vector<AssociationResult> univariate_scan(const OmicDataset& data,
                                               const Cohort& cohort,
                                               const std::vector<int>& rows,
                                               int threads = 1, bool warn = true);

struct PcaResult {
    MatrixXd components;   // n x n_pcs, unit-norm columns
    VectorXd eigenvalues;  // descending, one per component
    bool degenerate_spectrum = false;
};

/// Top eigenvectors of the GRM by descending eigenvalue. Sign convention:
/// the largest-magnitude entry of each vector is positive. The degenerate
/// flag is set when eigenvalues at or around the cut are equal, making
/// the selected subspace arbitrary.
PcaResult principal_components(const SimilarityMatrix& grm, int n_pcs);

enum class ScoreMode { Marginal, Joint };

/// Test-set predictions from selected markers.
/// Joint: OLS of Y on [intercept, PCs, marker values] in the training
/// rows, then the fitted linear combination on the test rows.
/// Marginal: sum over markers of value * univariate training beta (the
/// classic polygenic score).
VectorXd polygenic_score(const OmicDataset& data, const Cohort& cohort,
                         const std::vector<int>& train_rows,
                         const std::vector<int>& test_rows,
                         const std::vector<int>& marker_cols, const MatrixXd& pcs,
                         ScoreMode mode);

/// Markers ordered by ascending p-value (marker id breaks ties). Either
/// the top k, or all below the Bonferroni threshold alpha / n_markers.
std::vector<int> topk_selection(const std::vector<AssociationResult>& scan,
                                std::optional<int> top_k, std::optional<double> alpha,
                                int n_markers);

struct PolyscoreConfig {
    ScoreMode mode = ScoreMode::Marginal;
    std::optional<int> top_k;
    std::optional<double> bonferroni_alpha;
    int n_pcs = 0;
    const SimilarityMatrix* pc_grm = nullptr;  // required when n_pcs > 0
};

/// Fold-wise polygenic-score cross-validation: selection and fitting
/// happen inside each training fold; principal components are computed
/// once on the full-cohort GRM.
EvaluationReport polyscore_cross_validate(const OmicDataset& data, const Cohort& cohort,
                                          const PolyscoreConfig& config, int k,
                                          int n_repeats, std::uint64_t master_seed,
                                          Metric metric, int threads = 1);

}  // namespace okrig
