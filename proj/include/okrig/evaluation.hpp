#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "okrig/kriging.hpp"
#include "okrig/types.hpp"

namespace okrig {

enum class Metric { R2Signed, R2Plain, Auc };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);
Metric default_metric(TraitKind kind);  // signed R2 for quantitative, AUC for binary

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // fold label per sample, in [0, k)
    std::uint64_t seed = 0;
    int repeat_index = 0;

    std::vector<int> train_indices(int fold) const;
    std::vector<int> test_indices(int fold) const;
};

/// Uniform random fold assignment: seeded shuffle of the sample indices,
/// then round-robin slicing. Fold sizes differ by at most one.
FoldPlan partition(int n, int k, std::uint64_t seed, int repeat_index = 0);

/// Squared Pearson correlation between prediction and truth; signed mode
/// returns sign(r) * r^2. Throws ConstantVector when undefined.
double r_squared(const VectorXd& pred, const VectorXd& truth, bool signed_mode);

/// Mann-Whitney AUC: fraction of (case, control) pairs where the case
/// outscores the control, ties counted 1/2. Throws OneClassOnly.
double auc(const VectorXd& pred, const VectorXd& labels);

double compute_metric(Metric metric, const VectorXd& pred, const VectorXd& truth);

/// Linear interpolation between order statistics; p in [0, 1].
double percentile(std::vector<double> values, double p);

/// One repeat of k-fold cross-validation on a prebuilt composite:
/// out-of-sample predictions are concatenated across folds and scored as
/// one vector. Returns NaN when the metric is undefined for this repeat;
/// numerical failures propagate.
double cross_validate(const SimilarityMatrix& sigma_full, const Cohort& cohort, int k,
                      std::uint64_t seed, Metric metric,
                      CovariateMode mode = CovariateMode::Intercept,
                      VectorXd* out_predictions = nullptr);

struct GridPointSummary {
    WeightConfig weights;
    double mean = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int degenerate_repeats = 0;
};

struct EvaluationReport {
    Metric metric = Metric::R2Signed;
    std::vector<double> per_repeat_values;  // NaN where the metric was undefined
    double mean = 0.0;                      // over defined repeats; NaN if none
    double ci_lo = 0.0;                     // 0.025 percentile
    double ci_hi = 0.0;                     // 0.975 percentile
    std::uint64_t seed = 0;
    int k_folds = 0;
    int n_repeats = 0;
    WeightConfig weights;
    std::vector<int> fold_assignments;      // first repeat's plan
    int degenerate_repeats = 0;
    std::vector<GridPointSummary> grid;     // filled by grid search only
};

/// Fills mean, percentile CI and the degenerate-repeat count from
/// report.per_repeat_values (NaN entries count as degenerate).
void finalize_summary(EvaluationReport& report);

/// Repeats cross_validate n_repeats times (repeat r seeded by
/// mix_seed(master_seed, r)) and summarizes mean plus the 0.025/0.975
/// percentile interval of the per-repeat metric values.
EvaluationReport repeat_and_summarize(const SimilarityMatrix& sigma_full,
                                      const Cohort& cohort, const WeightConfig& weights,
                                      int k, int n_repeats, std::uint64_t master_seed,
                                      Metric metric,
                                      CovariateMode mode = CovariateMode::Intercept,
                                      int threads = 1);

}  // namespace okrig
