#include "okrig/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "okrig/parallel.hpp"
#include "okrig/rng.hpp"

namespace okrig {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::R2Signed: return "signed_r2";
        case Metric::R2Plain: return "r2";
        case Metric::Auc: return "auc";
    }
    return "unknown";
}

Metric metric_from_name(const std::string& name) {
    if (name == "signed_r2" || name == "signed-r2") return Metric::R2Signed;
    if (name == "r2") return Metric::R2Plain;
    if (name == "auc") return Metric::Auc;
    throw ValidationError("unknown metric '" + name + "'");
}

Metric default_metric(TraitKind kind) {
    return kind == TraitKind::Binary ? Metric::Auc : Metric::R2Signed;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> FoldPlan::test_indices(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(static_cast<int>(i));
    return out;
}

FoldPlan partition(int n, int k, std::uint64_t seed, int repeat_index) {
    if (k < 2 || k > n)
        throw BadFoldCount("fold count " + std::to_string(k) + " must be in [2, " +
                           std::to_string(n) + "]");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.repeat_index = repeat_index;
    plan.assignments.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        plan.assignments[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % k;
    return plan;
}

namespace {

struct Moments {
    double mean_x, mean_y, sxx, syy, sxy;
};

Moments central_moments(const VectorXd& x, const VectorXd& y) {
    Moments m{};
    m.mean_x = x.mean();
    m.mean_y = y.mean();
    for (int i = 0; i < x.size(); ++i) {
        double dx = x(i) - m.mean_x;
        double dy = y(i) - m.mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

}  // namespace

double r_squared(const VectorXd& pred, const VectorXd& truth, bool signed_mode) {
    if (pred.size() != truth.size())
        throw ValidationError("prediction and truth lengths differ");
    if (pred.size() < 3)
        throw ConstantVector("r_squared needs at least 3 values");
    Moments m = central_moments(pred, truth);
    if (m.sxx <= 0.0) throw ConstantVector("predictions are constant");
    if (m.syy <= 0.0) throw ConstantVector("true values are constant");
    double r = m.sxy / std::sqrt(m.sxx * m.syy);
    double r2 = r * r;
    if (!signed_mode) return r2;
    return r >= 0.0 ? r2 : -r2;
}

double auc(const VectorXd& pred, const VectorXd& labels) {
    if (pred.size() != labels.size())
        throw ValidationError("prediction and label lengths differ");
    const int n = static_cast<int>(pred.size());
    std::int64_t n_case = 0;
    for (int i = 0; i < n; ++i) {
        if (labels(i) != 0.0 && labels(i) != 1.0)
            throw ValidationError("labels must be 0 or 1");
        if (labels(i) == 1.0) ++n_case;
    }
    std::int64_t n_ctrl = n - n_case;
    if (n_case == 0 || n_ctrl == 0)
        throw OneClassOnly("AUC needs at least one case and one control");

    // Rank-sum form with midranks for ties; equals exhaustive pair
    // counting with ties worth 1/2.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pred(a) < pred(b); });
    double case_rank_sum = 0.0;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j < n && pred(order[static_cast<std::size_t>(j)]) ==
                            pred(order[static_cast<std::size_t>(i)]))
            ++j;
        double midrank = 0.5 * (i + j - 1) + 1.0;  // ranks are 1-based
        for (int t = i; t < j; ++t)
            if (labels(order[static_cast<std::size_t>(t)]) == 1.0) case_rank_sum += midrank;
        i = j;
    }
    double wins = case_rank_sum - 0.5 * static_cast<double>(n_case) *
                                      static_cast<double>(n_case + 1);
    return wins / (static_cast<double>(n_case) * static_cast<double>(n_ctrl));
}

double compute_metric(Metric metric, const VectorXd& pred, const VectorXd& truth) {
    switch (metric) {
        case Metric::R2Signed: return r_squared(pred, truth, true);
        case Metric::R2Plain: return r_squared(pred, truth, false);
        case Metric::Auc: return auc(pred, truth);
    }
    throw ValidationError("unknown metric");
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of empty list");
    std::sort(values.begin(), values.end());
    double pos = p * (static_cast<double>(values.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= values.size()) return values.back();
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double cross_validate(const SimilarityMatrix& sigma_full, const Cohort& cohort, int k,
                      std::uint64_t seed, Metric metric, CovariateMode mode,
                      VectorXd* out_predictions) {
    const int n = cohort.size();
    if (sigma_full.size() != n)
        throw ValidationError("similarity matrix and cohort sizes differ");
    FoldPlan plan = partition(n, k, seed);

    VectorXd preds(n);
    for (int fold = 0; fold < k; ++fold) {
        auto train = plan.train_indices(fold);
        auto test = plan.test_indices(fold);
        VectorXd fold_preds = predict_fold(sigma_full, cohort, train, test, mode);
        for (std::size_t t = 0; t < test.size(); ++t)
            preds(test[t]) = fold_preds(static_cast<int>(t));
    }
    if (out_predictions) *out_predictions = preds;
    try {
        return compute_metric(metric, preds, cohort.phenotype);
    } catch (const MetricUndefined&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

void finalize_summary(EvaluationReport& report) {
    std::vector<double> defined;
    defined.reserve(report.per_repeat_values.size());
    for (double v : report.per_repeat_values)
        if (!std::isnan(v)) defined.push_back(v);
    report.degenerate_repeats =
        static_cast<int>(report.per_repeat_values.size() - defined.size());
    if (defined.empty()) {
        report.mean = report.ci_lo = report.ci_hi = std::numeric_limits<double>::quiet_NaN();
    } else {
        report.mean = std::accumulate(defined.begin(), defined.end(), 0.0) /
                      static_cast<double>(defined.size());
        report.ci_lo = percentile(defined, 0.025);
        report.ci_hi = percentile(defined, 0.975);
    }
}

EvaluationReport repeat_and_summarize(const SimilarityMatrix& sigma_full,
                                      const Cohort& cohort, const WeightConfig& weights,
                                      int k, int n_repeats, std::uint64_t master_seed,
                                      Metric metric, CovariateMode mode, int threads) {
    if (n_repeats < 1) throw ValidationError("n_repeats must be >= 1");

    EvaluationReport report;
    report.metric = metric;
    report.seed = master_seed;
    report.k_folds = k;
    report.n_repeats = n_repeats;
    report.weights = weights;
    report.per_repeat_values.assign(static_cast<std::size_t>(n_repeats),
                                    std::numeric_limits<double>::quiet_NaN());

    parallel_for(n_repeats, threads, [&](int r) {
        std::uint64_t seed = mix_seed(master_seed, static_cast<std::uint64_t>(r));
        report.per_repeat_values[static_cast<std::size_t>(r)] =
            cross_validate(sigma_full, cohort, k, seed, metric, mode);
    });

    report.fold_assignments = partition(cohort.size(), k, mix_seed(master_seed, 0)).assignments;
    finalize_summary(report);
    return report;
}

}  // namespace okrig
