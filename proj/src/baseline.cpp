#include "okrig/baseline.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iostream>
#include <limits>

#include "okrig/parallel.hpp"
#include "okrig/rng.hpp"

namespace okrig {

namespace {

struct SimpleFit {
    double beta = 0.0, se = 0.0, sxx = 0.0;
    int obs = 0;
    bool ok = false;
};

// Least squares of y on one marker column over the given rows, skipping
// missing entries.
SimpleFit fit_marker(const OmicDataset& data, const VectorXd& phenotype,
                     const std::vector<int>& rows, int col) {
    SimpleFit fit;
    double sx = 0.0, sy = 0.0;
    for (int row : rows) {
        if (data.missing(row, col)) continue;
        sx += data.values(row, col);
        sy += phenotype(row);
        ++fit.obs;
    }
    if (fit.obs < 3) return fit;
    double xm = sx / fit.obs, ym = sy / fit.obs;
    double sxy = 0.0;
    for (int row : rows) {
        if (data.missing(row, col)) continue;
        double dx = data.values(row, col) - xm;
        fit.sxx += dx * dx;
        sxy += dx * (phenotype(row) - ym);
    }
    if (fit.sxx <= 0.0) return fit;
    fit.beta = sxy / fit.sxx;
    double alpha = ym - fit.beta * xm;
    double sse = 0.0;
    for (int row : rows) {
        if (data.missing(row, col)) continue;
        double resid = phenotype(row) - alpha - fit.beta * data.values(row, col);
        sse += resid * resid;
    }
    fit.se = std::sqrt(sse / (fit.obs - 2) / fit.sxx);
    fit.ok = true;
    return fit;
}

}  // namespace

std::vector<AssociationResult> univariate_scan(const OmicDataset& data,
                                               const Cohort& cohort,
                                               const std::vector<int>& rows,
                                               int threads, bool warn) {
    if (!(*data.registry == *cohort.registry))
        throw RegistryMismatch("dataset and cohort cover different samples");
    if (rows.size() < 3) throw ValidationError("univariate scan needs at least 3 samples");
    const int m = data.n_markers();

    std::vector<AssociationResult> results(static_cast<std::size_t>(m));
    std::vector<char> keep(static_cast<std::size_t>(m), 0);
    std::atomic<int> skipped{0};

    parallel_for(m, threads, [&](int col) {
        SimpleFit fit = fit_marker(data, cohort.phenotype, rows, col);
        if (!fit.ok) {
            skipped.fetch_add(1);
            return;
        }
        AssociationResult res;
        res.marker_id = data.marker_ids[static_cast<std::size_t>(col)];
        res.column = col;
        res.beta = fit.beta;
        res.se = fit.se;
        if (fit.se > 0.0) {
            res.t_stat = fit.beta / fit.se;
            boost::math::students_t dist(fit.obs - 2);
            res.p_value =
                2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t_stat)));
        } else {
            // exact fit: p numerically 0
            res.t_stat = fit.beta >= 0 ? std::numeric_limits<double>::infinity()
                                       : -std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
        }
        results[static_cast<std::size_t>(col)] = std::move(res);
        keep[static_cast<std::size_t>(col)] = 1;
    });

    if (warn && skipped.load() > 0)
        std::cerr << "warning: skipped " << skipped.load()
                  << " marker(s) with zero variance or too few observations\n";

    std::vector<AssociationResult> out;
    out.reserve(results.size());
    for (std::size_t c = 0; c < results.size(); ++c)
        if (keep[c]) out.push_back(std::move(results[c]));
    return out;
}

PcaResult principal_components(const SimilarityMatrix& grm, int n_pcs) {
    grm.validate();
    const int n = grm.size();
    if (n_pcs < 1 || n_pcs >= n)
        throw ValidationError("n_pcs must be in [1, n); got " + std::to_string(n_pcs));

    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(grm.values);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eigendecomposition of the GRM did not converge");

    // SelfAdjointEigenSolver sorts ascending; take from the top.
    PcaResult out;
    out.components.resize(n, n_pcs);
    out.eigenvalues.resize(n_pcs);
    for (int c = 0; c < n_pcs; ++c) {
        int src = n - 1 - c;
        VectorXd v = solver.eigenvectors().col(src);
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
        if (v(arg) < 0.0) v = -v;
        out.components.col(c) = v;
        out.eigenvalues(c) = solver.eigenvalues()(src);
    }

    double scale = std::max(
        {std::abs(solver.eigenvalues()(0)), std::abs(solver.eigenvalues()(n - 1)), 1.0});
    for (int c = 0; c < n_pcs; ++c) {
        double here = solver.eigenvalues()(n - 1 - c);
        double next = solver.eigenvalues()(n - 2 - c);
        if (std::abs(here - next) <= 1e-8 * scale) {
            out.degenerate_spectrum = true;
            break;
        }
    }
    if (out.degenerate_spectrum)
        std::cerr << "warning: degenerate GRM spectrum; principal components are not "
                     "uniquely determined\n";
    return out;
}

namespace {

MatrixXd marker_block(const OmicDataset& data, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    MatrixXd x(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            x(static_cast<int>(r), static_cast<int>(c)) = data.values(rows[r], cols[c]);
    return x;
}

}  // namespace

VectorXd polygenic_score(const OmicDataset& data, const Cohort& cohort,
                         const std::vector<int>& train_rows,
                         const std::vector<int>& test_rows,
                         const std::vector<int>& marker_cols, const MatrixXd& pcs,
                         ScoreMode mode) {
    const int nt = static_cast<int>(train_rows.size());
    const int mt = static_cast<int>(test_rows.size());
    const int n_markers = static_cast<int>(marker_cols.size());
    const int n_pcs = static_cast<int>(pcs.cols());

    if (mode == ScoreMode::Marginal) {
        if (n_markers == 0) throw EmptyMarkerSet("marginal score needs markers");
        VectorXd scores = VectorXd::Zero(mt);
        for (int col : marker_cols) {
            SimpleFit fit = fit_marker(data, cohort.phenotype, train_rows, col);
            if (!fit.ok) continue;
            for (int r = 0; r < mt; ++r) {
                int row = test_rows[static_cast<std::size_t>(r)];
                if (!data.missing(row, col)) scores(r) += data.values(row, col) * fit.beta;
            }
        }
        return scores;
    }

    // Joint: OLS of Y on [intercept, PCs, markers] in the training rows.
    VectorXd y_train(nt);
    for (int r = 0; r < nt; ++r)
        y_train(r) = cohort.phenotype(train_rows[static_cast<std::size_t>(r)]);

    const int p = 1 + n_pcs + n_markers;
    if (nt <= p)
        throw ValidationError("joint score needs n_train > covariate count (" +
                              std::to_string(nt) + " <= " + std::to_string(p) + ")");
    MatrixXd design(nt, p);
    design.col(0).setOnes();
    for (int r = 0; r < nt; ++r)
        for (int c = 0; c < n_pcs; ++c)
            design(r, 1 + c) = pcs(train_rows[static_cast<std::size_t>(r)], c);
    if (n_markers > 0) design.rightCols(n_markers) = marker_block(data, train_rows, marker_cols);

    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    if (qr.rank() < p)
        throw RankDeficientDesign("joint design matrix is rank deficient (rank " +
                                  std::to_string(qr.rank()) + " of " + std::to_string(p) +
                                  ")");
    VectorXd beta = qr.solve(y_train);

    MatrixXd test_design(mt, p);
    test_design.col(0).setOnes();
    for (int r = 0; r < mt; ++r)
        for (int c = 0; c < n_pcs; ++c)
            test_design(r, 1 + c) = pcs(test_rows[static_cast<std::size_t>(r)], c);
    if (n_markers > 0) test_design.rightCols(n_markers) = marker_block(data, test_rows, marker_cols);
    return test_design * beta;
}

std::vector<int> topk_selection(const std::vector<AssociationResult>& scan,
                                std::optional<int> top_k, std::optional<double> alpha,
                                int n_markers) {
    if (scan.empty()) throw ValidationError("selection from an empty scan");
    if (!top_k && !alpha)
        throw ValidationError("selection needs either top-k or a Bonferroni alpha");

    std::vector<const AssociationResult*> order;
    order.reserve(scan.size());
    for (const auto& a : scan) order.push_back(&a);
    std::sort(order.begin(), order.end(),
              [](const AssociationResult* a, const AssociationResult* b) {
                  if (a->p_value != b->p_value) return a->p_value < b->p_value;
                  return a->marker_id < b->marker_id;
              });

    std::vector<int> selected;
    if (top_k) {
        int k = std::min<int>(*top_k, static_cast<int>(order.size()));
        for (int i = 0; i < k; ++i)
            selected.push_back(order[static_cast<std::size_t>(i)]->column);
    } else {
        double threshold = *alpha / static_cast<double>(n_markers);
        for (const auto* a : order)
            if (a->p_value < threshold) selected.push_back(a->column);
    }
    return selected;
}

EvaluationReport polyscore_cross_validate(const OmicDataset& data, const Cohort& cohort,
                                          const PolyscoreConfig& config, int k,
                                          int n_repeats, std::uint64_t master_seed,
                                          Metric metric, int threads) {
    if (n_repeats < 1) throw ValidationError("n_repeats must be >= 1");
    if (config.n_pcs > 0 && config.pc_grm == nullptr)
        throw ValidationError("principal components requested but no GRM given");

    // PCs come from the full-cohort GRM once, not per fold.
    MatrixXd pcs(cohort.size(), 0);
    if (config.n_pcs > 0)
        pcs = principal_components(*config.pc_grm, config.n_pcs).components;

    const int n = cohort.size();
    EvaluationReport report;
    report.metric = metric;
    report.seed = master_seed;
    report.k_folds = k;
    report.n_repeats = n_repeats;
    report.per_repeat_values.assign(static_cast<std::size_t>(n_repeats),
                                    std::numeric_limits<double>::quiet_NaN());

    parallel_for(n_repeats, threads, [&](int r) {
        std::uint64_t seed = mix_seed(master_seed, static_cast<std::uint64_t>(r));
        FoldPlan plan = partition(n, k, seed, r);
        VectorXd preds(n);
        for (int fold = 0; fold < k; ++fold) {
            auto train = plan.train_indices(fold);
            auto test = plan.test_indices(fold);
            auto scan = univariate_scan(data, cohort, train, 1, false);
            auto cols =
                topk_selection(scan, config.top_k, config.bonferroni_alpha, data.n_markers());
            VectorXd fold_preds;
            if (cols.empty() && config.mode == ScoreMode::Marginal) {
                fold_preds = VectorXd::Zero(static_cast<int>(test.size()));
            } else {
                fold_preds = polygenic_score(data, cohort, train, test, cols, pcs, config.mode);
            }
            for (std::size_t t = 0; t < test.size(); ++t)
                preds(test[t]) = fold_preds(static_cast<int>(t));
        }
        try {
            report.per_repeat_values[static_cast<std::size_t>(r)] =
                compute_metric(metric, preds, cohort.phenotype);
        } catch (const MetricUndefined&) {
            // leave NaN: metric undefined for this repeat
        }
    });

    report.fold_assignments = partition(n, k, mix_seed(master_seed, 0)).assignments;
    finalize_summary(report);
    return report;
}

}  // namespace okrig
