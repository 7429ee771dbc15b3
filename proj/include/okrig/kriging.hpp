#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "okrig/types.hpp"

namespace okrig {

/// One test individual's kriging system: the training-block similarity
/// slice, the test-vs-training similarity vector, and (for universal
/// kriging) training covariates plus the test individual's covariates.
struct KrigingSystem {
    MatrixXd sigma_train;  // n_train x n_train, SPD after nugget
    VectorXd rho;          // n_train
    MatrixXd z_train;      // n_train x p; 0 columns selects simple kriging
    VectorXd z_test;       // p
};

/// Kriging weights. Simple kriging solves Sigma w = rho; universal
/// kriging solves w = Sigma^-1 (rho + Z m) with
/// m = (Z' Sigma^-1 Z)^-1 (z - Z' Sigma^-1 rho), which enforces the
/// unbiasedness constraint Z' w = z.
VectorXd krige_weights(const KrigingSystem& system);

enum class CovariateMode {
    Simple,     // no covariates (pure covariance weighting)
    Intercept,  // intercept column, plus cohort covariates when present
};

/// Shared SPD factorization of one fold's training block. On failure the
/// solve is retried once with diagonal jitter 1e-8 * mean(diag); a second
/// failure raises SingularSigma with the smallest pivot.
class FoldSolver {
public:
    explicit FoldSolver(MatrixXd sigma_train);

    VectorXd solve(const VectorXd& rhs) const { return llt_.solve(rhs); }
    MatrixXd solve(const MatrixXd& rhs) const { return llt_.solve(rhs); }
    int size() const { return static_cast<int>(llt_.rows()); }

private:
    Eigen::LLT<MatrixXd> llt_;
};

/// Out-of-sample predictions for the test indices: each prediction is
/// w' Y_train with weights from the kriging system built on sigma_full.
/// Test phenotypes are never read; the training factorization is shared
/// across all test individuals in the fold.
VectorXd predict_fold(const SimilarityMatrix& sigma_full, const Cohort& cohort,
                      const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                      CovariateMode mode = CovariateMode::Intercept);

}  // namespace okrig
