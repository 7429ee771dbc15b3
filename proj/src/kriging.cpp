#include "okrig/kriging.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace okrig {

namespace {

std::string singular_message(const MatrixXd& sigma) {
    Eigen::LDLT<MatrixXd> ldlt(sigma);
    double min_pivot = ldlt.vectorD().minCoeff();
    return "training similarity matrix is singular (smallest pivot " +
           std::to_string(min_pivot) + "); consider increasing the nugget weight";
}

MatrixXd covariate_design(const Cohort& cohort, const std::vector<int>& rows,
                          CovariateMode mode) {
    if (mode == CovariateMode::Simple) return MatrixXd(rows.size(), 0);
    int p = 1 + static_cast<int>(cohort.covariates.cols());
    MatrixXd z(rows.size(), p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        z(static_cast<int>(r), 0) = 1.0;
        for (int c = 0; c < cohort.covariates.cols(); ++c)
            z(static_cast<int>(r), c + 1) = cohort.covariates(rows[r], c);
    }
    return z;
}

}  // namespace

FoldSolver::FoldSolver(MatrixXd sigma_train) {
    llt_.compute(sigma_train);
    if (llt_.info() == Eigen::Success) return;
    double jitter = 1e-8 * sigma_train.diagonal().mean();
    sigma_train.diagonal().array() += jitter;
    llt_.compute(sigma_train);
    if (llt_.info() != Eigen::Success) {
        sigma_train.diagonal().array() -= jitter;
        throw SingularSigma(singular_message(sigma_train));
    }
}

VectorXd krige_weights(const KrigingSystem& system) {
    const int n = static_cast<int>(system.sigma_train.rows());
    if (system.sigma_train.cols() != n)
        throw ValidationError("sigma_train must be square");
    if (system.rho.size() != n)
        throw ValidationError("rho length does not match sigma_train");

    FoldSolver solver(system.sigma_train);
    VectorXd si_rho = solver.solve(system.rho);
    if (system.z_train.cols() == 0) return si_rho;

    const int p = static_cast<int>(system.z_train.cols());
    if (system.z_train.rows() != n)
        throw ValidationError("z_train row count does not match sigma_train");
    if (system.z_test.size() != p)
        throw ValidationError("z_test length does not match covariate count");

    MatrixXd si_z = solver.solve(system.z_train);           // Sigma^-1 Z
    MatrixXd gram = system.z_train.transpose() * si_z;      // Z' Sigma^-1 Z
    Eigen::FullPivLU<MatrixXd> lu(gram);
    if (lu.rank() < p)
        throw RankDeficientZ("covariate matrix is rank deficient (rank " +
                             std::to_string(lu.rank()) + " of " + std::to_string(p) + ")");
    VectorXd m = lu.solve(system.z_test - system.z_train.transpose() * si_rho);
    return si_rho + si_z * m;
}

VectorXd predict_fold(const SimilarityMatrix& sigma_full, const Cohort& cohort,
                      const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                      CovariateMode mode) {
    if (train_idx.empty() || test_idx.empty())
        throw ValidationError("train and test index sets must be non-empty");
    for (int t : test_idx)
        if (std::find(train_idx.begin(), train_idx.end(), t) != train_idx.end())
            throw ValidationError("train and test index sets overlap");

    const int nt = static_cast<int>(train_idx.size());
    const int mt = static_cast<int>(test_idx.size());

    MatrixXd sigma_tt(nt, nt);
    for (int a = 0; a < nt; ++a)
        for (int b = 0; b < nt; ++b)
            sigma_tt(a, b) = sigma_full.values(train_idx[static_cast<std::size_t>(a)],
                                               train_idx[static_cast<std::size_t>(b)]);
    MatrixXd rho(nt, mt);  // column per test individual
    for (int a = 0; a < nt; ++a)
        for (int b = 0; b < mt; ++b)
            rho(a, b) = sigma_full.values(train_idx[static_cast<std::size_t>(a)],
                                          test_idx[static_cast<std::size_t>(b)]);

    VectorXd y_train(nt);
    for (int a = 0; a < nt; ++a) y_train(a) = cohort.phenotype(train_idx[static_cast<std::size_t>(a)]);

    FoldSolver solver(std::move(sigma_tt));
    VectorXd u = solver.solve(y_train);  // Sigma^-1 Y

    if (mode == CovariateMode::Simple)
        return rho.transpose() * u;  // per test sample: rho' Sigma^-1 Y

    MatrixXd z_train = covariate_design(cohort, train_idx, mode);
    MatrixXd z_test = covariate_design(cohort, test_idx, mode);
    const int p = static_cast<int>(z_train.cols());

    MatrixXd si_z = solver.solve(z_train);
    MatrixXd gram = z_train.transpose() * si_z;
    Eigen::FullPivLU<MatrixXd> lu(gram);
    if (lu.rank() < p)
        throw RankDeficientZ("covariate matrix is rank deficient (rank " +
                             std::to_string(lu.rank()) + " of " + std::to_string(p) + ")");

    VectorXd g = z_train.transpose() * u;       // Z' Sigma^-1 Y
    MatrixXd zt_si_rho = si_z.transpose() * rho;  // Z' Sigma^-1 rho, p x mt

    VectorXd preds(mt);
    for (int b = 0; b < mt; ++b) {
        VectorXd m = lu.solve(z_test.row(b).transpose() - zt_si_rho.col(b));
        preds(b) = rho.col(b).dot(u) + m.dot(g);
    }
    return preds;
}

}  // namespace okrig
