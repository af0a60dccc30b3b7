#include "specrank/numlin.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "specrank/errors.hpp"
#include "specrank/rng.hpp"

namespace specrank {

namespace {

void check_symmetric(const Eigen::MatrixXd& A, const char* who) {
    if (A.rows() != A.cols()) throw DataError(std::string(who) + ": matrix must be square");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale)
        throw DataError(std::string(who) + ": matrix is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
}

}  // namespace

void canonicalize_sign(Eigen::VectorXd& v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (v.size() > 0 && v(imax) < 0.0) v = -v;
}

std::vector<EigenPair> dense_sym_eig(const Eigen::MatrixXd& A) {
    check_symmetric(A, "dense_sym_eig");
    const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense_sym_eig: eigendecomposition failed to converge");
    std::vector<EigenPair> pairs(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        pairs[static_cast<std::size_t>(i)].value = solver.eigenvalues()(i);
        Eigen::VectorXd v = solver.eigenvectors().col(i);
        canonicalize_sign(v);
        pairs[static_cast<std::size_t>(i)].vector = std::move(v);
    }
    return pairs;
}

EigenPair power_top_eigenvector(const Eigen::MatrixXd& A, const SpectralConfig& cfg,
                                const std::vector<Eigen::VectorXd>& deflate) {
    check_symmetric(A, "power_top_eigenvector");
    if (cfg.tol <= 0.0 || cfg.max_iter < 1)
        throw DataError("power_top_eigenvector: tol must be > 0 and max_iter >= 1");
    const Eigen::Index n = A.rows();
    const double norm_a = A.norm();

    Rng rng(cfg.seed);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();

    auto project_out = [&](Eigen::VectorXd& x) {
        for (const auto& u : deflate) x -= u.dot(x) * u;
    };

    project_out(v);
    if (v.norm() == 0.0) v.setOnes();
    v.normalize();

    double lambda = 0.0;
    double residual = 0.0;
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        Eigen::VectorXd w = A * v;
        project_out(w);
        const double wnorm = w.norm();
        if (wnorm <= 1e-300 * std::max(1.0, norm_a)) {
            // A annihilates v (up to deflation): zero eigenvalue, v is as
            // good an eigenvector as any.
            canonicalize_sign(v);
            return {0.0, v};
        }
        Eigen::VectorXd next = w / wnorm;
        lambda = v.dot(A * v);
        residual = (A * next - next.dot(A * next) * next).norm();
        const double diff = (next - v).norm();
        v = std::move(next);
        if (diff < cfg.tol || residual <= cfg.tol * norm_a) {
            lambda = v.dot(A * v);
            canonicalize_sign(v);
            return {lambda, v};
        }
    }
    throw NumericalError("power_top_eigenvector: no convergence after " +
                         std::to_string(cfg.max_iter) + " iterations (last residual " +
                         std::to_string(residual) + ")");
}

Eigen::VectorXd fiedler_vector(const Eigen::MatrixXd& lap) {
    if (lap.rows() < 2) throw DataError("fiedler_vector requires at least two items");
    check_symmetric(lap, "fiedler_vector");
    const Eigen::Index n = lap.rows();
    const double scale = std::max(1.0, lap.cwiseAbs().maxCoeff());
    if ((lap * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() > 1e-8 * scale * n)
        throw DataError("fiedler_vector: input is not a graph Laplacian (row sums are not zero)");

    // Push the all-ones direction above the rest of the spectrum; the
    // smallest eigenvector of the shifted matrix is then the minimiser of the
    // Laplacian quadratic form over the subspace orthogonal to 1.
    const double shift = lap.norm() + 1.0;
    const Eigen::MatrixXd shifted =
        lap + (shift / static_cast<double>(n)) * Eigen::MatrixXd::Ones(n, n);
    const std::vector<EigenPair> pairs = dense_sym_eig(shifted);
    Eigen::VectorXd v = pairs.front().vector;
    // Remove floating-point residue along 1 and renormalise.
    v.array() -= v.mean();
    v.normalize();
    canonicalize_sign(v);
    return v;
}

double default_jitter(const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return 0.0;
    return 1e-10 * std::max(M.trace(), 0.0) / static_cast<double>(M.rows());
}

CholeskyResult cholesky_jitter(const Eigen::MatrixXd& M, double jitter0) {
    check_symmetric(M, "cholesky_jitter");
    const Eigen::Index n = M.rows();
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());

    std::vector<double> grid = {0.0};
    if (jitter0 > 0.0)
        for (double d = jitter0; d <= 1e6 * jitter0; d *= 10.0) grid.push_back(d);

    for (double delta : grid) {
        Eigen::LLT<Eigen::MatrixXd> llt(S + delta * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) return {llt.matrixL(), delta};
    }
    throw NumericalError("cholesky_jitter: matrix is not positive definite after jitter up to " +
                         std::to_string(1e6 * jitter0));
}

EigenPair generalized_top_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    check_symmetric(A, "generalized_top_eig");
    if (B.rows() != A.rows()) throw DataError("generalized_top_eig: size mismatch");
    const CholeskyResult chol = cholesky_jitter(B, default_jitter(B));

    // Reduce A x = lambda B x to the standard problem on T = L^{-1} A L^{-T}.
    const Eigen::MatrixXd Linv_A =
        chol.L.triangularView<Eigen::Lower>().solve(A);
    const Eigen::MatrixXd T =
        chol.L.triangularView<Eigen::Lower>().solve(Linv_A.transpose()).transpose();
    const std::vector<EigenPair> pairs = dense_sym_eig(0.5 * (T + T.transpose()));
    const EigenPair& top = pairs.back();

    Eigen::VectorXd x = chol.L.transpose().triangularView<Eigen::Upper>().solve(top.vector);
    const double xnorm = x.norm();
    if (xnorm == 0.0) throw NumericalError("generalized_top_eig: degenerate eigenvector");
    x /= xnorm;
    canonicalize_sign(x);
    return {top.value, x};
}

}  // namespace specrank
