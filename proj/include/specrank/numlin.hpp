#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace specrank {

struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;  // unit Euclidean norm
};

struct SpectralConfig {
    double tol = 1e-10;
    int max_iter = 10000;
    std::uint64_t seed = 0;  // start-vector randomisation
};

/// Flip v in place so that its largest-magnitude entry (first such entry on
/// ties) is positive. Canonicalises the sign ambiguity of eigenvectors so
/// identical inputs give identical outputs; rankers re-orient by upsets.
void canonicalize_sign(Eigen::VectorXd& v);

/// Full spectrum of a symmetric matrix, eigenvalues ascending, orthonormal
/// eigenvectors with canonical sign. Errors if A is not symmetric within
/// 1e-10 relative.
std::vector<EigenPair> dense_sym_eig(const Eigen::MatrixXd& A);

/// Dominant eigenpair of a symmetric PSD matrix by power iteration, with
/// optional deflation against already-converged eigenvectors. Converges when
/// successive iterates differ by less than cfg.tol or the eigen-residual
/// drops below cfg.tol * ||A||_F; errors after cfg.max_iter iterations.
EigenPair power_top_eigenvector(const Eigen::MatrixXd& A, const SpectralConfig& cfg = {},
                                const std::vector<Eigen::VectorXd>& deflate = {});

/// Eigenvector for the smallest eigenvalue of a graph Laplacian restricted
/// to the subspace orthogonal to the all-ones vector (the Fiedler vector for
/// connected graphs). Unit norm, canonical sign, v'1 ~ 0.
Eigen::VectorXd fiedler_vector(const Eigen::MatrixXd& lap);

struct CholeskyResult {
    Eigen::MatrixXd L;     // lower triangular, M + jitter*I = L L^T
    double jitter = 0.0;   // the delta that made the factorisation succeed
};

/// Cholesky factorisation with escalating diagonal jitter: tries
/// delta in {0, jitter0, 10*jitter0, ..., 1e6*jitter0} and returns the first
/// success. jitter0 <= 0 disables escalation (only delta = 0 is tried).
CholeskyResult cholesky_jitter(const Eigen::MatrixXd& M, double jitter0);

/// Default jitter scale 1e-10 * trace(M)/n, clamped to be non-negative.
double default_jitter(const Eigen::MatrixXd& M);

/// Top eigenpair of A x = lambda B x for symmetric A and positive-definite
/// (after jitter) B, via Cholesky reduction to a standard symmetric problem.
/// The returned vector has unit Euclidean norm.
EigenPair generalized_top_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace specrank
