#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>

#include "specrank/core_data.hpp"
#include "specrank/kernels.hpp"

namespace specrank {

/// Everything needed to score unseen items with a trained ranker. Linear
/// models carry beta and the training feature means; kernel models carry the
/// expansion coefficients alpha, the training features, the kernel and the
/// per-column centering corrections. Exactly one of beta/alpha is populated.
struct FittedModel {
    std::string algo;
    Orientation orientation = Orientation::as_is;

    // linear models
    Eigen::VectorXd beta;
    Eigen::VectorXd feature_mean;

    // kernel models
    Eigen::VectorXd alpha;
    Eigen::MatrixXd train_features;
    KernelSpec kernel{};
    Eigen::VectorXd kernel_col_means;

    // solver internals, kept for audit
    Eigen::VectorXd gamma;
    double lambda = 0.0;

    Eigen::VectorXd train_scores;
    std::vector<std::string> train_ids;
    std::vector<std::string> feature_names;

    std::string kcca_side;  // "covariates" or "matches"; kcca only

    bool is_linear() const { return beta.size() > 0; }
};

struct FairnessConfig {
    double lambda = 0.0;                              // >= 0
    KernelSpec sensitive_kernel = KernelSpec::rbf(0.0);
};

struct FitOutput {
    RankResult result;
    FittedModel model;
};

// Rankers taking a KernelSpec resolve a non-positive rbf lengthscale with
// the median heuristic on the matrix the kernel is built from.

/// Seriation: Fiedler vector of the Laplacian of the match-agreement
/// similarity matrix. Cardinal inputs are sign-converted internally.
RankResult serial_rank(const ComparisonGraph& g);

/// Seriation on the combined similarity S + lambda * K where K is a kernel
/// on the item covariates.
RankResult c_serial_rank(const ComparisonGraph& g, const FeatureTable& features,
                         const KernelSpec& spec, double lambda);

/// Rank-2 model: top two eigenvectors of C C^T (or of the degree-normalised
/// variant) restricted to the subspace orthogonal to 1; of the two candidate
/// directions the one with fewer upsets wins.
RankResult svd_rank(const ComparisonGraph& g, bool normalized);

/// Linear-covariate ranker: r = H Phi beta with beta the top eigenvector of
/// the whitened cross-covariance problem.
FitOutput svdcov_rank(const ComparisonGraph& g, const FeatureTable& features);

/// Kernelised variant: r = H K alpha.
FitOutput svdkcov_rank(const ComparisonGraph& g, const FeatureTable& features,
                       const KernelSpec& spec);

/// Kernelised variant with a statistical-parity penalty on the kernel of the
/// sensitive features; fair.lambda = 0 reproduces svdkcov_rank exactly.
FitOutput svdkfair_rank(const ComparisonGraph& g, const FeatureTable& features,
                        const KernelSpec& spec, const FairnessConfig& fair);

/// Canonical-correlation ranker on two precomputed kernels: K over the item
/// covariates, G over the match outcomes. Produces both embeddings and keeps
/// the one with fewer upsets; the fitted model always exposes the
/// covariate-side function, which is the only one usable on unseen items.
FitOutput kcca_rank(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G, double epsilon,
                    const ComparisonGraph& g);

/// Convenience overload: builds K from the features and G from the
/// comparison rows, then stores everything needed for prediction.
FitOutput kcca_rank(const ComparisonGraph& g, const FeatureTable& features,
                    const KernelSpec& spec, double epsilon);

/// Similarity-adjusted win-probability proxy. Entries pair to 1:
/// P[i,j] = 1 - S[i,j]/(2n) when i beat j, S[i,j]/(2n) when j beat i,
/// 1/2 when the pair was not observed.
Eigen::MatrixXd probability_proxy(const ComparisonGraph& g, const Eigen::MatrixXd& S);

/// Stationary distribution of the Markov chain whose transitions follow the
/// win-probability proxy; requires a connected comparison graph.
RankResult rank_centrality(const ComparisonGraph& g, const Eigen::MatrixXd& P);

/// Algorithm dispatch used by the CLI and the experiment harness.
/// Canonical names: serial, cserial, svd, svdn, svdc, svdk, svdkfair, kcca, rc.
struct AlgoOptions {
    double lambda = 1.0;            // cserial similarity trade-off
    double lengthscale = 0.0;       // 0 => median heuristic
    KernelFamily kernel_family = KernelFamily::rbf;
    double epsilon = 0.0;           // kcca; 0 => 0.1 * n
    double fair_lambda = 0.0;       // svdkfair
    KernelFamily sensitive_family = KernelFamily::rbf;
    double sensitive_lengthscale = 0.0;  // 0 => median heuristic
};

struct AlgoOutput {
    RankResult result;
    std::optional<FittedModel> model;
};

std::string canonical_algo_name(std::string_view name);
bool algo_needs_features(std::string_view canonical);
bool algo_supports_prediction(std::string_view canonical);

AlgoOutput run_algorithm(std::string_view algo, const ComparisonGraph& g,
                         const FeatureTable* features, const AlgoOptions& opts = {});

}  // namespace specrank
