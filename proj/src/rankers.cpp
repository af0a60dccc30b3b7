#include "specrank/rankers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "specrank/errors.hpp"
#include "specrank/numlin.hpp"

namespace specrank {

namespace {

// All-zero comparison matrices carry no usable signal; every ranker returns
// the index ordering with a diagnostic flag instead of erroring.
RankResult degenerate_result(const ComparisonGraph& g) {
    RankResult r;
    r.scores = Eigen::VectorXd::Zero(g.n());
    r.ordering.resize(static_cast<std::size_t>(g.n()));
    std::iota(r.ordering.begin(), r.ordering.end(), 0);
    r.degenerate = true;
    return r;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& S) {
    Eigen::MatrixXd L = -S;
    L.diagonal() += S.rowwise().sum();
    return L;
}

KernelSpec resolve_spec(const KernelSpec& spec, const Eigen::MatrixXd& X) {
    KernelSpec out = spec;
    if (out.family == KernelFamily::rbf && out.lengthscale <= 0.0)
        out.lengthscale = median_heuristic_lengthscale(X);
    return out;
}

void check_feature_alignment(const ComparisonGraph& g, const FeatureTable& features) {
    if (features.n() != g.n())
        throw DataError("feature rows (" + std::to_string(features.n()) +
                        ") do not align with item count (" + std::to_string(g.n()) + ")");
}

Eigen::VectorXd center(const Eigen::VectorXd& v) {
    return v.array() - v.mean();
}

// K H as an explicit matrix: subtract each row's mean.
Eigen::MatrixXd right_center(const Eigen::MatrixXd& K) {
    Eigen::MatrixXd out = K;
    out.colwise() -= Eigen::VectorXd(K.rowwise().mean());
    return out;
}

}  // namespace

RankResult serial_rank(const ComparisonGraph& g) {
    if (g.n() < 3) throw DataError("serial_rank requires at least three items");
    if (g.observed_pair_count() == 0) return degenerate_result(g);
    const ComparisonGraph ordinal = g.kind() == ComparisonKind::ordinal ? g : g.signed_graph();
    const Eigen::MatrixXd S = similarity_matrix(ordinal);
    const Eigen::VectorXd r = fiedler_vector(laplacian(S));
    return orient_ranking(g, r);
}

RankResult c_serial_rank(const ComparisonGraph& g, const FeatureTable& features,
                         const KernelSpec& spec, double lambda) {
    if (g.n() < 3) throw DataError("c_serial_rank requires at least three items");
    check_feature_alignment(g, features);
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DataError("c_serial_rank: lambda must be finite and non-negative");
    if (g.observed_pair_count() == 0) return degenerate_result(g);
    const ComparisonGraph ordinal = g.kind() == ComparisonKind::ordinal ? g : g.signed_graph();
    const Eigen::MatrixXd S = similarity_matrix(ordinal);
    const Eigen::MatrixXd K =
        kernel_matrix(features.matrix(), resolve_spec(spec, features.matrix()));
    const Eigen::MatrixXd combined = S + lambda * K;
    const Eigen::VectorXd r = fiedler_vector(laplacian(combined));
    return orient_ranking(g, r);
}

RankResult svd_rank(const ComparisonGraph& g, bool normalized) {
    if (g.n() < 2) throw DataError("svd_rank requires at least two items");
    if (g.observed_pair_count() == 0) return degenerate_result(g);
    const Eigen::MatrixXd M = normalized ? degree_normalize(g) : g.matrix();
    const Eigen::MatrixXd W = double_center(M * M.transpose());
    const std::vector<EigenPair> pairs = dense_sym_eig(0.5 * (W + W.transpose()));
    const Eigen::Index n = g.n();
    const RankResult first = orient_ranking(g, pairs[static_cast<std::size_t>(n - 1)].vector);
    const RankResult second = orient_ranking(g, pairs[static_cast<std::size_t>(n - 2)].vector);
    return second.upsets < first.upsets ? second : first;
}

namespace {

struct SvdkParts {
    Eigen::MatrixXd K;   // feature kernel
    Eigen::MatrixXd Q;   // L^{-1} K H
    Eigen::MatrixXd L;   // chol factor of K H K (+ jitter)
};

SvdkParts svdk_whiten(const ComparisonGraph& g, const FeatureTable& features,
                      const KernelSpec& spec) {
    check_feature_alignment(g, features);
    SvdkParts parts;
    parts.K = kernel_matrix(features.matrix(), resolve_spec(spec, features.matrix()));
    const Eigen::MatrixXd KH = right_center(parts.K);
    const Eigen::MatrixXd M = KH * parts.K;  // K H K
    const CholeskyResult chol = cholesky_jitter(0.5 * (M + M.transpose()), default_jitter(M));
    parts.L = chol.L;
    parts.Q = chol.L.triangularView<Eigen::Lower>().solve(KH);
    return parts;
}

FitOutput svdk_solve(const ComparisonGraph& g, const FeatureTable& features,
                     const SvdkParts& parts, const Eigen::MatrixXd& psi,
                     const std::string& algo, double lambda) {
    const std::vector<EigenPair> pairs = dense_sym_eig(0.5 * (psi + psi.transpose()));
    const Eigen::VectorXd& gamma = pairs.back().vector;
    const Eigen::VectorXd alpha =
        parts.L.transpose().triangularView<Eigen::Upper>().solve(gamma);
    const Eigen::VectorXd r = center(parts.K * alpha);

    FitOutput out;
    out.result = orient_ranking(g, r);
    out.model.algo = algo;
    out.model.orientation = out.result.orientation;
    out.model.alpha = alpha;
    out.model.train_features = features.matrix();
    out.model.kernel_col_means = parts.K.colwise().mean();
    out.model.gamma = gamma;
    out.model.lambda = lambda;
    out.model.train_scores = r;
    out.model.train_ids = g.item_ids();
    out.model.feature_names = features.column_names();
    return out;
}

}  // namespace

FitOutput svdcov_rank(const ComparisonGraph& g, const FeatureTable& features) {
    check_feature_alignment(g, features);
    if (features.p() < 1) throw DataError("svdcov_rank requires at least one feature");
    if (g.observed_pair_count() == 0) {
        FitOutput out;
        out.result = degenerate_result(g);
        out.model.algo = "svdc";
        out.model.beta = Eigen::VectorXd::Zero(features.p());
        out.model.feature_mean = features.matrix().colwise().mean();
        out.model.train_scores = out.result.scores;
        out.model.train_ids = g.item_ids();
        out.model.feature_names = features.column_names();
        return out;
    }

    const Eigen::VectorXd mu = features.matrix().colwise().mean();
    Eigen::MatrixXd phi_c = features.matrix();
    phi_c.rowwise() -= mu.transpose();

    const Eigen::MatrixXd cov = phi_c.transpose() * phi_c;  // Phi^T H Phi
    const CholeskyResult chol =
        cholesky_jitter(0.5 * (cov + cov.transpose()), default_jitter(cov));

    const Eigen::MatrixXd E =
        chol.L.triangularView<Eigen::Lower>().solve(phi_c.transpose() * g.matrix());
    const Eigen::MatrixXd psi = E * E.transpose();
    const std::vector<EigenPair> pairs = dense_sym_eig(0.5 * (psi + psi.transpose()));
    const Eigen::VectorXd& gamma = pairs.back().vector;
    const Eigen::VectorXd beta = chol.L.transpose().triangularView<Eigen::Upper>().solve(gamma);
    const Eigen::VectorXd r = phi_c * beta;

    FitOutput out;
    out.result = orient_ranking(g, r);
    out.model.algo = "svdc";
    out.model.orientation = out.result.orientation;
    out.model.beta = beta;
    out.model.feature_mean = mu;
    out.model.gamma = gamma;
    out.model.train_scores = r;
    out.model.train_ids = g.item_ids();
    out.model.feature_names = features.column_names();
    return out;
}

FitOutput svdkcov_rank(const ComparisonGraph& g, const FeatureTable& features,
                       const KernelSpec& spec) {
    if (g.observed_pair_count() == 0) {
        FitOutput out;
        out.result = degenerate_result(g);
        out.model.algo = "svdk";
        out.model.alpha = Eigen::VectorXd::Zero(g.n());
        out.model.train_features = features.matrix();
        out.model.kernel = resolve_spec(spec, features.matrix());
        out.model.kernel_col_means = Eigen::VectorXd::Zero(g.n());
        out.model.train_scores = out.result.scores;
        out.model.train_ids = g.item_ids();
        out.model.feature_names = features.column_names();
        return out;
    }
    const SvdkParts parts = svdk_whiten(g, features, spec);
    const Eigen::MatrixXd T = parts.Q * g.matrix();
    const Eigen::MatrixXd psi = T * T.transpose();
    FitOutput out = svdk_solve(g, features, parts, psi, "svdk", 0.0);
    out.model.kernel = resolve_spec(spec, features.matrix());
    return out;
}

FitOutput svdkfair_rank(const ComparisonGraph& g, const FeatureTable& features,
                        const KernelSpec& spec, const FairnessConfig& fair) {
    if (features.sensitive_columns().empty())
        throw DataError("svdkfair_rank requires a non-empty set of sensitive columns");
    if (!(fair.lambda >= 0.0) || !std::isfinite(fair.lambda))
        throw DataError("svdkfair_rank: lambda must be finite and non-negative");
    if (g.observed_pair_count() == 0) {
        FitOutput out = svdkcov_rank(g, features, spec);
        out.model.algo = "svdkfair";
        out.model.lambda = fair.lambda;
        return out;
    }

    const SvdkParts parts = svdk_whiten(g, features, spec);
    const Eigen::MatrixXd T = parts.Q * g.matrix();
    Eigen::MatrixXd psi = T * T.transpose();
    if (fair.lambda != 0.0) {
        const Eigen::MatrixXd Z = features.sensitive_matrix();
        const Eigen::MatrixXd Gs = kernel_matrix(Z, resolve_spec(fair.sensitive_kernel, Z));
        const double n = static_cast<double>(g.n());
        Eigen::MatrixXd penalty = parts.Q * Gs * parts.Q.transpose();
        penalty = 0.5 * (penalty + penalty.transpose());
        psi -= (fair.lambda / (n * n)) * penalty;
    }
    FitOutput out = svdk_solve(g, features, parts, psi, "svdkfair", fair.lambda);
    out.model.kernel = resolve_spec(spec, features.matrix());
    return out;
}

FitOutput kcca_rank(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G, double epsilon,
                    const ComparisonGraph& g) {
    const Eigen::Index n = g.n();
    if (K.rows() != n || K.cols() != n || G.rows() != n || G.cols() != n)
        throw DataError("kcca_rank: kernel sizes do not match item count");
    if (!(epsilon > 0.0)) throw DataError("kcca_rank: epsilon must be positive");
    if (g.observed_pair_count() == 0) {
        FitOutput out;
        out.result = degenerate_result(g);
        out.model.algo = "kcca";
        out.model.alpha = Eigen::VectorXd::Zero(n);
        out.model.kernel_col_means = Eigen::VectorXd::Zero(n);
        out.model.train_scores = out.result.scores;
        out.model.train_ids = g.item_ids();
        out.model.kcca_side = "covariates";
        return out;
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    const Eigen::MatrixXd Kt = double_center(K);
    const Eigen::MatrixXd Gt = double_center(G);

    const Eigen::MatrixXd cross = inv_n * (Kt * Gt);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n) = cross;
    A.bottomLeftCorner(n, n) = cross.transpose();

    Eigen::MatrixXd k_star = inv_n * (Kt * Kt + epsilon * Kt);
    Eigen::MatrixXd g_star = inv_n * (Gt * Gt + epsilon * Gt);
    k_star = 0.5 * (k_star + k_star.transpose());
    g_star = 0.5 * (g_star + g_star.transpose());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    B.topLeftCorner(n, n) = k_star;
    B.bottomRightCorner(n, n) = g_star;

    const EigenPair top = generalized_top_eig(A, B);
    const Eigen::VectorXd alpha_raw = top.vector.head(n);
    const Eigen::VectorXd beta_raw = top.vector.tail(n);

    const Eigen::VectorXd r1 = K * center(alpha_raw);
    const Eigen::VectorXd r2 = G * center(beta_raw);
    const RankResult res1 = orient_ranking(g, r1);
    const RankResult res2 = orient_ranking(g, r2);
    const bool matches_win = res2.upsets < res1.upsets;

    FitOutput out;
    out.result = matches_win ? res2 : res1;
    out.model.algo = "kcca";
    out.model.orientation = res1.orientation;  // prediction always uses the covariate side
    out.model.alpha = center(alpha_raw);
    out.model.kernel_col_means = Eigen::VectorXd::Zero(n);
    out.model.gamma = top.vector;
    out.model.lambda = epsilon;
    out.model.train_scores = r1;
    out.model.train_ids = g.item_ids();
    out.model.kcca_side = matches_win ? "matches" : "covariates";
    return out;
}

FitOutput kcca_rank(const ComparisonGraph& g, const FeatureTable& features,
                    const KernelSpec& spec, double epsilon) {
    check_feature_alignment(g, features);
    const KernelSpec resolved = resolve_spec(spec, features.matrix());
    const Eigen::MatrixXd K = kernel_matrix(features.matrix(), resolved);
    const Eigen::MatrixXd G = comparison_row_kernel(g);
    const double eps = epsilon > 0.0 ? epsilon : 1e-4 * static_cast<double>(g.n());
    FitOutput out = kcca_rank(K, G, eps, g);
    out.model.train_features = features.matrix();
    out.model.kernel = resolved;
    out.model.feature_names = features.column_names();
    return out;
}

Eigen::MatrixXd probability_proxy(const ComparisonGraph& g, const Eigen::MatrixXd& S) {
    const Eigen::Index n = g.n();
    if (S.rows() != n || S.cols() != n)
        throw DataError("probability_proxy: similarity size does not match item count");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (S(i, j) > static_cast<double>(n) + 1e-9 || S(i, j) < -1e-9)
                throw DataError("probability_proxy: similarity entry outside [0, n] at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
        }

    const Eigen::MatrixXd& C = g.matrix();
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(n, n, 0.5);
    const double two_n = 2.0 * static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (C(i, j) > 0.0)
                P(i, j) = 1.0 - S(i, j) / two_n;
            else if (C(i, j) < 0.0)
                P(i, j) = S(i, j) / two_n;
        }
    return P;
}

RankResult rank_centrality(const ComparisonGraph& g, const Eigen::MatrixXd& P) {
    const Eigen::Index n = g.n();
    if (P.rows() != n || P.cols() != n)
        throw DataError("rank_centrality: probability matrix size does not match item count");
    if (!g.connected())
        throw NumericalError(
            "rank_centrality: comparison graph is disconnected, the chain is reducible; "
            "covariate-based algorithms (svdc, svdk, kcca) handle disconnected graphs");

    const Eigen::VectorXi deg = g.degrees();
    const double d_max = static_cast<double>(deg.maxCoeff());
    const Eigen::MatrixXd& C = g.matrix();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j || C(i, j) == 0.0) continue;
            M(i, j) = P(j, i) / d_max;
            off += M(i, j);
        }
        M(i, i) = 1.0 - off;
    }

    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const Eigen::MatrixXd Mt = M.transpose();
    bool converged = false;
    for (int iter = 0; iter < 100000; ++iter) {
        Eigen::VectorXd next = Mt * pi;
        next /= next.sum();
        const double diff = (next - pi).cwiseAbs().sum();
        pi = std::move(next);
        if (diff < 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("rank_centrality: stationary distribution did not converge");
    return orient_ranking(g, pi);
}

std::string canonical_algo_name(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "serial" || s == "ser") return "serial";
    if (s == "cserial" || s == "cs") return "cserial";
    if (s == "svd") return "svd";
    if (s == "svdn" || s == "svdnorm") return "svdn";
    if (s == "svdc") return "svdc";
    if (s == "svdk") return "svdk";
    if (s == "svdkfair") return "svdkfair";
    if (s == "kcca") return "kcca";
    if (s == "rc" || s == "ipr") return "rc";
    throw DataError("unknown algorithm '" + std::string(name) +
                    "'; valid: serial, cserial, svd, svdn, svdc, svdk, svdkfair, kcca, rc");
}

bool algo_needs_features(std::string_view canonical) {
    return canonical == "cserial" || canonical == "svdc" || canonical == "svdk" ||
           canonical == "svdkfair" || canonical == "kcca";
}

bool algo_supports_prediction(std::string_view canonical) {
    return canonical == "svdc" || canonical == "svdk" || canonical == "svdkfair" ||
           canonical == "kcca";
}

AlgoOutput run_algorithm(std::string_view algo, const ComparisonGraph& g,
                         const FeatureTable* features, const AlgoOptions& opts) {
    const std::string name = canonical_algo_name(algo);
    if (algo_needs_features(name) && features == nullptr)
        throw DataError("algorithm '" + name + "' requires item features");

    const KernelSpec spec{opts.kernel_family, opts.lengthscale};
    AlgoOutput out;
    if (name == "serial") {
        out.result = serial_rank(g);
    } else if (name == "cserial") {
        out.result = c_serial_rank(g, *features, spec, opts.lambda);
    } else if (name == "svd") {
        out.result = svd_rank(g, false);
    } else if (name == "svdn") {
        out.result = svd_rank(g, true);
    } else if (name == "svdc") {
        FitOutput fit = svdcov_rank(g, *features);
        out.result = fit.result;
        out.model = std::move(fit.model);
    } else if (name == "svdk") {
        FitOutput fit = svdkcov_rank(g, *features, spec);
        out.result = fit.result;
        out.model = std::move(fit.model);
    } else if (name == "svdkfair") {
        FairnessConfig fair;
        fair.lambda = opts.fair_lambda;
        fair.sensitive_kernel = KernelSpec{opts.sensitive_family, opts.sensitive_lengthscale};
        FitOutput fit = svdkfair_rank(g, *features, spec, fair);
        out.result = fit.result;
        out.model = std::move(fit.model);
    } else if (name == "kcca") {
        FitOutput fit = kcca_rank(g, *features, spec, opts.epsilon);
        out.result = fit.result;
        out.model = std::move(fit.model);
    } else if (name == "rc") {
        const Eigen::MatrixXd S = similarity_matrix(
            g.kind() == ComparisonKind::ordinal ? g : g.signed_graph());
        out.result = rank_centrality(g, probability_proxy(g, S));
    }
    return out;
}

}  // namespace specrank
