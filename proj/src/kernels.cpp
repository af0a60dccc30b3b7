#include "specrank/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specrank/errors.hpp"
#include "specrank/rng.hpp"

namespace specrank {

std::string to_string(KernelFamily f) {
    return f == KernelFamily::rbf ? "rbf" : "linear";
}

KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "rbf") return KernelFamily::rbf;
    if (s == "linear") return KernelFamily::linear;
    throw DataError("unknown kernel family: " + s);
}

namespace {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& X) {
    const Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd D2 = sq.replicate(1, X.rows()) + sq.transpose().replicate(X.rows(), 1) -
                         2.0 * (X * X.transpose());
    return D2.cwiseMax(0.0);
}

Eigen::MatrixXd rbf_from_squared_distances(const Eigen::MatrixXd& D2, double lengthscale) {
    const double inv = 1.0 / (2.0 * lengthscale * lengthscale);
    Eigen::MatrixXd K = (-inv * D2).array().exp();
    // exact symmetry and unit diagonal
    K = 0.5 * (K + K.transpose());
    K.diagonal().setOnes();
    return K;
}

double median_of_distances(const Eigen::MatrixXd& D2) {
    const Eigen::Index n = D2.rows();
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) dist.push_back(std::sqrt(D2(i, j)));
    if (dist.empty()) return 1.0;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2), dist.end());
    double med = dist[dist.size() / 2];
    if (med <= 0.0) {
        const double mean = std::accumulate(dist.begin(), dist.end(), 0.0) / static_cast<double>(dist.size());
        med = mean > 0.0 ? mean : 1.0;
    }
    return med;
}

}  // namespace

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec) {
    if (!X.allFinite()) throw DataError("kernel_matrix: input contains non-finite entries");
    if (spec.family == KernelFamily::linear) {
        Eigen::MatrixXd K = X * X.transpose();
        return 0.5 * (K + K.transpose());
    }
    if (spec.lengthscale <= 0.0) throw DataError("kernel_matrix: rbf lengthscale must be positive");
    return rbf_from_squared_distances(squared_distances(X), spec.lengthscale);
}

double median_heuristic_lengthscale(const Eigen::MatrixXd& X) {
    return median_of_distances(squared_distances(X));
}

Eigen::MatrixXd comparison_row_kernel(const ComparisonGraph& g) {
    const Eigen::MatrixXd& C = g.matrix();
    const Eigen::MatrixXd D2 = squared_distances(C);
    return rbf_from_squared_distances(D2, median_of_distances(D2));
}

Eigen::MatrixXd centering_matrix(int n) {
    return Eigen::MatrixXd::Identity(n, n) -
           Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

Eigen::MatrixXd double_center(const Eigen::MatrixXd& M) {
    const Eigen::VectorXd row_mean = M.rowwise().mean();
    const Eigen::VectorXd col_mean = M.colwise().mean();
    const double grand = M.mean();
    Eigen::MatrixXd out = M;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean.transpose();
    out.array() += grand;
    return out;
}

double hsic(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G) {
    if (K.rows() != K.cols() || G.rows() != G.cols() || K.rows() != G.rows())
        throw DataError("hsic: kernel matrices must be square and of equal size");
    const double n = static_cast<double>(K.rows());
    // Tr(K H G H) = <H K H, G> for symmetric inputs
    return double_center(K).cwiseProduct(G).sum() / (n * n);
}

HsicTestResult hsic_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z,
                         const KernelSpec& spec_x, const KernelSpec& spec_z, int n_perm,
                         std::uint64_t seed, double alpha) {
    if (X.rows() != Z.rows()) throw DataError("hsic_test: X and Z must have the same number of rows");
    const Eigen::Index n = X.rows();
    if (n < 5) throw DataError("hsic_test: need at least 5 observations");
    if (n_perm < 99) throw DataError("hsic_test: need at least 99 permutations");

    const Eigen::MatrixXd Kc = double_center(kernel_matrix(X, spec_x));
    const Eigen::MatrixXd G = kernel_matrix(Z, spec_z);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const double observed = Kc.cwiseProduct(G).sum() / n2;

    Rng rng(seed);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    int at_least = 0;
    for (int t = 0; t < n_perm; ++t) {
        rng.shuffle(perm);
        double stat = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                stat += Kc(i, j) * G(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        if (stat / n2 >= observed) ++at_least;
    }

    HsicTestResult result;
    result.statistic = observed;
    result.n_permutations = n_perm;
    result.p_value = (1.0 + at_least) / (1.0 + n_perm);
    result.reject_at = alpha;
    result.reject = result.p_value <= alpha;
    return result;
}

BahsicResult bahsic_select(const FeatureTable& features, const Eigen::MatrixXd& c_repr,
                           int target_k, const KernelSpec& feature_kernel, double drop_fraction,
                           bool adapt_lengthscale) {
    const int p = features.p();
    const int n = features.n();
    if (target_k < 1 || target_k > p)
        throw DataError("bahsic_select: target_k must lie in [1, feature count]");
    if (c_repr.rows() != n || c_repr.cols() != n)
        throw DataError("bahsic_select: comparison kernel size does not match item count");
    if (drop_fraction <= 0.0 || drop_fraction > 1.0)
        throw DataError("bahsic_select: drop_fraction must lie in (0, 1]");

    const Eigen::MatrixXd Gc = double_center(c_repr);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const Eigen::MatrixXd& Phi = features.matrix();

    auto subset_hsic = [&](const Eigen::MatrixXd& D2_or_gram, bool is_rbf) {
        Eigen::MatrixXd K;
        if (is_rbf) {
            const double d = adapt_lengthscale ? median_of_distances(D2_or_gram)
                                               : feature_kernel.lengthscale;
            K = rbf_from_squared_distances(D2_or_gram, d);
        } else {
            K = D2_or_gram;
        }
        return K.cwiseProduct(Gc).sum() / n2;
    };

    // Per-feature contributions so candidate subsets are formed by
    // subtraction instead of rebuilding from scratch each time.
    auto feature_d2 = [&](int j) {
        Eigen::MatrixXd D2(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double d = Phi(a, j) - Phi(b, j);
                D2(a, b) = d * d;
            }
        return D2;
    };
    auto feature_gram = [&](int j) {
        return Eigen::MatrixXd(Phi.col(j) * Phi.col(j).transpose());
    };

    const bool is_rbf = feature_kernel.family == KernelFamily::rbf;
    if (is_rbf && !adapt_lengthscale && feature_kernel.lengthscale <= 0.0)
        throw DataError("bahsic_select: rbf lengthscale must be positive");

    std::vector<int> remaining(static_cast<std::size_t>(p));
    std::iota(remaining.begin(), remaining.end(), 0);

    BahsicResult result;
    while (static_cast<int>(remaining.size()) > target_k) {
        Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
        for (int j : remaining) total += is_rbf ? feature_d2(j) : feature_gram(j);

        // Dependence left behind when each single feature is removed.
        std::vector<std::pair<double, int>> removal_scores;
        removal_scores.reserve(remaining.size());
        for (int j : remaining) {
            Eigen::MatrixXd without = total - (is_rbf ? feature_d2(j) : feature_gram(j));
            if (is_rbf) without = without.cwiseMax(0.0);
            removal_scores.emplace_back(subset_hsic(without, is_rbf), j);
        }
        std::stable_sort(removal_scores.begin(), removal_scores.end(),
                         [](const auto& a, const auto& b) {
                             if (a.first != b.first) return a.first > b.first;
                             return a.second < b.second;
                         });

        const int rem = static_cast<int>(remaining.size());
        int m = static_cast<int>(std::ceil(drop_fraction * rem));
        m = std::max(1, std::min(m, rem - target_k));

        BahsicRound round;
        for (int k = 0; k < m; ++k) round.removed.push_back(removal_scores[static_cast<std::size_t>(k)].second);
        std::vector<int> next;
        for (int j : remaining)
            if (std::find(round.removed.begin(), round.removed.end(), j) == round.removed.end())
                next.push_back(j);
        remaining = std::move(next);

        Eigen::MatrixXd surviving = Eigen::MatrixXd::Zero(n, n);
        for (int j : remaining) surviving += is_rbf ? feature_d2(j) : feature_gram(j);
        if (is_rbf) surviving = surviving.cwiseMax(0.0);
        round.hsic_after = subset_hsic(surviving, is_rbf);
        result.trace.push_back(std::move(round));
    }
    result.retained = remaining;
    return result;
}

}  // namespace specrank
