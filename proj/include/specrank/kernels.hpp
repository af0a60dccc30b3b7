#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "specrank/core_data.hpp"

namespace specrank {

enum class KernelFamily { rbf, linear };

struct KernelSpec {
    KernelFamily family = KernelFamily::rbf;
    double lengthscale = 1.0;  // rbf only; must be positive

    static KernelSpec rbf(double d) { return {KernelFamily::rbf, d}; }
    static KernelSpec linear() { return {KernelFamily::linear, 0.0}; }
};

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

/// Gram matrix of the rows of X. rbf: K(x,x') = exp(-||x-x'||^2 / (2 d^2));
/// linear: K = X X^T.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec);

/// Median of the pairwise Euclidean distances between rows of X. Falls back
/// to the mean distance and then to 1.0 when the median (mean) is zero.
double median_heuristic_lengthscale(const Eigen::MatrixXd& X);

/// RBF kernel on the rows of the comparison matrix, lengthscale by the
/// median heuristic. This is the match-outcome view used by the KCCA ranker
/// and by dependence tests against the comparisons.
Eigen::MatrixXd comparison_row_kernel(const ComparisonGraph& g);

/// I - (1/n) 1 1^T.
Eigen::MatrixXd centering_matrix(int n);

/// Doubly centered copy H M H computed in O(n^2) without forming H.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& M);

/// Empirical HSIC: (1/n^2) Tr(K H G H).
double hsic(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G);

struct HsicTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n_permutations = 0;
    double reject_at = 0.05;
    bool reject = false;
};

/// Permutation independence test between the rows of X and Z. Z's rows are
/// permuted n_perm times; p = (1 + #{perm stat >= observed}) / (1 + n_perm).
HsicTestResult hsic_test(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z,
                         const KernelSpec& spec_x, const KernelSpec& spec_z, int n_perm,
                         std::uint64_t seed, double alpha = 0.05);

struct BahsicRound {
    std::vector<int> removed;    // feature indices dropped this round
    double hsic_after = 0.0;     // dependence of the surviving set
};

struct BahsicResult {
    std::vector<int> retained;        // original column order
    std::vector<BahsicRound> trace;   // elimination history
};

/// Backward elimination: repeatedly drops the ceil(drop_fraction * remaining)
/// features (at least one, never past target_k) whose individual removal
/// leaves the highest HSIC between the remaining-feature kernel and c_repr.
/// With adapt_lengthscale, an rbf feature kernel re-estimates its lengthscale
/// by the median heuristic on each candidate subset.
BahsicResult bahsic_select(const FeatureTable& features, const Eigen::MatrixXd& c_repr,
                           int target_k, const KernelSpec& feature_kernel,
                           double drop_fraction = 0.1, bool adapt_lengthscale = true);

}  // namespace specrank
