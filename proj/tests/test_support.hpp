#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <utility>
#include <vector>

#include "specrank/core_data.hpp"
#include "specrank/rng.hpp"

namespace testsupport {

using specrank::ComparisonGraph;
using specrank::ComparisonKind;
using specrank::Rng;

inline ComparisonGraph random_graph(int n, double sparsity, ComparisonKind kind, Rng& rng) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < sparsity) {
                double v;
                if (kind == ComparisonKind::ordinal) {
                    v = rng.uniform() < 0.5 ? 1.0 : -1.0;
                } else {
                    v = rng.normal();
                    if (v == 0.0) v = 1.0;
                }
                C(i, j) = v;
                C(j, i) = -v;
            }
    return ComparisonGraph::from_matrix(std::move(C), kind);
}

inline Eigen::VectorXd random_vector(int n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

inline Eigen::MatrixXd random_matrix(int r, int c, Rng& rng) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

inline Eigen::MatrixXd random_psd(int n, Rng& rng) {
    const Eigen::MatrixXd X = random_matrix(n, n, rng);
    return X * X.transpose();
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(p);
    return p;
}

// Oracle: upset count by scanning every ordered pair once, independent of
// the library implementation.
inline int upset_oracle(const Eigen::MatrixXd& C, const Eigen::VectorXd& s) {
    int twice = 0;
    const int n = static_cast<int>(C.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || C(i, j) == 0.0) continue;
            const double d = s(i) - s(j);
            if (d < 0.0 && C(i, j) > 0.0) ++twice;
            if (d > 0.0 && C(i, j) < 0.0) ++twice;
        }
    return twice / 2;  // each unordered pair visited from both sides
}

// Oracle: HSIC via the expanded double-sum identity rather than explicit
// centering.
inline double hsic_oracle(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G) {
    const int n = static_cast<int>(K.rows());
    double term1 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) term1 += K(i, j) * G(i, j);
    double cross = 0.0;
    for (int i = 0; i < n; ++i) cross += K.row(i).sum() * G.row(i).sum();
    const double total = K.sum() * G.sum();
    const double nn = static_cast<double>(n);
    return (term1 - 2.0 / nn * cross + total / (nn * nn)) / (nn * nn);
}

// Full consistent ordinal tournament with item 0 the strongest.
inline ComparisonGraph consistent_tournament(int n) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            C(i, j) = 1.0;
            C(j, i) = -1.0;
        }
    return ComparisonGraph::from_matrix(std::move(C), ComparisonKind::ordinal);
}

// Exact rank-2 cardinal matrix C = r 1^T - 1 r^T on a complete graph.
inline ComparisonGraph rank2_graph(const Eigen::VectorXd& r) {
    const int n = static_cast<int>(r.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = r(i) - r(j);
    for (int i = 0; i < n; ++i) C(i, i) = 0.0;
    return ComparisonGraph::from_matrix(std::move(C), ComparisonKind::cardinal);
}

inline ComparisonGraph permute_graph(const ComparisonGraph& g, const std::vector<int>& perm) {
    // perm maps old index -> new index
    const int n = g.n();
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            C(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = g.matrix()(i, j);
    return ComparisonGraph::from_matrix(std::move(C), g.kind());
}

template <typename Vec>
inline Eigen::VectorXd permute_vector(const Vec& v, const std::vector<int>& perm) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(perm[static_cast<std::size_t>(i)]) = v(i);
    return out;
}

}  // namespace testsupport
