#include <doctest.h>

#include <cmath>

#include "specrank/errors.hpp"
#include "specrank/kernels.hpp"
#include "test_support.hpp"

using namespace specrank;
using namespace testsupport;

TEST_CASE("rbf kernel on identical rows is all ones") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 2, 1, 2, 1, 2, 1, 2;
    const Eigen::MatrixXd K = kernel_matrix(X, KernelSpec::rbf(0.7));
    CHECK((K.array() - 1.0).abs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("rbf kernel approaches all ones as the lengthscale grows") {
    Rng rng(61);
    const Eigen::MatrixXd X = random_matrix(10, 3, rng);
    double diameter = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) diameter = std::max(diameter, (X.row(i) - X.row(j)).norm());
    const Eigen::MatrixXd K = kernel_matrix(X, KernelSpec::rbf(1e6 * diameter));
    CHECK((K.array() - 1.0).abs().maxCoeff() < 1e-9);
}

TEST_CASE("rbf kernel closed form on two 1-D points") {
    Eigen::MatrixXd X(2, 1);
    X << 0, 1;
    const Eigen::MatrixXd K = kernel_matrix(X, KernelSpec::rbf(1.0));
    CHECK(K(0, 0) == doctest::Approx(1.0));
    CHECK(K(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(K(1, 0) == doctest::Approx(std::exp(-0.5)));
    CHECK_THROWS_AS(kernel_matrix(X, KernelSpec::rbf(0.0)), DataError);
    CHECK_THROWS_AS(kernel_matrix(X, KernelSpec::rbf(-1.0)), DataError);
}

TEST_CASE("rbf kernel is PSD within tolerance") {
    Rng rng(67);
    const Eigen::MatrixXd X = random_matrix(30, 4, rng);
    const Eigen::MatrixXd K = kernel_matrix(X, KernelSpec::rbf(median_heuristic_lengthscale(X)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("rbf kernel is translation invariant") {
    Rng rng(71);
    const Eigen::MatrixXd X = random_matrix(12, 3, rng);
    Eigen::MatrixXd shifted = X;
    shifted.rowwise() += Eigen::RowVector3d(5.0, -2.0, 0.25);
    const KernelSpec spec = KernelSpec::rbf(1.3);
    CHECK((kernel_matrix(X, spec) - kernel_matrix(shifted, spec)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("linear kernel is the Gram matrix") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 0, 2;
    const Eigen::MatrixXd K = kernel_matrix(X, KernelSpec::linear());
    CHECK(K(0, 0) == doctest::Approx(1.0));
    CHECK(K(1, 1) == doctest::Approx(4.0));
    CHECK(K(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("centering matrix is idempotent") {
    const Eigen::MatrixXd H = centering_matrix(7);
    CHECK((H * H - H).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("double_center equals multiplication by H on both sides") {
    Rng rng(73);
    const Eigen::MatrixXd M = random_matrix(9, 9, rng);
    const Eigen::MatrixXd H = centering_matrix(9);
    CHECK((double_center(M) - H * M * H).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hsic of a constant kernel vanishes") {
    Rng rng(79);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 6);
    const Eigen::MatrixXd G = random_psd(6, rng);
    CHECK(hsic(ones, G) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("hsic of two identity kernels at n=2") {
    // direct evaluation of (1/n^2) Tr(K H G H): H is a projector, so the
    // trace is n-1 and the statistic (n-1)/n^2 = 1/4
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    CHECK(hsic(I, I) == doctest::Approx(0.25));
    CHECK(hsic_oracle(I, I) == doctest::Approx(0.25));
}

TEST_CASE("hsic is symmetric in its arguments") {
    Rng rng(83);
    const Eigen::MatrixXd K = random_psd(8, rng);
    const Eigen::MatrixXd G = random_psd(8, rng);
    CHECK(hsic(K, G) == doctest::Approx(hsic(G, K)).epsilon(1e-12));
    Eigen::MatrixXd small = random_psd(5, rng);
    CHECK_THROWS_AS(hsic(K, small), DataError);
}

TEST_CASE("hsic matches the expanded double-sum oracle") {
    Rng rng(89);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(25));
        const Eigen::MatrixXd K =
            kernel_matrix(random_matrix(n, 3, rng), KernelSpec::rbf(1.0));
        const Eigen::MatrixXd G =
            kernel_matrix(random_matrix(n, 2, rng), KernelSpec::rbf(0.8));
        CHECK(hsic(K, G) == doctest::Approx(hsic_oracle(K, G)).epsilon(1e-10));
    }
}

TEST_CASE("hsic is non-negative for PSD kernels") {
    Rng rng(97);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(20));
        const Eigen::MatrixXd K = kernel_matrix(random_matrix(n, 2, rng), KernelSpec::rbf(1.0));
        const Eigen::MatrixXd G = kernel_matrix(random_matrix(n, 2, rng), KernelSpec::rbf(1.0));
        CHECK(hsic(K, G) >= -1e-12);
    }
}

TEST_CASE("hsic is invariant under simultaneous row permutation") {
    Rng rng(101);
    const int n = 10;
    const Eigen::MatrixXd K = random_psd(n, rng);
    const Eigen::MatrixXd G = random_psd(n, rng);
    const std::vector<int> perm = random_permutation(n, rng);
    Eigen::MatrixXd Kp(n, n), Gp(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Kp(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = K(i, j);
            Gp(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = G(i, j);
        }
    CHECK(hsic(Kp, Gp) == doctest::Approx(hsic(K, G)).epsilon(1e-12));
}

TEST_CASE("hsic_test p-value hits the counting floor under total dependence") {
    Rng rng(103);
    const Eigen::MatrixXd X = random_matrix(30, 1, rng);
    const HsicTestResult r =
        hsic_test(X, X, KernelSpec::rbf(1.0), KernelSpec::rbf(1.0), 99, 5);
    CHECK(r.n_permutations == 99);
    CHECK(r.p_value == doctest::Approx(0.01));
    CHECK(r.reject);
}

TEST_CASE("hsic_test rejects degenerate inputs") {
    Rng rng(107);
    const Eigen::MatrixXd X = random_matrix(4, 1, rng);
    CHECK_THROWS_AS(hsic_test(X, X, KernelSpec::rbf(1.0), KernelSpec::rbf(1.0), 99, 0), DataError);
    const Eigen::MatrixXd Y = random_matrix(10, 1, rng);
    CHECK_THROWS_AS(hsic_test(Y, Y, KernelSpec::rbf(1.0), KernelSpec::rbf(1.0), 50, 0), DataError);
}

TEST_CASE("hsic_test is deterministic given the seed") {
    Rng rng(109);
    const Eigen::MatrixXd X = random_matrix(20, 2, rng);
    const Eigen::MatrixXd Z = random_matrix(20, 2, rng);
    const auto a = hsic_test(X, Z, KernelSpec::rbf(1.0), KernelSpec::rbf(1.0), 199, 77);
    const auto b = hsic_test(X, Z, KernelSpec::rbf(1.0), KernelSpec::rbf(1.0), 199, 77);
    CHECK(a.p_value == b.p_value);
    CHECK(a.statistic == b.statistic);
}

TEST_CASE("hsic_test type-I rate is near the nominal level on independent data") {
    // small-scale calibration; the acceptance suite runs the full protocol
    Rng rng(113);
    const int reps = 100;
    const int n = 40;
    int rejections = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const Eigen::MatrixXd X = random_matrix(n, 1, rng);
        const Eigen::MatrixXd Z = random_matrix(n, 1, rng);
        const auto r = hsic_test(X, Z, KernelSpec::rbf(median_heuristic_lengthscale(X)),
                                 KernelSpec::rbf(median_heuristic_lengthscale(Z)), 99,
                                 1000 + static_cast<std::uint64_t>(rep));
        if (r.reject) ++rejections;
    }
    // Binomial(100, 0.05): central 99.9% range is roughly [0, 14]
    CHECK(rejections <= 14);
}

TEST_CASE("bahsic with a single feature returns it untouched") {
    Rng rng(127);
    const Eigen::MatrixXd phi = random_matrix(20, 1, rng);
    const FeatureTable features = FeatureTable::from_matrix(phi);
    const Eigen::MatrixXd c_repr = random_psd(20, rng);
    const BahsicResult r = bahsic_select(features, c_repr, 1, KernelSpec::rbf(1.0));
    CHECK(r.retained == std::vector<int>{0});
    CHECK(r.trace.empty());
}

TEST_CASE("bahsic argument validation") {
    Rng rng(131);
    const FeatureTable features = FeatureTable::from_matrix(random_matrix(10, 3, rng));
    const Eigen::MatrixXd c_repr = random_psd(10, rng);
    CHECK_THROWS_AS(bahsic_select(features, c_repr, 0, KernelSpec::rbf(1.0)), DataError);
    CHECK_THROWS_AS(bahsic_select(features, c_repr, 4, KernelSpec::rbf(1.0)), DataError);
    CHECK_THROWS_AS(bahsic_select(features, random_psd(9, rng), 2, KernelSpec::rbf(1.0)), DataError);
}

namespace {

// one informative feature driving the comparisons, the rest noise
struct BahsicInstance {
    FeatureTable features;
    Eigen::MatrixXd c_repr;
};

BahsicInstance make_bahsic_instance(int n, int p, int informative, double noise, Rng& rng) {
    Eigen::VectorXd r = random_vector(n, rng);
    Eigen::MatrixXd phi(n, p);
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            phi(i, j) = j < informative ? r(i) + noise * rng.normal() : rng.normal();
        }
    }
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = i == j ? 0.0 : (r(i) > r(j) ? 1.0 : -1.0);
    const ComparisonGraph g = ComparisonGraph::from_matrix(C, ComparisonKind::ordinal);
    return {FeatureTable::from_matrix(phi), comparison_row_kernel(g)};
}

}  // namespace

TEST_CASE("bahsic keeps the informative feature across seeded runs") {
    int hits = 0;
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng(200 + static_cast<std::uint64_t>(seed));
        const BahsicInstance inst = make_bahsic_instance(60, 3, 1, 0.05, rng);
        const BahsicResult r = bahsic_select(inst.features, inst.c_repr, 1, KernelSpec::rbf(1.0));
        if (r.retained == std::vector<int>{0}) ++hits;
    }
    CHECK(hits >= 18);
}

TEST_CASE("bahsic with drop_fraction one removes everything in a single round") {
    Rng rng(137);
    const BahsicInstance inst = make_bahsic_instance(50, 4, 1, 0.05, rng);
    const BahsicResult r = bahsic_select(inst.features, inst.c_repr, 1, KernelSpec::rbf(1.0), 1.0);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0].removed.size() == 3);
    REQUIRE(r.retained.size() == 1);

    // brute force over the four singletons with the same kernel rule
    int best = -1;
    double best_h = -1.0;
    for (int j = 0; j < 4; ++j) {
        const Eigen::MatrixXd col = inst.features.matrix().col(j);
        const Eigen::MatrixXd K =
            kernel_matrix(col, KernelSpec::rbf(median_heuristic_lengthscale(col)));
        const double h = hsic_oracle(K, inst.c_repr);
        if (h > best_h) {
            best_h = h;
            best = j;
        }
    }
    CHECK(r.retained[0] == best);
}

TEST_CASE("comparison_row_kernel is a valid PSD kernel") {
    Rng rng(139);
    const ComparisonGraph g = random_graph(15, 0.5, ComparisonKind::ordinal, rng);
    const Eigen::MatrixXd G = comparison_row_kernel(g);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((G.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10);
}
