#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "specrank/errors.hpp"
#include "specrank/synth.hpp"
#include "test_support.hpp"

using namespace specrank;
using namespace testsupport;

TEST_CASE("skill function values") {
    CHECK(skill_function(0.5) == doctest::Approx(-1.375).epsilon(1e-12));
    CHECK(skill_function(0.0) == doctest::Approx(0.0));
    CHECK(skill_function(1.0) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("generate_players with zero noise evaluates the skill function exactly") {
    SynthConfig cfg;
    cfg.n = 50;
    cfg.sigma = 0.0;
    cfg.seed = 99;
    const Players players = generate_players(cfg);
    for (int i = 0; i < cfg.n; ++i) {
        CHECK(players.x(i) >= 0.0);
        CHECK(players.x(i) < 1.0);
        CHECK(players.r_true(i) == skill_function(players.x(i)));
    }
}

TEST_CASE("generate_players is deterministic and validates arguments") {
    SynthConfig cfg;
    cfg.n = 30;
    cfg.sigma = 0.5;
    cfg.seed = 7;
    const Players a = generate_players(cfg);
    const Players b = generate_players(cfg);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.r_true - b.r_true).cwiseAbs().maxCoeff() == 0.0);

    cfg.n = 1;
    CHECK_THROWS_AS(generate_players(cfg), DataError);
}

TEST_CASE("sample_graph with sparsity one is the complete tournament") {
    SynthConfig cfg;
    cfg.n = 12;
    cfg.sparsity = 1.0;
    cfg.kind = ComparisonKind::cardinal;
    cfg.seed = 3;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);
    CHECK(g.observed_pair_count() == 12 * 11 / 2);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if (i != j) CHECK(g.matrix()(i, j) == players.r_true(i) - players.r_true(j));
}

TEST_CASE("sample_graph ordinal entries are signs of score differences") {
    SynthConfig cfg;
    cfg.n = 20;
    cfg.sparsity = 0.5;
    cfg.kind = ComparisonKind::ordinal;
    cfg.seed = 5;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);
    CHECK(g.kind() == ComparisonKind::ordinal);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double v = g.matrix()(i, j);
            if (v == 0.0) continue;
            CHECK(v == (players.r_true(i) > players.r_true(j) ? 1.0 : -1.0));
        }
    CHECK_THROWS_AS(sample_graph(players.r_true, [&] {
                        SynthConfig bad = cfg;
                        bad.sparsity = 0.0;
                        return bad;
                    }()),
                    DataError);
}

TEST_CASE("realized sparsity is unbiased at production scale") {
    SynthConfig cfg;
    cfg.n = 1000;
    cfg.sparsity = 0.008;
    cfg.kind = ComparisonKind::cardinal;
    const int seeds = 100;
    const double pairs = cfg.n * (cfg.n - 1) / 2.0;
    double total = 0.0;
    for (int s = 0; s < seeds; ++s) {
        cfg.seed = 9000 + static_cast<std::uint64_t>(s);
        const Players players = generate_players(cfg);
        const ComparisonGraph g = sample_graph(players.r_true, cfg);
        total += g.observed_pair_count() / pairs;
        CHECK(g.connected());
    }
    const double mean = total / seeds;
    const double sigma_mean = std::sqrt(cfg.sparsity * (1 - cfg.sparsity) / (pairs * seeds));
    CHECK(std::abs(mean - cfg.sparsity) <= 3.0 * sigma_mean);
}

TEST_CASE("sample_graph repairs disconnected draws") {
    SynthConfig cfg;
    cfg.n = 200;
    cfg.sparsity = 0.004;  // far below the connectivity threshold
    cfg.kind = ComparisonKind::ordinal;
    int repaired_runs = 0;
    for (int s = 0; s < 10; ++s) {
        cfg.seed = 100 + static_cast<std::uint64_t>(s);
        const Players players = generate_players(cfg);
        int added = 0;
        const ComparisonGraph g = sample_graph(players.r_true, cfg, &added);
        CHECK(g.connected());
        if (added > 0) ++repaired_runs;
    }
    CHECK(repaired_runs > 0);  // the regime actually exercises the repair path
}

TEST_CASE("apply_flip endpoints") {
    SynthConfig cfg;
    cfg.n = 30;
    cfg.sparsity = 0.6;
    cfg.kind = ComparisonKind::ordinal;
    cfg.seed = 17;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);

    const ComparisonGraph same = apply_flip(g, 0.0, 1);
    CHECK((same.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);

    const ComparisonGraph negated = apply_flip(g, 1.0, 1);
    CHECK((negated.matrix() + g.matrix()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(apply_flip(g, 1.5, 1), DataError);
    const ComparisonGraph cardinal = rank2_graph(players.r_true.head(5));
    CHECK_THROWS_AS(apply_flip(cardinal, 0.5, 1), DataError);
}

TEST_CASE("apply_flip corrupts roughly the requested fraction") {
    SynthConfig cfg;
    cfg.n = 60;
    cfg.sparsity = 0.7;
    cfg.kind = ComparisonKind::ordinal;
    const double p = 0.3;
    long flipped = 0, observed = 0;
    for (int s = 0; s < 100; ++s) {
        cfg.seed = 300 + static_cast<std::uint64_t>(s);
        const Players players = generate_players(cfg);
        const ComparisonGraph g = sample_graph(players.r_true, cfg);
        const ComparisonGraph noisy = apply_flip(g, p, derive_seed(cfg.seed, 77));
        for (const auto& [i, j] : g.observed_pairs()) {
            ++observed;
            if (noisy.matrix()(i, j) != g.matrix()(i, j)) ++flipped;
        }
        CHECK(noisy.observed_pair_count() == g.observed_pair_count());
    }
    const double rate = static_cast<double>(flipped) / static_cast<double>(observed);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(observed));
    CHECK(std::abs(rate - p) <= 4.0 * sigma);
}

TEST_CASE("apply_ero endpoints, support and bounds") {
    SynthConfig cfg;
    cfg.n = 40;
    cfg.sparsity = 0.5;
    cfg.kind = ComparisonKind::cardinal;
    cfg.seed = 23;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);

    const ComparisonGraph same = apply_ero(g, 0.0, players.r_true, 1);
    CHECK((same.matrix() - g.matrix()).cwiseAbs().maxCoeff() == 0.0);

    const double magnitude = players.r_true.maxCoeff() - players.r_true.minCoeff();
    const ComparisonGraph noisy = apply_ero(g, 1.0, players.r_true, 2);
    CHECK(noisy.observed_pair_count() == g.observed_pair_count());
    CHECK(noisy.matrix().cwiseAbs().maxCoeff() <= magnitude);

    const ComparisonGraph ordinal = sample_graph(players.r_true, [&] {
        SynthConfig o = cfg;
        o.kind = ComparisonKind::ordinal;
        return o;
    }());
    CHECK_THROWS_AS(apply_ero(ordinal, 0.5, players.r_true, 1), DataError);
}

TEST_CASE("ero replacement magnitudes are uniform (KS test)") {
    SynthConfig cfg;
    cfg.n = 150;
    cfg.sparsity = 1.0;
    cfg.kind = ComparisonKind::cardinal;
    cfg.seed = 31;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);
    const double magnitude = players.r_true.maxCoeff() - players.r_true.minCoeff();
    const ComparisonGraph noisy = apply_ero(g, 1.0, players.r_true, 3);

    std::vector<double> samples;
    for (const auto& [i, j] : noisy.observed_pairs())
        samples.push_back(std::abs(noisy.matrix()(i, j)) / magnitude);
    REQUIRE(samples.size() >= 10000);
    std::sort(samples.begin(), samples.end());
    double d_stat = 0.0;
    const double m = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double ecdf_hi = (static_cast<double>(k) + 1.0) / m;
        const double ecdf_lo = static_cast<double>(k) / m;
        d_stat = std::max(d_stat, std::abs(ecdf_hi - samples[k]));
        d_stat = std::max(d_stat, std::abs(samples[k] - ecdf_lo));
    }
    // Kolmogorov critical value at alpha = 0.01
    CHECK(d_stat <= 1.628 / std::sqrt(m));
}

TEST_CASE("full pipeline is bit-reproducible from the seed") {
    SynthConfig cfg;
    cfg.n = 80;
    cfg.sparsity = 0.2;
    cfg.sigma = 0.4;
    cfg.kind = ComparisonKind::ordinal;
    cfg.noise = NoiseKind::flip;
    cfg.noise_level = 0.25;
    cfg.seed = 12345;
    Players pa, pb;
    const ComparisonGraph a = generate_dataset(cfg, &pa);
    const ComparisonGraph b = generate_dataset(cfg, &pb);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pa.x - pb.x).cwiseAbs().maxCoeff() == 0.0);

    // kind/noise mismatches are rejected
    SynthConfig bad = cfg;
    bad.kind = ComparisonKind::cardinal;
    CHECK_THROWS_AS(generate_dataset(bad), DataError);
    bad.kind = ComparisonKind::ordinal;
    bad.noise = NoiseKind::ero;
    CHECK_THROWS_AS(generate_dataset(bad), DataError);
}

TEST_CASE("noise application preserves antisymmetry and support") {
    SynthConfig cfg;
    cfg.n = 50;
    cfg.sparsity = 0.4;
    cfg.kind = ComparisonKind::cardinal;
    cfg.seed = 41;
    const Players players = generate_players(cfg);
    const ComparisonGraph g = sample_graph(players.r_true, cfg);
    const ComparisonGraph noisy = apply_ero(g, 0.5, players.r_true, 9);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            CHECK(noisy.matrix()(i, j) == -noisy.matrix()(j, i));
            CHECK((noisy.matrix()(i, j) != 0.0) == (g.matrix()(i, j) != 0.0));
        }
}
