#include "specrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specrank/errors.hpp"
#include "specrank/rng.hpp"

namespace specrank {

namespace {

// rng stream ids for the pipeline stages
constexpr std::uint64_t kStreamPlayers = 11;
constexpr std::uint64_t kStreamGraph = 21;
constexpr std::uint64_t kStreamRepair = 22;
constexpr std::uint64_t kStreamNoise = 31;

double outcome_value(double ri, double rj, ComparisonKind kind) {
    if (kind == ComparisonKind::cardinal) return ri - rj;
    return ri > rj ? 1.0 : (ri < rj ? -1.0 : 0.0);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::none: return "none";
        case NoiseKind::flip: return "flip";
        case NoiseKind::ero: return "ero";
    }
    return "none";
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "none") return NoiseKind::none;
    if (s == "flip") return NoiseKind::flip;
    if (s == "ero") return NoiseKind::ero;
    throw DataError("unknown noise kind: " + s);
}

double skill_function(double x) {
    return std::sin(3.0 * M_PI * x) - 1.5 * x * x;
}

Players generate_players(const SynthConfig& cfg) {
    if (cfg.n < 2) throw DataError("generate_players requires n >= 2");
    if (cfg.sigma < 0.0) throw DataError("generate_players: sigma must be non-negative");
    Rng rng(derive_seed(cfg.seed, kStreamPlayers));
    Players players;
    players.x.resize(cfg.n);
    players.r_true.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) players.x(i) = rng.uniform();
    for (int i = 0; i < cfg.n; ++i)
        players.r_true(i) = skill_function(players.x(i)) + cfg.sigma * rng.normal();
    return players;
}

ComparisonGraph sample_graph(const Eigen::VectorXd& r_true, const SynthConfig& cfg,
                             int* augmented_edges) {
    if (!(cfg.sparsity > 0.0 && cfg.sparsity <= 1.0))
        throw DataError("sample_graph: sparsity must lie in (0, 1]");
    if (!r_true.allFinite()) throw DataError("sample_graph: r_true must be finite");
    const int n = static_cast<int>(r_true.size());

    Rng rng(derive_seed(cfg.seed, kStreamGraph));
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(cfg.sparsity)) {
                const double v = outcome_value(r_true(i), r_true(j), cfg.kind);
                C(i, j) = v;
                C(j, i) = -v;
                uf.unite(i, j);
            }

    // Connectivity repair: a random spanning forest across components.
    std::vector<std::vector<int>> components;
    {
        std::vector<int> root_to_comp(static_cast<std::size_t>(n), -1);
        for (int v = 0; v < n; ++v) {
            const int root = uf.find(v);
            if (root_to_comp[static_cast<std::size_t>(root)] < 0) {
                root_to_comp[static_cast<std::size_t>(root)] = static_cast<int>(components.size());
                components.emplace_back();
            }
            components[static_cast<std::size_t>(root_to_comp[static_cast<std::size_t>(root)])].push_back(v);
        }
    }
    int added = 0;
    if (components.size() > 1) {
        Rng repair(derive_seed(cfg.seed, kStreamRepair));
        repair.shuffle(components);
        std::vector<int> absorbed = components.front();
        for (std::size_t k = 1; k < components.size(); ++k) {
            const int u = absorbed[repair.below(absorbed.size())];
            const std::vector<int>& comp = components[k];
            const int v = comp[repair.below(comp.size())];
            const int i = std::min(u, v);
            const int j = std::max(u, v);
            const double val = outcome_value(r_true(i), r_true(j), cfg.kind);
            C(i, j) = val;
            C(j, i) = -val;
            ++added;
            absorbed.insert(absorbed.end(), comp.begin(), comp.end());
        }
    }
    if (augmented_edges != nullptr) *augmented_edges = added;
    return ComparisonGraph::from_matrix(std::move(C), cfg.kind);
}

ComparisonGraph apply_flip(const ComparisonGraph& g, double p, std::uint64_t seed) {
    if (g.kind() != ComparisonKind::ordinal)
        throw DataError("apply_flip requires an ordinal graph");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("apply_flip: p must lie in [0, 1]");
    Rng rng(seed);
    Eigen::MatrixXd C = g.matrix();
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j) {
            if (C(i, j) == 0.0) continue;
            if (rng.bernoulli(p)) {
                C(i, j) = -C(i, j);
                C(j, i) = -C(j, i);
            }
        }
    return ComparisonGraph::from_matrix(std::move(C), ComparisonKind::ordinal, g.item_ids());
}

ComparisonGraph apply_ero(const ComparisonGraph& g, double eta, const Eigen::VectorXd& r_true,
                          std::uint64_t seed) {
    if (g.kind() != ComparisonKind::cardinal)
        throw DataError("apply_ero requires a cardinal graph");
    if (!(eta >= 0.0 && eta <= 1.0)) throw DataError("apply_ero: eta must lie in [0, 1]");
    if (r_true.size() != g.n()) throw DataError("apply_ero: r_true length does not match item count");
    const double magnitude = r_true.maxCoeff() - r_true.minCoeff();
    Rng rng(seed);
    Eigen::MatrixXd C = g.matrix();
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j) {
            if (C(i, j) == 0.0) continue;
            if (rng.bernoulli(eta)) {
                double v = magnitude * rng.uniform(-1.0, 1.0);
                // keep the pair observed
                while (v == 0.0 && magnitude > 0.0) v = magnitude * rng.uniform(-1.0, 1.0);
                C(i, j) = v;
                C(j, i) = -v;
            }
        }
    return ComparisonGraph::from_matrix(std::move(C), ComparisonKind::cardinal, g.item_ids());
}

ComparisonGraph generate_dataset(const SynthConfig& cfg, Players* players_out) {
    if (cfg.noise == NoiseKind::flip && cfg.kind != ComparisonKind::ordinal)
        throw DataError("flip noise applies to ordinal graphs");
    if (cfg.noise == NoiseKind::ero && cfg.kind != ComparisonKind::cardinal)
        throw DataError("ero noise applies to cardinal graphs");
    Players players = generate_players(cfg);
    ComparisonGraph g = sample_graph(players.r_true, cfg);
    if (cfg.noise == NoiseKind::flip)
        g = apply_flip(g, cfg.noise_level, derive_seed(cfg.seed, kStreamNoise));
    else if (cfg.noise == NoiseKind::ero)
        g = apply_ero(g, cfg.noise_level, players.r_true, derive_seed(cfg.seed, kStreamNoise));
    if (players_out != nullptr) *players_out = std::move(players);
    return g;
}

FeatureTable synth_features(const Players& players) {
    Eigen::MatrixXd phi(players.x.size(), 1);
    phi.col(0) = players.x;
    return FeatureTable::from_matrix(std::move(phi), {"x"});
}

}  // namespace specrank
