#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "specrank/core_data.hpp"

namespace specrank {

enum class NoiseKind { none, flip, ero };

std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

struct SynthConfig {
    int n = 1000;
    double sparsity = 0.008;        // pair observation probability, in (0, 1]
    double sigma = 0.0;             // feature-noise standard deviation
    NoiseKind noise = NoiseKind::none;
    double noise_level = 0.0;       // flip probability p or replacement probability eta
    ComparisonKind kind = ComparisonKind::cardinal;
    std::uint64_t seed = 0;
};

/// Latent skill as a function of the 1-D covariate: sin(3 pi x) - 1.5 x^2.
double skill_function(double x);

struct Players {
    Eigen::VectorXd x;       // covariates, uniform on [0,1]
    Eigen::VectorXd r_true;  // skill_function(x) + sigma * N(0,1)
};

Players generate_players(const SynthConfig& cfg);

/// Observes each unordered pair independently with probability cfg.sparsity
/// and fills outcomes from r_true (sign for ordinal, difference for
/// cardinal). A disconnected draw is repaired by a random spanning forest
/// across its components; augmented_edges reports how many were added.
ComparisonGraph sample_graph(const Eigen::VectorXd& r_true, const SynthConfig& cfg,
                             int* augmented_edges = nullptr);

/// Negates each observed ordinal outcome independently with probability p.
ComparisonGraph apply_flip(const ComparisonGraph& g, double p, std::uint64_t seed);

/// Replaces each observed cardinal outcome independently with probability
/// eta by M*U, U ~ U[-1,1], with M the largest score difference over all
/// pairs.
ComparisonGraph apply_ero(const ComparisonGraph& g, double eta, const Eigen::VectorXd& r_true,
                          std::uint64_t seed);

/// Players + graph + configured noise in one deterministic pipeline.
ComparisonGraph generate_dataset(const SynthConfig& cfg, Players* players_out = nullptr);

/// The covariate view of a synthetic run: the single column x.
FeatureTable synth_features(const Players& players);

}  // namespace specrank
