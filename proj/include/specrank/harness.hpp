#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specrank/core_data.hpp"
#include "specrank/rankers.hpp"
#include "specrank/synth.hpp"

namespace specrank {

/// Hyperparameter search plan. Grids hold absolute values; the factory below
/// builds the default grids from the data scale.
struct CvPlan {
    int folds = 10;
    std::vector<double> lambda_grid;        // cserial trade-off
    std::vector<double> lengthscale_grid;   // rbf lengthscale
    std::uint64_t seed = 0;

    /// lambda grid {0, 1e-2, .., 1e2} scaled by n/trace(K) so the similarity
    /// and kernel terms are commensurate; lengthscale grid = median heuristic
    /// x {0.1, 0.25, 0.5, 1, 2, 4, 10}.
    static CvPlan default_plan(const ComparisonGraph& g, const FeatureTable& features,
                               int folds = 10, std::uint64_t seed = 0);
};

struct HyperParams {
    std::optional<double> lambda;
    std::optional<double> lengthscale;
};

struct CvCell {
    HyperParams params;
    double mean_upset_fraction = 0.0;
    std::vector<double> fold_scores;
};

struct CvResult {
    HyperParams best;
    double best_score = 0.0;
    std::vector<CvCell> cells;
    // the fold partition of the observed pairs, for audit
    std::vector<std::vector<std::pair<int, int>>> folds;
};

/// Match-level k-fold cross-validation: partitions the observed pairs,
/// refits with each fold zeroed out, scores by the upset fraction on the
/// held-out pairs, and returns the argmin cell. Ties break toward smaller
/// lambda, then smaller lengthscale. base carries the fixed options (kernel
/// family, epsilon, ...) each cell overlays its lambda/lengthscale onto.
CvResult cross_validate(const ComparisonGraph& g, const FeatureTable* features,
                        const std::string& algo, const CvPlan& plan,
                        const AlgoOptions& base = {});

struct ExperimentRecord {
    std::string algo;
    std::string noise_kind;
    double noise_level = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double kendall_tau = 0.0;
    double upset_fraction = 0.0;
    double wall_time_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct AggregateCell {
    std::string algo;
    std::string noise_kind;
    double noise_level = 0.0;
    double sigma = 0.0;
    double tau_mean = 0.0, tau_std = 0.0;
    double upset_mean = 0.0, upset_std = 0.0;
    int count = 0;   // successful runs
    int failed = 0;
};

struct ExperimentReport {
    std::vector<ExperimentRecord> records;
    /// Mean and sample standard deviation per (algo, noise_kind, level,
    /// sigma) over the non-failed records, sorted by key.
    std::vector<AggregateCell> aggregates() const;
    /// Mean kendall tau of the non-failed records in one cell.
    double mean_tau(const std::string& algo, double noise_level, double sigma) const;
    double mean_upset(const std::string& algo, double noise_level, double sigma) const;
};

struct SweepConfig {
    int n = 200;
    double sparsity = 0.05;
    NoiseKind noise = NoiseKind::none;
    ComparisonKind kind = ComparisonKind::cardinal;
    std::vector<double> levels = {0.0};
    std::vector<double> sigmas = {0.0};
    int seeds = 20;
    std::uint64_t base_seed = 0;
    bool tune = true;   // cross-validate hyperparameters per cell on the first seed's instance
    int cv_folds = 10;
};

/// Generate/corrupt/rank/score over the full (level, sigma, seed, algo) grid.
/// Instances are shared across algorithms seed by seed so comparisons are
/// paired; failures are recorded per cell rather than aborting the sweep.
ExperimentReport run_noise_sweep(const SweepConfig& cfg, const std::vector<std::string>& algos);

struct PredictionExperimentConfig {
    int repeats = 20;
    double split = 0.7;        // train fraction of items
    std::uint64_t seed = 0;
    AlgoOptions options;
};

/// Repeated item-level train/test splits: fit on the induced training
/// subgraph, predict the held-out items from their covariates, and report
/// the test-test upset fraction (and Kendall tau against r_true when ground
/// truth is available). Splits are shared across algorithms.
ExperimentReport run_prediction_experiment(const ComparisonGraph& g, const FeatureTable& features,
                                           const std::vector<std::string>& algos,
                                           const PredictionExperimentConfig& cfg,
                                           const Eigen::VectorXd* r_true = nullptr);

}  // namespace specrank
