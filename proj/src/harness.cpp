#include "specrank/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "specrank/errors.hpp"
#include "specrank/kernels.hpp"
#include "specrank/predict.hpp"
#include "specrank/rng.hpp"

namespace specrank {

CvPlan CvPlan::default_plan(const ComparisonGraph& g, const FeatureTable& features, int folds,
                            std::uint64_t seed) {
    CvPlan plan;
    plan.folds = folds;
    plan.seed = seed;
    const double med = median_heuristic_lengthscale(features.matrix());
    for (double m : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0}) plan.lengthscale_grid.push_back(m * med);
    const Eigen::MatrixXd K = kernel_matrix(features.matrix(), KernelSpec::rbf(med));
    const double scale = static_cast<double>(g.n()) / K.trace();
    for (double l : {0.0, 1e-2, 1e-1, 1.0, 10.0, 100.0}) plan.lambda_grid.push_back(l * scale);
    return plan;
}

namespace {

bool algo_uses_lambda(const std::string& algo) { return algo == "cserial"; }

bool algo_uses_lengthscale(const std::string& algo) {
    return algo == "cserial" || algo == "svdk" || algo == "svdkfair" || algo == "kcca";
}

AlgoOptions options_from(const HyperParams& hp, const AlgoOptions& base) {
    AlgoOptions opts = base;
    if (hp.lambda) opts.lambda = *hp.lambda;
    if (hp.lengthscale) opts.lengthscale = *hp.lengthscale;
    return opts;
}

double held_out_upset_fraction(const ComparisonGraph& g,
                               const std::vector<std::pair<int, int>>& held,
                               const RankResult& fit) {
    const Eigen::VectorXd s = fit.oriented_scores();
    const Eigen::MatrixXd& C = g.matrix();
    int upsets = 0;
    for (const auto& [i, j] : held) {
        const double d = s(i) - s(j);
        if (d == 0.0) continue;
        if ((d > 0.0) != (C(i, j) > 0.0)) ++upsets;
    }
    return static_cast<double>(upsets) / static_cast<double>(held.size());
}

}  // namespace

CvResult cross_validate(const ComparisonGraph& g, const FeatureTable* features,
                        const std::string& algo_in, const CvPlan& plan, const AlgoOptions& base) {
    const std::string algo = canonical_algo_name(algo_in);
    if (plan.folds < 2) throw DataError("cross_validate: need at least 2 folds");
    std::vector<std::pair<int, int>> pairs = g.observed_pairs();
    if (static_cast<int>(pairs.size()) < plan.folds)
        throw DataError("cross_validate: fewer observed matches than folds");

    Rng rng(derive_seed(plan.seed, 101));
    rng.shuffle(pairs);
    std::vector<std::vector<std::pair<int, int>>> folds(static_cast<std::size_t>(plan.folds));
    for (std::size_t k = 0; k < pairs.size(); ++k)
        folds[k % static_cast<std::size_t>(plan.folds)].push_back(pairs[k]);
    for (const auto& fold : folds)
        if (fold.empty()) throw DataError("cross_validate: a fold has zero matches");

    // Cell grid: cartesian product of the grids the algorithm actually uses.
    std::vector<HyperParams> cells;
    const bool use_lambda = algo_uses_lambda(algo);
    const bool use_length = algo_uses_lengthscale(algo);
    if (use_lambda && plan.lambda_grid.empty()) throw DataError("cross_validate: empty lambda grid");
    if (use_length && plan.lengthscale_grid.empty())
        throw DataError("cross_validate: empty lengthscale grid");
    if (use_lambda && use_length) {
        for (double l : plan.lambda_grid)
            for (double d : plan.lengthscale_grid) cells.push_back({l, d});
    } else if (use_length) {
        for (double d : plan.lengthscale_grid) cells.push_back({std::nullopt, d});
    } else {
        cells.push_back({});
    }

    // Train each fold once per cell; the fold graphs are shared across cells.
    std::vector<ComparisonGraph> train_graphs;
    train_graphs.reserve(folds.size());
    for (const auto& fold : folds) train_graphs.push_back(g.with_zeroed_pairs(fold));

    CvResult result;
    result.folds = folds;
    result.cells.reserve(cells.size());
    bool have_best = false;
    for (const HyperParams& hp : cells) {
        CvCell cell;
        cell.params = hp;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const AlgoOutput fit =
                run_algorithm(algo, train_graphs[f], features, options_from(hp, base));
            cell.fold_scores.push_back(held_out_upset_fraction(g, folds[f], fit.result));
        }
        cell.mean_upset_fraction =
            std::accumulate(cell.fold_scores.begin(), cell.fold_scores.end(), 0.0) /
            static_cast<double>(cell.fold_scores.size());
        // strict improvement only: grid order already prefers small lambda,
        // then small lengthscale
        if (!have_best || cell.mean_upset_fraction < result.best_score) {
            result.best = hp;
            result.best_score = cell.mean_upset_fraction;
            have_best = true;
        }
        result.cells.push_back(std::move(cell));
    }
    return result;
}

std::vector<AggregateCell> ExperimentReport::aggregates() const {
    std::map<std::tuple<std::string, std::string, double, double>, std::vector<const ExperimentRecord*>>
        groups;
    for (const ExperimentRecord& rec : records)
        groups[{rec.algo, rec.noise_kind, rec.noise_level, rec.sigma}].push_back(&rec);

    std::vector<AggregateCell> cells;
    cells.reserve(groups.size());
    for (const auto& [key, recs] : groups) {
        AggregateCell cell;
        std::tie(cell.algo, cell.noise_kind, cell.noise_level, cell.sigma) = key;
        double tau_sum = 0.0, upset_sum = 0.0;
        for (const ExperimentRecord* r : recs) {
            if (r->failed) {
                ++cell.failed;
                continue;
            }
            ++cell.count;
            tau_sum += r->kendall_tau;
            upset_sum += r->upset_fraction;
        }
        if (cell.count > 0) {
            cell.tau_mean = tau_sum / cell.count;
            cell.upset_mean = upset_sum / cell.count;
            double tau_var = 0.0, upset_var = 0.0;
            for (const ExperimentRecord* r : recs) {
                if (r->failed) continue;
                tau_var += (r->kendall_tau - cell.tau_mean) * (r->kendall_tau - cell.tau_mean);
                upset_var += (r->upset_fraction - cell.upset_mean) * (r->upset_fraction - cell.upset_mean);
            }
            if (cell.count > 1) {
                cell.tau_std = std::sqrt(tau_var / (cell.count - 1));
                cell.upset_std = std::sqrt(upset_var / (cell.count - 1));
            }
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

double ExperimentReport::mean_tau(const std::string& algo, double noise_level, double sigma) const {
    double sum = 0.0;
    int count = 0;
    for (const ExperimentRecord& r : records) {
        if (r.failed || r.algo != algo || r.noise_level != noise_level || r.sigma != sigma) continue;
        sum += r.kendall_tau;
        ++count;
    }
    if (count == 0) throw DataError("mean_tau: no records for cell");
    return sum / count;
}

double ExperimentReport::mean_upset(const std::string& algo, double noise_level, double sigma) const {
    double sum = 0.0;
    int count = 0;
    for (const ExperimentRecord& r : records) {
        if (r.failed || r.algo != algo || r.noise_level != noise_level || r.sigma != sigma) continue;
        sum += r.upset_fraction;
        ++count;
    }
    if (count == 0) throw DataError("mean_upset: no records for cell");
    return sum / count;
}

ExperimentReport run_noise_sweep(const SweepConfig& cfg, const std::vector<std::string>& algos) {
    std::vector<std::string> names;
    names.reserve(algos.size());
    for (const std::string& a : algos) names.push_back(canonical_algo_name(a));

    ExperimentReport report;
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
            const double level = cfg.levels[li];
            const double sigma = cfg.sigmas[si];

            SynthConfig base;
            base.n = cfg.n;
            base.sparsity = cfg.sparsity;
            base.sigma = sigma;
            base.noise = cfg.noise;
            base.noise_level = level;
            base.kind = cfg.kind;

            const std::uint64_t cell_stream = li * 100000 + si * 1000;

            // Hyperparameters tuned once per cell, on the first seed's
            // instance, then applied to every seed.
            std::map<std::string, AlgoOptions> tuned;
            {
                SynthConfig first = base;
                first.seed = derive_seed(cfg.base_seed, cell_stream);
                Players players;
                const ComparisonGraph g0 = generate_dataset(first, &players);
                const FeatureTable f0 = synth_features(players);
                for (const std::string& algo : names) {
                    AlgoOptions opts;
                    if (cfg.tune && (algo_uses_lambda(algo) || algo_uses_lengthscale(algo))) {
                        try {
                            CvPlan plan = CvPlan::default_plan(g0, f0, cfg.cv_folds, first.seed);
                            const CvResult cv = cross_validate(g0, &f0, algo, plan);
                            if (cv.best.lambda) opts.lambda = *cv.best.lambda;
                            if (cv.best.lengthscale) opts.lengthscale = *cv.best.lengthscale;
                        } catch (const std::exception&) {
                            // fall back to defaults (median heuristic, lambda = 1)
                        }
                    }
                    tuned[algo] = opts;
                }
            }

            for (int s = 0; s < cfg.seeds; ++s) {
                SynthConfig inst = base;
                inst.seed = derive_seed(cfg.base_seed, cell_stream + static_cast<std::uint64_t>(s));
                Players players;
                const ComparisonGraph g = generate_dataset(inst, &players);
                const FeatureTable features = synth_features(players);

                for (const std::string& algo : names) {
                    ExperimentRecord rec;
                    rec.algo = algo;
                    rec.noise_kind = to_string(cfg.noise);
                    rec.noise_level = level;
                    rec.sigma = sigma;
                    rec.seed = inst.seed;
                    const auto start = std::chrono::steady_clock::now();
                    try {
                        const AlgoOutput out = run_algorithm(algo, g, &features, tuned[algo]);
                        rec.kendall_tau = kendall_tau(out.result.oriented_scores(), players.r_true);
                        rec.upset_fraction = out.result.upset_fraction;
                    } catch (const std::exception& e) {
                        rec.failed = true;
                        rec.error = e.what();
                    }
                    const auto stop = std::chrono::steady_clock::now();
                    rec.wall_time_ms =
                        std::chrono::duration<double, std::milli>(stop - start).count();
                    report.records.push_back(std::move(rec));
                }
            }
        }
    }

    std::stable_sort(report.records.begin(), report.records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) {
                         return std::tie(a.algo, a.noise_kind, a.noise_level, a.sigma, a.seed) <
                                std::tie(b.algo, b.noise_kind, b.noise_level, b.sigma, b.seed);
                     });
    return report;
}

ExperimentReport run_prediction_experiment(const ComparisonGraph& g, const FeatureTable& features,
                                           const std::vector<std::string>& algos,
                                           const PredictionExperimentConfig& cfg,
                                           const Eigen::VectorXd* r_true) {
    if (!(cfg.split > 0.0 && cfg.split < 1.0))
        throw DataError("run_prediction_experiment: split must lie in (0, 1)");
    std::vector<std::string> names;
    for (const std::string& a : algos) {
        const std::string canon = canonical_algo_name(a);
        if (!algo_supports_prediction(canon))
            throw DataError("algorithm '" + canon + "' cannot predict unseen items");
        names.push_back(canon);
    }

    const int n = g.n();
    const int n_train = std::max(1, static_cast<int>(std::floor(cfg.split * n)));
    if (n_train >= n) throw DataError("run_prediction_experiment: test split is empty");

    ExperimentReport report;
    for (int rep = 0; rep < cfg.repeats; ++rep) {
        // one split per repeat, shared by every algorithm
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(cfg.seed, 500 + static_cast<std::uint64_t>(rep)));
        rng.shuffle(order);
        const std::vector<int> train_items(order.begin(), order.begin() + n_train);
        const std::vector<int> test_items(order.begin() + n_train, order.end());

        const ComparisonGraph g_train = g.induced_subgraph(train_items);
        if (g_train.observed_pair_count() == 0)
            throw DataError("run_prediction_experiment: induced training subgraph has no matches");
        const ComparisonGraph g_test = g.induced_subgraph(test_items);
        const FeatureTable f_train = features.select_rows(train_items);
        const FeatureTable f_test = features.select_rows(test_items);

        for (const std::string& algo : names) {
            ExperimentRecord rec;
            rec.algo = algo;
            rec.noise_kind = "split";
            rec.noise_level = cfg.split;
            rec.seed = static_cast<std::uint64_t>(rep);
            const auto start = std::chrono::steady_clock::now();
            try {
                const AlgoOutput fit = run_algorithm(algo, g_train, &f_train, cfg.options);
                if (!fit.model) throw NumericalError("fit produced no model");
                const PredictionResult pred = predict_unseen(*fit.model, f_test.matrix());
                rec.upset_fraction = g_test.observed_pair_count() > 0
                                         ? predict_upset_fraction(g_test, pred)
                                         : 0.0;
                if (r_true != nullptr) {
                    Eigen::VectorXd truth(static_cast<Eigen::Index>(test_items.size()));
                    for (std::size_t k = 0; k < test_items.size(); ++k)
                        truth(static_cast<Eigen::Index>(k)) = (*r_true)(test_items[k]);
                    rec.kendall_tau = kendall_tau(pred.oriented_scores(), truth);
                } else {
                    rec.kendall_tau = std::numeric_limits<double>::quiet_NaN();
                }
            } catch (const std::exception& e) {
                rec.failed = true;
                rec.error = e.what();
            }
            const auto stop = std::chrono::steady_clock::now();
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            report.records.push_back(std::move(rec));
        }
    }

    std::stable_sort(report.records.begin(), report.records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) {
                         return std::tie(a.algo, a.noise_kind, a.noise_level, a.sigma, a.seed) <
                                std::tie(b.algo, b.noise_kind, b.noise_level, b.sigma, b.seed);
                     });
    return report;
}

}  // namespace specrank
