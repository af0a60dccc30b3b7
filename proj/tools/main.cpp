#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "specrank/errors.hpp"
#include "specrank/harness.hpp"
#include "specrank/io.hpp"
#include "specrank/kernels.hpp"
#include "specrank/predict.hpp"
#include "specrank/rankers.hpp"
#include "specrank/rng.hpp"
#include "specrank/synth.hpp"

namespace fs = std::filesystem;
using namespace specrank;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::optional<ComparisonKind> parse_kind(const std::string& kind) {
    if (kind == "auto") return std::nullopt;
    if (kind == "ordinal") return ComparisonKind::ordinal;
    if (kind == "cardinal") return ComparisonKind::cardinal;
    throw DataError("unknown kind '" + kind + "' (expected auto, ordinal or cardinal)");
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> split_doubles(const std::string& csv) {
    std::vector<double> out;
    for (const std::string& tok : split_list(csv)) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw DataError("cannot parse number '" + tok + "'");
        }
    }
    return out;
}

fs::path prepare_outdir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double denom = ac.norm() * bc.norm();
    return denom == 0.0 ? 0.0 : ac.dot(bc) / denom;
}

struct RankArgs {
    std::string comparisons, features, algo, kind = "auto", out = ".", kernel = "rbf";
    std::string sensitive, sensitive_kernel = "rbf";
    double lambda = std::nan("");
    double lengthscale = std::nan("");
    double epsilon = std::nan("");
    double fair_lambda = 0.0;
    int folds = 10;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_rank(const RankArgs& args) {
    const std::string algo = canonical_algo_name(args.algo);
    const std::optional<fs::path> feature_path =
        args.features.empty() ? std::nullopt : std::optional<fs::path>(args.features);
    const Dataset data =
        load_dataset(args.comparisons, feature_path, parse_kind(args.kind), split_list(args.sensitive));
    const FeatureTable* features = data.features ? &*data.features : nullptr;
    if (algo_needs_features(algo) && features == nullptr)
        throw DataError("algorithm '" + algo + "' requires --features");

    AlgoOptions opts;
    opts.kernel_family = kernel_family_from_string(args.kernel);
    opts.sensitive_family = kernel_family_from_string(args.sensitive_kernel);
    opts.fair_lambda = args.fair_lambda;
    if (!std::isnan(args.epsilon)) opts.epsilon = args.epsilon;

    const bool wants_lambda = algo == "cserial" && std::isnan(args.lambda);
    const bool wants_length =
        (algo == "cserial" || algo == "svdk" || algo == "svdkfair" || algo == "kcca") &&
        std::isnan(args.lengthscale) && opts.kernel_family == KernelFamily::rbf;
    if (!std::isnan(args.lambda)) opts.lambda = args.lambda;
    if (!std::isnan(args.lengthscale)) opts.lengthscale = args.lengthscale;

    // hyperparameters not pinned on the command line are tuned by match-level
    // cross-validation
    if ((wants_lambda || wants_length) && features != nullptr &&
        data.graph.observed_pair_count() >= args.folds) {
        CvPlan plan = CvPlan::default_plan(data.graph, *features, args.folds, args.seed);
        if (!wants_lambda && algo == "cserial") plan.lambda_grid = {opts.lambda};
        if (!wants_length) plan.lengthscale_grid = {opts.lengthscale};
        const CvResult cv = cross_validate(data.graph, features, algo, plan, opts);
        if (cv.best.lambda && wants_lambda) opts.lambda = *cv.best.lambda;
        if (cv.best.lengthscale && wants_length) opts.lengthscale = *cv.best.lengthscale;
        std::cout << "cv: ";
        if (cv.best.lambda) std::cout << "lambda=" << format_double(opts.lambda) << " ";
        if (cv.best.lengthscale) std::cout << "lengthscale=" << format_double(opts.lengthscale) << " ";
        std::cout << "held-out upset fraction " << format_double(cv.best_score) << "\n";
    }

    const AlgoOutput result = run_algorithm(algo, data.graph, features, opts);
    const fs::path dir = prepare_outdir(args.out);
    write_ranking_csv(dir / "ranking.csv", data.graph.item_ids(), result.result);
    if (result.model) save_model_json(dir / "model.json", *result.model);

    std::cout << "algo=" << algo << " n=" << data.graph.n()
              << " observed=" << data.graph.observed_pair_count()
              << " upsets=" << result.result.upsets << " upset_fraction="
              << format_double(result.result.upset_fraction)
              << " orientation=" << to_string(result.result.orientation);
    if (result.result.degenerate) std::cout << " (degenerate: no usable comparisons)";
    std::cout << "\nwrote " << (dir / "ranking.csv").string();
    if (result.model) std::cout << " and " << (dir / "model.json").string();
    std::cout << "\n";
    return 0;
}

struct PredictArgs {
    std::string model, features, comparisons, out = ".";
    bool combined = false;
};

int cmd_predict(const PredictArgs& args) {
    const FittedModel model = load_model_json(args.model);
    std::vector<std::string> new_ids;
    const FeatureTable table = load_features_csv(args.features, {}, {}, &new_ids);
    if (!model.feature_names.empty() && table.column_names() != model.feature_names)
        throw DataError("feature columns do not match the model (expected the training layout)");

    const PredictionResult pred = predict_unseen(model, table.matrix(), args.combined);
    const fs::path dir = prepare_outdir(args.out);
    write_prediction_csv(dir / "prediction.csv", new_ids, pred);
    std::cout << "predicted " << table.n() << " items with model algo=" << model.algo << "\n";

    if (args.combined && pred.combined_ordering) {
        std::vector<std::string> all_ids = model.train_ids;
        all_ids.insert(all_ids.end(), new_ids.begin(), new_ids.end());
        Eigen::VectorXd all_scores(model.train_scores.size() + pred.scores.size());
        all_scores << model.train_scores, pred.scores;
        PredictionResult combined;
        combined.scores = all_scores;
        combined.orientation = pred.orientation;
        combined.ordering = *pred.combined_ordering;
        write_prediction_csv(dir / "combined_ranking.csv", all_ids, combined);
        std::cout << "wrote " << (dir / "combined_ranking.csv").string() << "\n";
    }

    if (!args.comparisons.empty()) {
        ComparisonGraph g_test = load_comparisons_csv(args.comparisons);
        // align test graph to the prediction order
        if (g_test.item_ids() != new_ids) {
            std::vector<int> order;
            for (const std::string& id : new_ids) {
                const auto it = std::find(g_test.item_ids().begin(), g_test.item_ids().end(), id);
                if (it == g_test.item_ids().end())
                    throw DataError("test comparisons mention no item '" + id + "'");
                order.push_back(static_cast<int>(it - g_test.item_ids().begin()));
            }
            if (g_test.n() != static_cast<int>(new_ids.size()))
                throw DataError("test comparisons cover items outside the prediction set");
            g_test = g_test.induced_subgraph(order);
        }
        std::cout << "test upset fraction: "
                  << format_double(predict_upset_fraction(g_test, pred)) << "\n";
    }
    std::cout << "wrote " << (dir / "prediction.csv").string() << "\n";
    return 0;
}

struct SimulateArgs {
    int n = 200;
    double sparsity = 0.05;
    double sigma = 0.0;
    std::string noise = "none";
    double level = 0.0;
    std::string kind = "auto";
    std::string out = ".";
    std::uint64_t seed = kDefaultSeed;
};

int cmd_simulate(const SimulateArgs& args) {
    SynthConfig cfg;
    cfg.n = args.n;
    cfg.sparsity = args.sparsity;
    cfg.sigma = args.sigma;
    cfg.noise = noise_kind_from_string(args.noise);
    cfg.noise_level = args.level;
    cfg.seed = args.seed;
    if (args.kind == "auto")
        cfg.kind = cfg.noise == NoiseKind::flip ? ComparisonKind::ordinal : ComparisonKind::cardinal;
    else
        cfg.kind = *parse_kind(args.kind);

    Players players;
    const ComparisonGraph g = generate_dataset(cfg, &players);
    const FeatureTable features = synth_features(players);

    const fs::path dir = prepare_outdir(args.out);
    write_comparisons_csv(dir / "comparisons.csv", g);
    write_features_csv(dir / "features.csv", g.item_ids(), features);
    write_truth_csv(dir / "truth.csv", g.item_ids(), players.r_true);
    std::cout << "simulated n=" << cfg.n << " kind=" << to_string(cfg.kind)
              << " observed=" << g.observed_pair_count() << " sparsity="
              << format_double(g.sparsity()) << " noise=" << to_string(cfg.noise) << "("
              << format_double(cfg.noise_level) << ")\nwrote comparisons.csv, features.csv, "
              << "truth.csv in " << dir.string() << "\n";
    return 0;
}

struct SweepArgs {
    int n = 200;
    double sparsity = 0.05;
    std::string noise = "flip";
    std::string kind = "auto";
    std::string levels = "0,0.2,0.4";
    std::string sigmas = "0";
    std::string algos = "serial,cserial,svdn,svdc,svdk,kcca";
    int seeds = 20;
    int folds = 10;
    bool no_tune = false;
    std::string out = ".";
    std::uint64_t seed = kDefaultSeed;
};

int cmd_sweep(const SweepArgs& args) {
    SweepConfig cfg;
    cfg.n = args.n;
    cfg.sparsity = args.sparsity;
    cfg.noise = noise_kind_from_string(args.noise);
    if (args.kind == "auto")
        cfg.kind = cfg.noise == NoiseKind::flip ? ComparisonKind::ordinal : ComparisonKind::cardinal;
    else
        cfg.kind = *parse_kind(args.kind);
    cfg.levels = split_doubles(args.levels);
    cfg.sigmas = split_doubles(args.sigmas);
    cfg.seeds = args.seeds;
    cfg.base_seed = args.seed;
    cfg.tune = !args.no_tune;
    cfg.cv_folds = args.folds;

    const ExperimentReport report = run_noise_sweep(cfg, split_list(args.algos));
    const fs::path dir = prepare_outdir(args.out);
    write_report_csv(dir / "report.csv", report);
    write_report_json(dir / "report.json", report);

    int failed = 0;
    for (const auto& rec : report.records) failed += rec.failed ? 1 : 0;
    std::cout << "sweep finished: " << report.records.size() << " records (" << failed
              << " failed)\nwrote report.csv and report.json in " << dir.string() << "\n";
    return 0;
}

struct CvArgs {
    std::string comparisons, features, algo, kind = "auto", out = ".";
    int folds = 10;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_cv(const CvArgs& args) {
    const Dataset data = load_dataset(args.comparisons, fs::path(args.features), parse_kind(args.kind));
    const std::string algo = canonical_algo_name(args.algo);
    const CvPlan plan = CvPlan::default_plan(data.graph, *data.features, args.folds, args.seed);
    const CvResult cv = cross_validate(data.graph, &*data.features, algo, plan);

    const fs::path dir = prepare_outdir(args.out);
    std::ofstream out(dir / "cv.csv");
    if (!out) throw DataError("cannot open " + (dir / "cv.csv").string());
    out << "lambda,lengthscale,mean_upset_fraction\n";
    for (const CvCell& cell : cv.cells) {
        out << (cell.params.lambda ? format_double(*cell.params.lambda) : "") << ','
            << (cell.params.lengthscale ? format_double(*cell.params.lengthscale) : "") << ','
            << format_double(cell.mean_upset_fraction) << '\n';
    }
    std::cout << "best:";
    if (cv.best.lambda) std::cout << " lambda=" << format_double(*cv.best.lambda);
    if (cv.best.lengthscale) std::cout << " lengthscale=" << format_double(*cv.best.lengthscale);
    std::cout << " mean_upset_fraction=" << format_double(cv.best_score) << "\nwrote "
              << (dir / "cv.csv").string() << "\n";
    return 0;
}

struct SelectArgs {
    std::string comparisons, features, kind = "auto", out = ".";
    int target_k = 1;
    double drop_fraction = 0.1;
};

int cmd_select_features(const SelectArgs& args) {
    const Dataset data = load_dataset(args.comparisons, fs::path(args.features), parse_kind(args.kind));
    const Eigen::MatrixXd c_repr = comparison_row_kernel(data.graph);
    const BahsicResult result = bahsic_select(*data.features, c_repr, args.target_k,
                                              KernelSpec::rbf(1.0), args.drop_fraction, true);

    const fs::path dir = prepare_outdir(args.out);
    {
        std::ofstream out(dir / "selected_features.csv");
        if (!out) throw DataError("cannot open " + (dir / "selected_features.csv").string());
        out << "index,name\n";
        for (int idx : result.retained)
            out << idx << ',' << data.features->column_names()[static_cast<std::size_t>(idx)] << '\n';
    }
    {
        std::ofstream out(dir / "elimination.csv");
        if (!out) throw DataError("cannot open " + (dir / "elimination.csv").string());
        out << "round,index,name,hsic_after\n";
        for (std::size_t r = 0; r < result.trace.size(); ++r)
            for (int idx : result.trace[r].removed)
                out << r + 1 << ',' << idx << ','
                    << data.features->column_names()[static_cast<std::size_t>(idx)] << ','
                    << format_double(result.trace[r].hsic_after) << '\n';
    }
    std::cout << "retained " << result.retained.size() << " of " << data.features->p()
              << " features:";
    for (int idx : result.retained)
        std::cout << ' ' << data.features->column_names()[static_cast<std::size_t>(idx)];
    std::cout << "\nwrote selected_features.csv and elimination.csv in " << dir.string() << "\n";
    return 0;
}

struct HsicArgs {
    std::string comparisons, features, kind = "auto", out = ".";
    int n_perm = 500;
    double alpha = 0.05;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_hsic_test(const HsicArgs& args) {
    const Dataset data = load_dataset(args.comparisons, fs::path(args.features), parse_kind(args.kind));
    const Eigen::MatrixXd& phi = data.features->matrix();
    const Eigen::MatrixXd& C = data.graph.matrix();
    const HsicTestResult result = hsic_test(
        phi, C, KernelSpec::rbf(median_heuristic_lengthscale(phi)),
        KernelSpec::rbf(median_heuristic_lengthscale(C)), args.n_perm, args.seed, args.alpha);

    const fs::path dir = prepare_outdir(args.out);
    std::ofstream out(dir / "hsic_test.json");
    if (!out) throw DataError("cannot open " + (dir / "hsic_test.json").string());
    out << "{\n  \"statistic\": " << format_double(result.statistic)
        << ",\n  \"p_value\": " << format_double(result.p_value)
        << ",\n  \"n_permutations\": " << result.n_permutations
        << ",\n  \"alpha\": " << format_double(result.reject_at)
        << ",\n  \"reject\": " << (result.reject ? "true" : "false") << "\n}\n";
    std::cout << "hsic=" << format_double(result.statistic) << " p=" << format_double(result.p_value)
              << (result.reject ? " -> features and comparisons are dependent"
                                : " -> no evidence of dependence")
              << "\nwrote " << (dir / "hsic_test.json").string() << "\n";
    return 0;
}

struct FairArgs {
    std::string comparisons, features, sensitive, kind = "auto", out = ".";
    std::string sensitive_kernel = "rbf";
    double fair_lambda = 1e4;
    double lengthscale = std::nan("");
    std::uint64_t seed = kDefaultSeed;
};

int cmd_fair(const FairArgs& args) {
    const std::vector<std::string> sensitive_names = split_list(args.sensitive);
    if (sensitive_names.empty()) throw DataError("fair requires --sensitive column names");
    const Dataset data =
        load_dataset(args.comparisons, fs::path(args.features), parse_kind(args.kind), sensitive_names);

    AlgoOptions opts;
    if (!std::isnan(args.lengthscale)) opts.lengthscale = args.lengthscale;
    opts.sensitive_family = kernel_family_from_string(args.sensitive_kernel);

    AlgoOptions fair_opts = opts;
    fair_opts.fair_lambda = args.fair_lambda;

    const AlgoOutput base = run_algorithm("svdk", data.graph, &*data.features, opts);
    const AlgoOutput fair = run_algorithm("svdkfair", data.graph, &*data.features, fair_opts);

    const fs::path dir = prepare_outdir(args.out);
    std::ofstream out(dir / "fair.csv");
    if (!out) throw DataError("cannot open " + (dir / "fair.csv").string());
    out << "algo,fair_lambda,sensitive,abs_corr,upsets,upset_fraction\n";
    const Eigen::MatrixXd Z = data.features->sensitive_matrix();
    for (int which = 0; which < 2; ++which) {
        const AlgoOutput& run = which == 0 ? base : fair;
        const double lambda = which == 0 ? 0.0 : args.fair_lambda;
        const Eigen::VectorXd scores = run.result.oriented_scores();
        for (std::size_t k = 0; k < sensitive_names.size(); ++k) {
            out << (which == 0 ? "svdk" : "svdkfair") << ',' << format_double(lambda) << ','
                << sensitive_names[k] << ','
                << format_double(std::abs(pearson(scores, Z.col(static_cast<Eigen::Index>(k)))))
                << ',' << run.result.upsets << ',' << format_double(run.result.upset_fraction)
                << '\n';
        }
    }
    std::cout << "svdk     upsets=" << base.result.upsets << "\n"
              << "svdkfair upsets=" << fair.result.upsets << " (lambda="
              << format_double(args.fair_lambda) << ")\nwrote " << (dir / "fair.csv").string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "specrank — spectral ranking from pairwise comparisons with item covariates.\n"
        "Algorithms:\n"
        "  serial    seriation by the Fiedler vector of the match-similarity Laplacian\n"
        "  cserial   seriation on the similarity blended with a covariate kernel (lambda)\n"
        "  svd       top eigenvectors of C C^T on the centered subspace\n"
        "  svdn      svd on the degree-normalised comparison matrix\n"
        "  svdc      linear covariate model fitted to the comparison structure\n"
        "  svdk      kernelised covariate model (rbf/linear)\n"
        "  svdkfair  svdk with a statistical-parity penalty on sensitive features\n"
        "  kcca      maximally correlated embeddings of covariates and match outcomes\n"
        "  rc        rank centrality on similarity-adjusted win probabilities\n"};
    app.require_subcommand(1);

    RankArgs rank_args;
    auto* rank = app.add_subcommand("rank", "Rank items from a comparisons CSV");
    rank->add_option("--comparisons", rank_args.comparisons, "comparisons CSV (i,j,outcome)")
        ->required()
        ->check(CLI::ExistingFile);
    rank->add_option("--features", rank_args.features, "features CSV (id,<names...>)")
        ->check(CLI::ExistingFile);
    rank->add_option("--algo", rank_args.algo, "algorithm name")->required();
    rank->add_option("--kind", rank_args.kind, "comparison kind: auto|ordinal|cardinal");
    rank->add_option("--out", rank_args.out, "output directory");
    rank->add_option("--seed", rank_args.seed, "random seed");
    rank->add_option("--lambda", rank_args.lambda, "cserial trade-off (overrides CV)");
    rank->add_option("--lengthscale", rank_args.lengthscale, "rbf lengthscale (overrides CV)");
    rank->add_option("--kernel", rank_args.kernel, "kernel family: rbf|linear");
    rank->add_option("--epsilon", rank_args.epsilon, "kcca regulariser");
    rank->add_option("--fair-lambda", rank_args.fair_lambda, "svdkfair parity weight");
    rank->add_option("--sensitive", rank_args.sensitive, "comma-separated sensitive columns");
    rank->add_option("--sensitive-kernel", rank_args.sensitive_kernel,
                     "kernel on the sensitive columns: rbf|linear");
    rank->add_option("--folds", rank_args.folds, "CV folds");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Score unseen items with a saved model");
    predict->add_option("--model", predict_args.model, "model.json from rank")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--features", predict_args.features, "features CSV of the new items")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--comparisons", predict_args.comparisons,
                        "held-out comparisons among the new items (reports upset fraction)")
        ->check(CLI::ExistingFile);
    predict->add_option("--out", predict_args.out, "output directory");
    predict->add_flag("--combined", predict_args.combined, "also rank train+test items together");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset");
    simulate->add_option("--n", sim_args.n, "item count");
    simulate->add_option("--sparsity", sim_args.sparsity, "pair observation probability");
    simulate->add_option("--sigma", sim_args.sigma, "feature noise level");
    simulate->add_option("--noise", sim_args.noise, "none|flip|ero");
    simulate->add_option("--level", sim_args.level, "flip probability p / replacement probability eta");
    simulate->add_option("--kind", sim_args.kind, "auto|ordinal|cardinal");
    simulate->add_option("--out", sim_args.out, "output directory");
    simulate->add_option("--seed", sim_args.seed, "random seed");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Noise-grid benchmark over synthetic data");
    sweep->add_option("--n", sweep_args.n, "item count");
    sweep->add_option("--sparsity", sweep_args.sparsity, "pair observation probability");
    sweep->add_option("--noise", sweep_args.noise, "flip|ero|none");
    sweep->add_option("--kind", sweep_args.kind, "auto|ordinal|cardinal");
    sweep->add_option("--levels", sweep_args.levels, "comma-separated noise levels");
    sweep->add_option("--sigmas", sweep_args.sigmas, "comma-separated feature noise levels");
    sweep->add_option("--algos", sweep_args.algos, "comma-separated algorithms");
    sweep->add_option("--seeds", sweep_args.seeds, "seeds per cell");
    sweep->add_option("--folds", sweep_args.folds, "CV folds when tuning");
    sweep->add_flag("--no-tune", sweep_args.no_tune, "skip per-cell hyperparameter tuning");
    sweep->add_option("--out", sweep_args.out, "output directory");
    sweep->add_option("--seed", sweep_args.seed, "base seed");

    CvArgs cv_args;
    auto* cv = app.add_subcommand("cv", "Cross-validate hyperparameters on held-out matches");
    cv->add_option("--comparisons", cv_args.comparisons)->required()->check(CLI::ExistingFile);
    cv->add_option("--features", cv_args.features)->required()->check(CLI::ExistingFile);
    cv->add_option("--algo", cv_args.algo, "algorithm name")->required();
    cv->add_option("--kind", cv_args.kind, "auto|ordinal|cardinal");
    cv->add_option("--folds", cv_args.folds, "fold count");
    cv->add_option("--out", cv_args.out, "output directory");
    cv->add_option("--seed", cv_args.seed, "random seed");

    SelectArgs select_args;
    auto* select = app.add_subcommand("select-features",
                                      "Backward feature elimination by dependence on the matches");
    select->add_option("--comparisons", select_args.comparisons)->required()->check(CLI::ExistingFile);
    select->add_option("--features", select_args.features)->required()->check(CLI::ExistingFile);
    select->add_option("--target-k", select_args.target_k, "features to retain")->required();
    select->add_option("--drop-fraction", select_args.drop_fraction, "fraction removed per round");
    select->add_option("--kind", select_args.kind, "auto|ordinal|cardinal");
    select->add_option("--out", select_args.out, "output directory");

    HsicArgs hsic_args;
    auto* hsic_cmd = app.add_subcommand("hsic-test",
                                        "Permutation independence test: features vs match outcomes");
    hsic_cmd->add_option("--comparisons", hsic_args.comparisons)->required()->check(CLI::ExistingFile);
    hsic_cmd->add_option("--features", hsic_args.features)->required()->check(CLI::ExistingFile);
    hsic_cmd->add_option("--n-perm", hsic_args.n_perm, "permutation count");
    hsic_cmd->add_option("--alpha", hsic_args.alpha, "significance level");
    hsic_cmd->add_option("--kind", hsic_args.kind, "auto|ordinal|cardinal");
    hsic_cmd->add_option("--out", hsic_args.out, "output directory");
    hsic_cmd->add_option("--seed", hsic_args.seed, "random seed");

    FairArgs fair_args;
    auto* fair = app.add_subcommand("fair", "Compare svdk with its parity-regularised variant");
    fair->add_option("--comparisons", fair_args.comparisons)->required()->check(CLI::ExistingFile);
    fair->add_option("--features", fair_args.features)->required()->check(CLI::ExistingFile);
    fair->add_option("--sensitive", fair_args.sensitive, "comma-separated sensitive columns")
        ->required();
    fair->add_option("--fair-lambda", fair_args.fair_lambda, "parity weight");
    fair->add_option("--sensitive-kernel", fair_args.sensitive_kernel,
                     "kernel on the sensitive columns: rbf|linear");
    fair->add_option("--lengthscale", fair_args.lengthscale, "rbf lengthscale");
    fair->add_option("--kind", fair_args.kind, "auto|ordinal|cardinal");
    fair->add_option("--out", fair_args.out, "output directory");
    fair->add_option("--seed", fair_args.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (rank->parsed()) return cmd_rank(rank_args);
        if (predict->parsed()) return cmd_predict(predict_args);
        if (simulate->parsed()) return cmd_simulate(sim_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (cv->parsed()) return cmd_cv(cv_args);
        if (select->parsed()) return cmd_select_features(select_args);
        if (hsic_cmd->parsed()) return cmd_hsic_test(hsic_args);
        if (fair->parsed()) return cmd_fair(fair_args);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
