#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specrank/core_data.hpp"
#include "specrank/harness.hpp"
#include "specrank/predict.hpp"
#include "specrank/rankers.hpp"
#include "specrank/synth.hpp"

namespace specrank {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

struct Dataset {
    ComparisonGraph graph;
    std::optional<FeatureTable> features;
};

/// Comparisons CSV: header `i,j,outcome`, one row per observed pair, ids as
/// strings. The item universe and its order come from first appearance in
/// the file; a pair listed twice (in either direction) is an error. The kind
/// is inferred (all outcomes in {-1,0,1} -> ordinal) unless overridden.
ComparisonGraph load_comparisons_csv(const std::filesystem::path& path,
                                     std::optional<ComparisonKind> kind_override = std::nullopt);

/// Features CSV: header `id,<name1>,...,<namep>`. When item_ids is non-empty
/// the rows are realigned to that order and the id sets must match exactly.
FeatureTable load_features_csv(const std::filesystem::path& path,
                               const std::vector<std::string>& item_ids,
                               const std::vector<std::string>& sensitive_names = {},
                               std::vector<std::string>* ids_out = nullptr);

Dataset load_dataset(const std::filesystem::path& comparisons,
                     const std::optional<std::filesystem::path>& features,
                     std::optional<ComparisonKind> kind_override = std::nullopt,
                     const std::vector<std::string>& sensitive_names = {});

void write_comparisons_csv(const std::filesystem::path& path, const ComparisonGraph& g);
void write_features_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                        const FeatureTable& features);
void write_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                     const Eigen::VectorXd& r_true);

/// `id,score,rank` rows sorted by rank (1 = best). The score column holds
/// the oriented score, so rank ascends as score descends.
void write_ranking_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                       const RankResult& result);
void write_prediction_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                          const PredictionResult& pred);

/// One record per row: algo,noise_kind,noise_level,sigma,seed,kendall_tau,
/// upset_fraction,wall_time_ms.
void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report);
void write_report_json(const std::filesystem::path& path, const ExperimentReport& report);

void save_model_json(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model_json(const std::filesystem::path& path);

}  // namespace specrank
