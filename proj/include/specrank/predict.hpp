#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "specrank/core_data.hpp"
#include "specrank/rankers.hpp"

namespace specrank {

/// Scores for a batch of unseen items, ranked under the orientation the
/// model learned during training.
struct PredictionResult {
    Eigen::VectorXd scores;        // raw functional-form outputs
    std::vector<int> ordering;     // test items sorted by oriented score
    Orientation orientation = Orientation::as_is;
    // Ranking of train and test items together: indices 0..n_train-1 are the
    // training items, n_train.. are the new items. Present when requested.
    std::optional<std::vector<int>> combined_ordering;

    Eigen::VectorXd oriented_scores() const {
        return orientation == Orientation::reversed ? Eigen::VectorXd(-scores) : scores;
    }
};

/// Scores unseen items from their covariates alone. Linear models evaluate
/// (phi - mu_train)' beta; kernel models evaluate the alpha expansion with
/// the stored training-column centering correction, which makes re-scoring a
/// training row reproduce its training score.
PredictionResult predict_unseen(const FittedModel& model, const Eigen::MatrixXd& phi_new,
                                bool combined = false);

/// Fraction of observed test-test pairs the predicted ordering gets wrong.
double predict_upset_fraction(const ComparisonGraph& g_test, const PredictionResult& pred);

}  // namespace specrank
