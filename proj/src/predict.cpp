#include "specrank/predict.hpp"

#include <cmath>

#include "specrank/errors.hpp"

namespace specrank {

namespace {

Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& X_new, const Eigen::MatrixXd& X_train,
                             const KernelSpec& spec) {
    if (spec.family == KernelFamily::linear) return X_new * X_train.transpose();
    if (spec.lengthscale <= 0.0) throw DataError("predict: stored rbf lengthscale is not positive");
    const Eigen::VectorXd sq_new = X_new.rowwise().squaredNorm();
    const Eigen::VectorXd sq_train = X_train.rowwise().squaredNorm();
    Eigen::MatrixXd D2 = sq_new.replicate(1, X_train.rows()) +
                         sq_train.transpose().replicate(X_new.rows(), 1) -
                         2.0 * (X_new * X_train.transpose());
    D2 = D2.cwiseMax(0.0);
    const double inv = 1.0 / (2.0 * spec.lengthscale * spec.lengthscale);
    return (-inv * D2.array()).exp();
}

}  // namespace

PredictionResult predict_unseen(const FittedModel& model, const Eigen::MatrixXd& phi_new,
                                bool combined) {
    if (!phi_new.allFinite()) throw DataError("predict: features contain non-finite entries");
    if (model.beta.size() > 0 && model.alpha.size() > 0)
        throw DataError("predict: model has both linear and kernel coefficients");

    PredictionResult pred;
    pred.orientation = model.orientation;

    if (model.is_linear()) {
        if (phi_new.cols() != model.beta.size())
            throw DataError("predict: feature count " + std::to_string(phi_new.cols()) +
                            " does not match model dimension " + std::to_string(model.beta.size()));
        if (model.feature_mean.size() != model.beta.size())
            throw DataError("predict: model is missing its training feature means");
        Eigen::MatrixXd centered = phi_new;
        centered.rowwise() -= model.feature_mean.transpose();
        pred.scores = centered * model.beta;
    } else if (model.alpha.size() > 0) {
        if (model.train_features.rows() != model.alpha.size())
            throw DataError("predict: model is missing its training features");
        if (phi_new.cols() != model.train_features.cols())
            throw DataError("predict: feature count " + std::to_string(phi_new.cols()) +
                            " does not match training feature count " +
                            std::to_string(model.train_features.cols()));
        if (model.kernel_col_means.size() != model.alpha.size())
            throw DataError("predict: model is missing its kernel centering statistics");
        const Eigen::MatrixXd K_new = cross_kernel(phi_new, model.train_features, model.kernel);
        Eigen::MatrixXd corrected = K_new;
        corrected.rowwise() -= model.kernel_col_means.transpose();
        pred.scores = corrected * model.alpha;
    } else {
        throw DataError("predict: model has no coefficients");
    }

    pred.ordering = ordering_from_scores(pred.oriented_scores());

    if (combined) {
        if (model.train_scores.size() == 0)
            throw DataError("predict: model is missing training scores for a combined ranking");
        Eigen::VectorXd all(model.train_scores.size() + pred.scores.size());
        all << model.train_scores, pred.scores;
        if (model.orientation == Orientation::reversed) all = -all;
        pred.combined_ordering = ordering_from_scores(all);
    }
    return pred;
}

double predict_upset_fraction(const ComparisonGraph& g_test, const PredictionResult& pred) {
    if (g_test.n() != pred.scores.size())
        throw DataError("predict_upset_fraction: graph size does not match prediction size");
    const int observed = g_test.observed_pair_count();
    if (observed == 0) throw DataError("predict_upset_fraction: no observed test pairs");
    return static_cast<double>(count_upsets(g_test, pred.oriented_scores())) / observed;
}

}  // namespace specrank
