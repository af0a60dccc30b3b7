#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specrank {

enum class ComparisonKind { ordinal, cardinal };
enum class Orientation { as_is, reversed };

std::string to_string(ComparisonKind kind);
std::string to_string(Orientation o);

/// Antisymmetric pairwise-outcome matrix over n items. Ordinal entries are
/// win/loss/draw in {-1,0,1}; cardinal entries are real score differences.
/// A zero entry means "draw or no match" — the two are not distinguished.
/// Immutable after construction.
class ComparisonGraph {
public:
    // Validates antisymmetry, zero diagonal and (for ordinal graphs) that
    // every entry is in {-1,0,1}. item_ids may be empty, in which case
    // "0".."n-1" are generated.
    static ComparisonGraph from_matrix(Eigen::MatrixXd C, ComparisonKind kind,
                                       std::vector<std::string> item_ids = {});

    int n() const { return static_cast<int>(C_.rows()); }
    ComparisonKind kind() const { return kind_; }
    const Eigen::MatrixXd& matrix() const { return C_; }
    const std::vector<std::string>& item_ids() const { return item_ids_; }

    /// Fraction of observed pairs among the n(n-1)/2 possible ones.
    double sparsity() const;
    int observed_pair_count() const;
    /// Upper-triangle (i<j) pairs with C[i,j] != 0.
    std::vector<std::pair<int, int>> observed_pairs() const;

    /// d_i = #{j : C[i,j] != 0}
    Eigen::VectorXi degrees() const;

    /// Connectivity of the undirected match graph.
    bool connected() const;

    /// Ordinal copy with entries sign(C[i,j]).
    ComparisonGraph signed_graph() const;

    /// Copy with the given pairs zeroed on both triangles (used to hold out
    /// matches during cross-validation).
    ComparisonGraph with_zeroed_pairs(const std::vector<std::pair<int, int>>& pairs) const;

    /// Induced subgraph on the given item indices, in the given order.
    ComparisonGraph induced_subgraph(const std::vector<int>& items) const;

private:
    ComparisonGraph(Eigen::MatrixXd C, ComparisonKind kind, std::vector<std::string> ids)
        : C_(std::move(C)), kind_(kind), item_ids_(std::move(ids)) {}

    Eigen::MatrixXd C_;
    ComparisonKind kind_;
    std::vector<std::string> item_ids_;
};

/// n x p covariate matrix with named columns; rows align with the item order
/// of the companion ComparisonGraph. sensitive_columns marks the columns
/// treated as protected attributes by the fairness-aware rankers.
class FeatureTable {
public:
    static FeatureTable from_matrix(Eigen::MatrixXd phi,
                                    std::vector<std::string> column_names = {},
                                    std::vector<int> sensitive_columns = {});

    int n() const { return static_cast<int>(phi_.rows()); }
    int p() const { return static_cast<int>(phi_.cols()); }
    const Eigen::MatrixXd& matrix() const { return phi_; }
    const std::vector<std::string>& column_names() const { return column_names_; }
    const std::vector<int>& sensitive_columns() const { return sensitive_columns_; }

    /// Submatrix of the sensitive columns, in stored order.
    Eigen::MatrixXd sensitive_matrix() const;

    /// Submatrix restricted to the given columns (original order preserved
    /// in the result's metadata).
    FeatureTable select_columns(const std::vector<int>& cols) const;

    /// Row subset in the given order.
    FeatureTable select_rows(const std::vector<int>& rows) const;

private:
    FeatureTable(Eigen::MatrixXd phi, std::vector<std::string> names, std::vector<int> sens)
        : phi_(std::move(phi)), column_names_(std::move(names)), sensitive_columns_(std::move(sens)) {}

    Eigen::MatrixXd phi_;
    std::vector<std::string> column_names_;
    std::vector<int> sensitive_columns_;
};

/// A real score vector together with the ordering it induces once the sign
/// has been chosen to minimise upsets. `ordering[0]` is the top item.
struct RankResult {
    Eigen::VectorXd scores;        // raw scores, before orientation
    std::vector<int> ordering;     // items sorted by oriented score, descending
    int upsets = 0;
    double upset_fraction = 0.0;
    Orientation orientation = Orientation::as_is;
    bool degenerate = false;       // set when the input carried no usable signal

    /// Score after applying the orientation (what the ordering sorts by).
    Eigen::VectorXd oriented_scores() const {
        return orientation == Orientation::reversed ? Eigen::VectorXd(-scores) : scores;
    }

    /// ranks()[i] is the 1-based rank of item i (1 = best).
    std::vector<int> ranks() const;
};

/// Match-agreement similarity S = (n 11^T + C C^T) / 2 for an ordinal graph.
/// S[i,j] counts comparisons on which i and j agree, counting an unplayed or
/// drawn pair as half an agreement. Cardinal graphs must be sign-converted
/// first (see ComparisonGraph::signed_graph).
Eigen::MatrixXd similarity_matrix(const ComparisonGraph& g);

/// Number of observed pairs whose outcome contradicts the score order.
/// A tied pair of scores is never an upset.
int count_upsets(const ComparisonGraph& g, const Eigen::VectorXd& scores);

/// Kendall tau-a: (concordant - discordant) / (n(n-1)/2). Ties contribute 0
/// to the numerator; the denominator is not adjusted.
double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Evaluates upsets for scores and -scores, keeps the lower count (as_is on a
/// tie) and fills every RankResult field.
RankResult orient_ranking(const ComparisonGraph& g, const Eigen::VectorXd& scores);

/// Degree-normalised comparison matrix D^{-1} C with d_i the number of
/// observed matches of item i. Errors on isolated items.
Eigen::MatrixXd degree_normalize(const ComparisonGraph& g);

/// Ordering induced by a score vector: descending scores, ties broken by
/// ascending item index.
std::vector<int> ordering_from_scores(const Eigen::VectorXd& scores);

}  // namespace specrank
