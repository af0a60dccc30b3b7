#include "specrank/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "specrank/errors.hpp"

namespace specrank {

std::string to_string(ComparisonKind kind) {
    return kind == ComparisonKind::ordinal ? "ordinal" : "cardinal";
}

std::string to_string(Orientation o) {
    return o == Orientation::as_is ? "as_is" : "reversed";
}

ComparisonGraph ComparisonGraph::from_matrix(Eigen::MatrixXd C, ComparisonKind kind,
                                             std::vector<std::string> item_ids) {
    const auto n = C.rows();
    if (C.cols() != n) throw DataError("comparison matrix must be square");
    if (!C.allFinite()) throw DataError("comparison matrix contains non-finite entries");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (C(i, i) != 0.0) throw DataError("comparison matrix diagonal must be zero");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (C(i, j) != -C(j, i)) {
                throw DataError("comparison matrix is not antisymmetric at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    if (kind == ComparisonKind::ordinal) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (C(i, j) != 0.0 && C(i, j) != 1.0 && C(i, j) != -1.0)
                    throw DataError("ordinal comparison entries must lie in {-1,0,1}");
    }
    if (item_ids.empty()) {
        item_ids.resize(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) item_ids[static_cast<std::size_t>(i)] = std::to_string(i);
    } else if (item_ids.size() != static_cast<std::size_t>(n)) {
        throw DataError("item_ids length does not match matrix size");
    }
    return ComparisonGraph(std::move(C), kind, std::move(item_ids));
}

double ComparisonGraph::sparsity() const {
    const int total = n() * (n() - 1) / 2;
    return total == 0 ? 0.0 : static_cast<double>(observed_pair_count()) / total;
}

int ComparisonGraph::observed_pair_count() const {
    int count = 0;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j)
            if (C_(i, j) != 0.0) ++count;
    return count;
}

std::vector<std::pair<int, int>> ComparisonGraph::observed_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j)
            if (C_(i, j) != 0.0) pairs.emplace_back(i, j);
    return pairs;
}

Eigen::VectorXi ComparisonGraph::degrees() const {
    Eigen::VectorXi d = Eigen::VectorXi::Zero(n());
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j)
            if (C_(i, j) != 0.0) ++d(i);
    return d;
}

bool ComparisonGraph::connected() const {
    if (n() == 0) return true;
    std::vector<char> seen(static_cast<std::size_t>(n()), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v = 0; v < n(); ++v) {
            if (!seen[static_cast<std::size_t>(v)] && C_(u, v) != 0.0) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == n();
}

ComparisonGraph ComparisonGraph::signed_graph() const {
    Eigen::MatrixXd S = C_.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
    return ComparisonGraph(std::move(S), ComparisonKind::ordinal, item_ids_);
}

ComparisonGraph ComparisonGraph::with_zeroed_pairs(const std::vector<std::pair<int, int>>& pairs) const {
    Eigen::MatrixXd C = C_;
    for (const auto& [i, j] : pairs) {
        C(i, j) = 0.0;
        C(j, i) = 0.0;
    }
    return ComparisonGraph(std::move(C), kind_, item_ids_);
}

ComparisonGraph ComparisonGraph::induced_subgraph(const std::vector<int>& items) const {
    const int m = static_cast<int>(items.size());
    Eigen::MatrixXd C(m, m);
    std::vector<std::string> ids(items.size());
    for (int a = 0; a < m; ++a) {
        ids[static_cast<std::size_t>(a)] = item_ids_[static_cast<std::size_t>(items[static_cast<std::size_t>(a)])];
        for (int b = 0; b < m; ++b)
            C(a, b) = C_(items[static_cast<std::size_t>(a)], items[static_cast<std::size_t>(b)]);
    }
    return ComparisonGraph(std::move(C), kind_, std::move(ids));
}

FeatureTable FeatureTable::from_matrix(Eigen::MatrixXd phi, std::vector<std::string> column_names,
                                       std::vector<int> sensitive_columns) {
    if (!phi.allFinite()) throw DataError("feature matrix contains non-finite entries");
    const auto p = phi.cols();
    if (column_names.empty()) {
        column_names.resize(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) column_names[static_cast<std::size_t>(j)] = "f" + std::to_string(j);
    } else if (column_names.size() != static_cast<std::size_t>(p)) {
        throw DataError("column_names length does not match feature count");
    }
    for (int c : sensitive_columns)
        if (c < 0 || c >= p) throw DataError("sensitive column index out of range: " + std::to_string(c));
    return FeatureTable(std::move(phi), std::move(column_names), std::move(sensitive_columns));
}

Eigen::MatrixXd FeatureTable::sensitive_matrix() const {
    Eigen::MatrixXd Z(n(), static_cast<Eigen::Index>(sensitive_columns_.size()));
    for (std::size_t k = 0; k < sensitive_columns_.size(); ++k)
        Z.col(static_cast<Eigen::Index>(k)) = phi_.col(sensitive_columns_[k]);
    return Z;
}

FeatureTable FeatureTable::select_columns(const std::vector<int>& cols) const {
    Eigen::MatrixXd sub(n(), static_cast<Eigen::Index>(cols.size()));
    std::vector<std::string> names(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const int c = cols[k];
        if (c < 0 || c >= p()) throw DataError("column index out of range: " + std::to_string(c));
        sub.col(static_cast<Eigen::Index>(k)) = phi_.col(c);
        names[k] = column_names_[static_cast<std::size_t>(c)];
    }
    return FeatureTable(std::move(sub), std::move(names), {});
}

FeatureTable FeatureTable::select_rows(const std::vector<int>& rows) const {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), p());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const int r = rows[k];
        if (r < 0 || r >= n()) throw DataError("row index out of range: " + std::to_string(r));
        sub.row(static_cast<Eigen::Index>(k)) = phi_.row(r);
    }
    return FeatureTable(std::move(sub), column_names_, sensitive_columns_);
}

std::vector<int> RankResult::ranks() const {
    std::vector<int> r(ordering.size());
    for (std::size_t pos = 0; pos < ordering.size(); ++pos)
        r[static_cast<std::size_t>(ordering[pos])] = static_cast<int>(pos) + 1;
    return r;
}

Eigen::MatrixXd similarity_matrix(const ComparisonGraph& g) {
    if (g.kind() != ComparisonKind::ordinal)
        throw DataError("similarity_matrix requires an ordinal graph; apply signed_graph() to cardinal data first");
    const int n = g.n();
    const Eigen::MatrixXd& C = g.matrix();
    Eigen::MatrixXd S = 0.5 * (Eigen::MatrixXd::Constant(n, n, static_cast<double>(n)) + C * C.transpose());
    return S;
}

int count_upsets(const ComparisonGraph& g, const Eigen::VectorXd& scores) {
    if (scores.size() != g.n()) throw DataError("score vector length does not match item count");
    if (!scores.allFinite()) throw DataError("score vector contains non-finite entries");
    const Eigen::MatrixXd& C = g.matrix();
    int upsets = 0;
    for (int i = 0; i < g.n(); ++i) {
        for (int j = i + 1; j < g.n(); ++j) {
            if (C(i, j) == 0.0) continue;
            const double d = scores(i) - scores(j);
            if (d == 0.0) continue;
            if ((d > 0.0) != (C(i, j) > 0.0)) ++upsets;
        }
    }
    return upsets;
}

double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw DataError("kendall_tau requires equal-length vectors");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw DataError("kendall_tau requires at least two items");
    long long num = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double da = a(i) - a(j);
            const double db = b(i) - b(j);
            if (da == 0.0 || db == 0.0) continue;
            num += ((da > 0.0) == (db > 0.0)) ? 1 : -1;
        }
    }
    return static_cast<double>(num) / (static_cast<double>(n) * (n - 1) / 2.0);
}

std::vector<int> ordering_from_scores(const Eigen::VectorXd& scores) {
    std::vector<int> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        if (scores(i) != scores(j)) return scores(i) > scores(j);
        return i < j;
    });
    return order;
}

RankResult orient_ranking(const ComparisonGraph& g, const Eigen::VectorXd& scores) {
    if (scores.size() != g.n()) throw DataError("score vector length does not match item count");
    const int up_fwd = count_upsets(g, scores);
    const int up_rev = count_upsets(g, -scores);
    RankResult result;
    result.scores = scores;
    result.orientation = up_rev < up_fwd ? Orientation::reversed : Orientation::as_is;
    result.upsets = std::min(up_fwd, up_rev);
    const int observed = g.observed_pair_count();
    result.upset_fraction = observed == 0 ? 0.0 : static_cast<double>(result.upsets) / observed;
    result.ordering = ordering_from_scores(result.oriented_scores());
    return result;
}

Eigen::MatrixXd degree_normalize(const ComparisonGraph& g) {
    const Eigen::VectorXi d = g.degrees();
    for (int i = 0; i < g.n(); ++i) {
        if (d(i) == 0)
            throw DataError("item '" + g.item_ids()[static_cast<std::size_t>(i)] +
                            "' has no observed comparisons; cannot degree-normalise");
    }
    Eigen::MatrixXd Chat = g.matrix();
    for (int i = 0; i < g.n(); ++i) Chat.row(i) /= static_cast<double>(d(i));
    return Chat;
}

}  // namespace specrank
