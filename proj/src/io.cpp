#include "specrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "specrank/errors.hpp"

namespace specrank {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& raw, const std::filesystem::path& path, int line_no) {
    const std::string s = strip(raw);
    double value = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" +
                        raw + "'");
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open file for writing: " + path.string());
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

ComparisonGraph load_comparisons_csv(const std::filesystem::path& path,
                                     std::optional<ComparisonKind> kind_override) {
    std::ifstream in = open_input(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    ++line_no;
    const std::vector<std::string> header = split_csv_line(strip(line));
    if (header.size() != 3 || strip(header[0]) != "i" || strip(header[1]) != "j" ||
        strip(header[2]) != "outcome")
        throw DataError(path.string() + ": expected header 'i,j,outcome'");

    std::vector<std::string> ids;
    std::map<std::string, int> index_of;
    auto intern = [&](const std::string& id) {
        const auto it = index_of.find(id);
        if (it != index_of.end()) return it->second;
        const int idx = static_cast<int>(ids.size());
        ids.push_back(id);
        index_of.emplace(id, idx);
        return idx;
    };

    struct Row {
        int i, j;
        double outcome;
    };
    std::vector<Row> rows;
    std::set<std::pair<int, int>> seen;
    bool all_ordinal = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 3 fields, got " + std::to_string(fields.size()));
        const int a = intern(strip(fields[0]));
        const int b = intern(strip(fields[1]));
        if (a == b)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": self-comparison for id '" + strip(fields[0]) + "'");
        const double outcome = parse_double(fields[2], path, line_no);
        const auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": duplicate pair '" +
                            strip(fields[0]) + "," + strip(fields[1]) + "'");
        if (outcome != 0.0 && outcome != 1.0 && outcome != -1.0) all_ordinal = false;
        rows.push_back({a, b, outcome});
    }

    const ComparisonKind kind =
        kind_override.value_or(all_ordinal ? ComparisonKind::ordinal : ComparisonKind::cardinal);
    if (kind == ComparisonKind::ordinal && !all_ordinal)
        throw DataError(path.string() + ": ordinal kind requested but outcomes outside {-1,0,1}");

    const int n = static_cast<int>(ids.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (const Row& r : rows) {
        C(r.i, r.j) = r.outcome;
        C(r.j, r.i) = -r.outcome;
    }
    return ComparisonGraph::from_matrix(std::move(C), kind, std::move(ids));
}

FeatureTable load_features_csv(const std::filesystem::path& path,
                               const std::vector<std::string>& item_ids,
                               const std::vector<std::string>& sensitive_names,
                               std::vector<std::string>* ids_out) {
    std::ifstream in = open_input(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    ++line_no;
    std::vector<std::string> header = split_csv_line(strip(line));
    if (header.size() < 2 || strip(header[0]) != "id")
        throw DataError(path.string() + ": expected header 'id,<name1>,...'");
    std::vector<std::string> names(header.begin() + 1, header.end());
    for (std::string& n : names) n = strip(n);

    std::vector<std::string> file_ids;
    std::vector<std::vector<double>> values;
    std::map<std::string, int> row_of;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        const std::string id = strip(fields[0]);
        if (row_of.count(id))
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
        row_of.emplace(id, static_cast<int>(file_ids.size()));
        file_ids.push_back(id);
        std::vector<double> row;
        row.reserve(names.size());
        for (std::size_t k = 1; k < fields.size(); ++k)
            row.push_back(parse_double(fields[k], path, line_no));
        values.push_back(std::move(row));
    }

    std::vector<int> order;
    if (item_ids.empty()) {
        order.resize(file_ids.size());
        std::iota(order.begin(), order.end(), 0);
    } else {
        for (const std::string& id : item_ids) {
            const auto it = row_of.find(id);
            if (it == row_of.end())
                throw DataError(path.string() + ": missing features for id '" + id + "'");
            order.push_back(it->second);
        }
        if (file_ids.size() != item_ids.size()) {
            std::set<std::string> wanted(item_ids.begin(), item_ids.end());
            for (const std::string& id : file_ids)
                if (!wanted.count(id))
                    throw DataError(path.string() + ": unknown id '" + id +
                                    "' not present in the comparisons");
        }
    }

    Eigen::MatrixXd phi(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t r = 0; r < order.size(); ++r)
        for (std::size_t c = 0; c < names.size(); ++c)
            phi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                values[static_cast<std::size_t>(order[r])][c];

    std::vector<int> sensitive;
    for (const std::string& s : sensitive_names) {
        const auto it = std::find(names.begin(), names.end(), s);
        if (it == names.end())
            throw DataError(path.string() + ": sensitive column '" + s + "' not found");
        sensitive.push_back(static_cast<int>(it - names.begin()));
    }

    if (ids_out != nullptr) {
        ids_out->clear();
        for (int r : order) ids_out->push_back(file_ids[static_cast<std::size_t>(r)]);
    }
    return FeatureTable::from_matrix(std::move(phi), std::move(names), std::move(sensitive));
}

Dataset load_dataset(const std::filesystem::path& comparisons,
                     const std::optional<std::filesystem::path>& features,
                     std::optional<ComparisonKind> kind_override,
                     const std::vector<std::string>& sensitive_names) {
    ComparisonGraph g = load_comparisons_csv(comparisons, kind_override);
    std::optional<FeatureTable> table;
    if (features) table = load_features_csv(*features, g.item_ids(), sensitive_names);
    return Dataset{std::move(g), std::move(table)};
}

void write_comparisons_csv(const std::filesystem::path& path, const ComparisonGraph& g) {
    std::ofstream out = open_output(path);
    out << "i,j,outcome\n";
    const Eigen::MatrixXd& C = g.matrix();
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j)
            if (C(i, j) != 0.0)
                out << g.item_ids()[static_cast<std::size_t>(i)] << ','
                    << g.item_ids()[static_cast<std::size_t>(j)] << ',' << format_double(C(i, j))
                    << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

void write_features_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                        const FeatureTable& features) {
    std::ofstream out = open_output(path);
    out << "id";
    for (const std::string& n : features.column_names()) out << ',' << n;
    out << '\n';
    for (int i = 0; i < features.n(); ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (int j = 0; j < features.p(); ++j) out << ',' << format_double(features.matrix()(i, j));
        out << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void write_truth_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                     const Eigen::VectorXd& r_true) {
    std::ofstream out = open_output(path);
    out << "id,r_true\n";
    for (Eigen::Index i = 0; i < r_true.size(); ++i)
        out << ids[static_cast<std::size_t>(i)] << ',' << format_double(r_true(i)) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

void write_ranking_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                       const RankResult& result) {
    std::ofstream out = open_output(path);
    out << "id,score,rank\n";
    const Eigen::VectorXd s = result.oriented_scores();
    for (std::size_t pos = 0; pos < result.ordering.size(); ++pos) {
        const int item = result.ordering[pos];
        out << ids[static_cast<std::size_t>(item)] << ',' << format_double(s(item)) << ','
            << pos + 1 << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void write_prediction_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                          const PredictionResult& pred) {
    std::ofstream out = open_output(path);
    out << "id,score,rank\n";
    const Eigen::VectorXd s = pred.oriented_scores();
    for (std::size_t pos = 0; pos < pred.ordering.size(); ++pos) {
        const int item = pred.ordering[pos];
        out << ids[static_cast<std::size_t>(item)] << ',' << format_double(s(item)) << ','
            << pos + 1 << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report) {
    std::ofstream out = open_output(path);
    out << "algo,noise_kind,noise_level,sigma,seed,kendall_tau,upset_fraction,wall_time_ms\n";
    for (const ExperimentRecord& r : report.records) {
        out << r.algo << ',' << r.noise_kind << ',' << format_double(r.noise_level) << ','
            << format_double(r.sigma) << ',' << r.seed << ','
            << (r.failed ? "failed" : format_double(r.kendall_tau)) << ','
            << (r.failed ? "failed" : format_double(r.upset_fraction)) << ','
            << format_double(r.wall_time_ms) << '\n';
    }
    if (!out) throw DataError("failed writing " + path.string());
}

void write_report_json(const std::filesystem::path& path, const ExperimentReport& report) {
    json cells = json::array();
    for (const AggregateCell& c : report.aggregates()) {
        cells.push_back({{"algo", c.algo},
                         {"noise_kind", c.noise_kind},
                         {"noise_level", c.noise_level},
                         {"sigma", c.sigma},
                         {"kendall_tau_mean", c.tau_mean},
                         {"kendall_tau_std", c.tau_std},
                         {"upset_fraction_mean", c.upset_mean},
                         {"upset_fraction_std", c.upset_std},
                         {"runs", c.count},
                         {"failed", c.failed}});
    }
    std::ofstream out = open_output(path);
    out << json{{"aggregates", cells}}.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

void save_model_json(const std::filesystem::path& path, const FittedModel& model) {
    json doc;
    doc["algo"] = model.algo;
    doc["orientation"] = to_string(model.orientation);
    doc["lambda"] = model.lambda;
    doc["kernel"] = {{"family", to_string(model.kernel.family)},
                     {"lengthscale", model.kernel.lengthscale}};
    doc["beta"] = vector_to_json(model.beta);
    doc["feature_mean"] = vector_to_json(model.feature_mean);
    doc["alpha"] = vector_to_json(model.alpha);
    doc["kernel_col_means"] = vector_to_json(model.kernel_col_means);
    doc["gamma"] = vector_to_json(model.gamma);
    doc["train_features"] = matrix_to_json(model.train_features);
    doc["train_scores"] = vector_to_json(model.train_scores);
    doc["train_ids"] = model.train_ids;
    doc["feature_names"] = model.feature_names;
    doc["kcca_side"] = model.kcca_side;
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

FittedModel load_model_json(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": invalid model file: " + e.what());
    }
    FittedModel model;
    try {
        model.algo = doc.at("algo").get<std::string>();
        model.orientation = doc.at("orientation").get<std::string>() == "reversed"
                                ? Orientation::reversed
                                : Orientation::as_is;
        model.lambda = doc.at("lambda").get<double>();
        model.kernel.family = kernel_family_from_string(doc.at("kernel").at("family").get<std::string>());
        model.kernel.lengthscale = doc.at("kernel").at("lengthscale").get<double>();
        model.beta = vector_from_json(doc.at("beta"));
        model.feature_mean = vector_from_json(doc.at("feature_mean"));
        model.alpha = vector_from_json(doc.at("alpha"));
        model.kernel_col_means = vector_from_json(doc.at("kernel_col_means"));
        model.gamma = vector_from_json(doc.at("gamma"));
        model.train_features = matrix_from_json(doc.at("train_features"));
        model.train_scores = vector_from_json(doc.at("train_scores"));
        model.train_ids = doc.at("train_ids").get<std::vector<std::string>>();
        model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        model.kcca_side = doc.at("kcca_side").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": malformed model file: " + e.what());
    }
    return model;
}

}  // namespace specrank
