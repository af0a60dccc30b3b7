#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "specrank/errors.hpp"
#include "specrank/io.hpp"

using namespace specrank;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / ("specrank_cli_test_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cli_path() {
    const char* env = std::getenv("SPECRANK_CLI");
    REQUIRE_MESSAGE(env != nullptr, "SPECRANK_CLI must point at the specrank binary");
    return env;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("comparisons CSV round-trips through load and re-emit") {
    const fs::path dir = scratch_dir();
    const std::string body = "i,j,outcome\na,b,1\na,c,-1\nb,c,1\n";
    write_file(dir / "toy.csv", body);
    const ComparisonGraph g = load_comparisons_csv(dir / "toy.csv");
    CHECK(g.kind() == ComparisonKind::ordinal);
    CHECK(g.n() == 3);
    write_comparisons_csv(dir / "back.csv", g);
    CHECK(read_file(dir / "back.csv") == body);
}

TEST_CASE("kind is inferred from the outcomes unless overridden") {
    const fs::path dir = scratch_dir();
    write_file(dir / "c.csv", "i,j,outcome\na,b,0.5\n");
    CHECK(load_comparisons_csv(dir / "c.csv").kind() == ComparisonKind::cardinal);
    CHECK_THROWS_AS(load_comparisons_csv(dir / "c.csv", ComparisonKind::ordinal), DataError);

    write_file(dir / "o.csv", "i,j,outcome\na,b,1\nb,c,-1\n");
    CHECK(load_comparisons_csv(dir / "o.csv").kind() == ComparisonKind::ordinal);
    CHECK(load_comparisons_csv(dir / "o.csv", ComparisonKind::cardinal).kind() ==
          ComparisonKind::cardinal);
}

TEST_CASE("loader rejects malformed comparison files with line numbers") {
    const fs::path dir = scratch_dir();
    write_file(dir / "dup.csv", "i,j,outcome\na,b,1\nb,a,-1\n");
    CHECK_THROWS_WITH_AS(load_comparisons_csv(dir / "dup.csv"), doctest::Contains("duplicate pair"),
                         DataError);

    write_file(dir / "bad.csv", "i,j,outcome\na,b,1\nb,c,oops\n");
    CHECK_THROWS_WITH_AS(load_comparisons_csv(dir / "bad.csv"), doctest::Contains(":3"), DataError);

    write_file(dir / "self.csv", "i,j,outcome\na,a,1\n");
    CHECK_THROWS_AS(load_comparisons_csv(dir / "self.csv"), DataError);

    write_file(dir / "hdr.csv", "x,y,z\na,b,1\n");
    CHECK_THROWS_AS(load_comparisons_csv(dir / "hdr.csv"), DataError);
}

TEST_CASE("feature loader aligns rows to the comparison ids") {
    const fs::path dir = scratch_dir();
    write_file(dir / "f.csv", "id,height,weight\nb,2,20\na,1,10\nc,3,30\n");
    const FeatureTable t = load_features_csv(dir / "f.csv", {"a", "b", "c"});
    CHECK(t.matrix()(0, 0) == 1.0);
    CHECK(t.matrix()(1, 0) == 2.0);
    CHECK(t.matrix()(2, 1) == 30.0);
    CHECK(t.column_names() == std::vector<std::string>{"height", "weight"});

    CHECK_THROWS_WITH_AS(load_features_csv(dir / "f.csv", {"a", "b", "zz"}),
                         doctest::Contains("zz"), DataError);
    write_file(dir / "extra.csv", "id,height\na,1\nb,2\nc,3\nghost,4\n");
    CHECK_THROWS_WITH_AS(load_features_csv(dir / "extra.csv", {"a", "b", "c"}),
                         doctest::Contains("ghost"), DataError);

    const FeatureTable sens = load_features_csv(dir / "f.csv", {"a", "b", "c"}, {"weight"});
    CHECK(sens.sensitive_columns() == std::vector<int>{1});
    CHECK_THROWS_AS(load_features_csv(dir / "f.csv", {"a", "b", "c"}, {"nope"}), DataError);
}

TEST_CASE("model json round-trips with full precision") {
    const fs::path dir = scratch_dir();
    FittedModel model;
    model.algo = "svdk";
    model.orientation = Orientation::reversed;
    model.alpha = Eigen::Vector3d(0.1, -1.0 / 3.0, 2e-17);
    model.train_features = Eigen::MatrixXd::Random(3, 2);
    model.kernel = KernelSpec::rbf(0.12345678901234567);
    model.kernel_col_means = Eigen::Vector3d(1e-300, 0.0, 7.0);
    model.gamma = Eigen::Vector3d(1, 2, 3);
    model.train_scores = Eigen::Vector3d(0.5, -0.25, 0.125);
    model.train_ids = {"x", "y", "z"};
    model.feature_names = {"a", "b"};
    save_model_json(dir / "m.json", model);
    const FittedModel back = load_model_json(dir / "m.json");
    CHECK(back.algo == model.algo);
    CHECK(back.orientation == Orientation::reversed);
    CHECK((back.alpha - model.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.train_features - model.train_features).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.kernel.lengthscale == model.kernel.lengthscale);
    CHECK((back.kernel_col_means - model.kernel_col_means).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.train_ids == model.train_ids);

    write_file(dir / "junk.json", "{ not json");
    CHECK_THROWS_AS(load_model_json(dir / "junk.json"), DataError);
}

TEST_CASE("ranking CSV lists ranks as a permutation starting at one") {
    const fs::path dir = scratch_dir();
    Eigen::MatrixXd C(3, 3);
    C << 0, 1, 1, -1, 0, 1, -1, -1, 0;
    const ComparisonGraph g =
        ComparisonGraph::from_matrix(C, ComparisonKind::ordinal, {"red", "green", "blue"});
    Eigen::VectorXd scores(3);
    scores << 0.3, 0.9, 0.1;
    const RankResult result = orient_ranking(g, scores);
    write_ranking_csv(dir / "ranking.csv", g.item_ids(), result);
    const std::string text = read_file(dir / "ranking.csv");
    CHECK(text.substr(0, 14) == "id,score,rank\n");
    int rows = 0;
    for (char c : text)
        if (c == '\n') ++rows;
    CHECK(rows == 4);
    CHECK(text.find(",1\n") != std::string::npos);
    CHECK(text.find(",2\n") != std::string::npos);
    CHECK(text.find(",3\n") != std::string::npos);
}

TEST_CASE("cli: rank twice with the same seed is byte-identical") {
    const fs::path dir = scratch_dir();
    REQUIRE(run_cli("simulate --n 40 --sparsity 0.4 --seed 9 --out " + (dir / "data").string()) == 0);
    REQUIRE(run_cli("rank --comparisons " + (dir / "data/comparisons.csv").string() +
                    " --features " + (dir / "data/features.csv").string() +
                    " --algo svdk --seed 5 --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("rank --comparisons " + (dir / "data/comparisons.csv").string() +
                    " --features " + (dir / "data/features.csv").string() +
                    " --algo svdk --seed 5 --out " + (dir / "b").string()) == 0);
    CHECK(read_file(dir / "a/ranking.csv") == read_file(dir / "b/ranking.csv"));
    CHECK(read_file(dir / "a/model.json") == read_file(dir / "b/model.json"));
}

TEST_CASE("cli: simulate is deterministic and feeds every subcommand") {
    const fs::path dir = scratch_dir();
    REQUIRE(run_cli("simulate --n 30 --sparsity 0.5 --seed 4 --out " + (dir / "s1").string()) == 0);
    REQUIRE(run_cli("simulate --n 30 --sparsity 0.5 --seed 4 --out " + (dir / "s2").string()) == 0);
    for (const char* name : {"comparisons.csv", "features.csv", "truth.csv"})
        CHECK(read_file(dir / "s1" / name) == read_file(dir / "s2" / name));

    const std::string comps = (dir / "s1/comparisons.csv").string();
    const std::string feats = (dir / "s1/features.csv").string();
    CHECK(run_cli("cv --comparisons " + comps + " --features " + feats +
                  " --algo svdk --folds 5 --out " + (dir / "cv").string()) == 0);
    CHECK(run_cli("select-features --comparisons " + comps + " --features " + feats +
                  " --target-k 1 --out " + (dir / "sel").string()) == 0);
    CHECK(run_cli("hsic-test --comparisons " + comps + " --features " + feats +
                  " --n-perm 99 --out " + (dir / "ht").string()) == 0);
    CHECK(run_cli("fair --comparisons " + comps + " --features " + feats +
                  " --sensitive x --fair-lambda 100 --out " + (dir / "fair").string()) == 0);
}

TEST_CASE("cli: exit codes distinguish usage, data and numerical failures") {
    const fs::path dir = scratch_dir();
    // usage: missing required --algo
    write_file(dir / "c.csv", "i,j,outcome\na,b,1\nb,c,1\nc,d,1\n");
    CHECK(run_cli("rank --comparisons " + (dir / "c.csv").string()) == 1);

    // data: duplicate pair
    write_file(dir / "dup.csv", "i,j,outcome\na,b,1\nb,a,-1\nb,c,1\n");
    CHECK(run_cli("rank --comparisons " + (dir / "dup.csv").string() + " --algo svd --out " +
                  (dir / "o1").string()) == 2);

    // data: unwritable output directory
    CHECK(run_cli("rank --comparisons " + (dir / "c.csv").string() + " --algo svd --out " +
                  "/dev/null/nested") == 2);

    // numerical: rank centrality on a disconnected graph
    write_file(dir / "disc.csv", "i,j,outcome\na,b,1\nc,d,1\n");
    CHECK(run_cli("rank --comparisons " + (dir / "disc.csv").string() + " --algo rc --out " +
                  (dir / "o2").string()) == 3);
}

TEST_CASE("cli: predict reproduces training scores from the saved model") {
    const fs::path dir = scratch_dir();
    REQUIRE(run_cli("simulate --n 30 --sparsity 0.6 --seed 11 --out " + (dir / "d").string()) == 0);
    REQUIRE(run_cli("rank --comparisons " + (dir / "d/comparisons.csv").string() + " --features " +
                    (dir / "d/features.csv").string() + " --algo svdc --out " +
                    (dir / "fit").string()) == 0);
    REQUIRE(run_cli("predict --model " + (dir / "fit/model.json").string() + " --features " +
                    (dir / "d/features.csv").string() + " --comparisons " +
                    (dir / "d/comparisons.csv").string() + " --combined --out " +
                    (dir / "pred").string()) == 0);
    // same items, same model -> the prediction ranking equals the training one
    CHECK(read_file(dir / "pred/prediction.csv") == read_file(dir / "fit/ranking.csv"));
    CHECK(fs::exists(dir / "pred/combined_ranking.csv"));
}
