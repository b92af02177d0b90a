#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "locsvm/cli.hpp"

using namespace locsvm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LOCSVM_TEST_DATA;

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "locsvm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("locsvm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    fs::path dir;
};

const char* kMinimal = R"({
  "version": 1,
  "data": {"synthetic": {"kind": "sine-regression", "n": 30}},
  "loss": "logistic-regression",
  "model": {"kernel": {"family": "gaussian-rbf"}, "lambda": 1.0}%s
})";

std::string minimal(const std::string& extra) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, kMinimal, extra.c_str());
    return buf;
}

}  // namespace

TEST_F(CliTest, TrainMatchesGoldenSummary) {
    const Result r = run_cli({"train", "--config", (kData / "fixture.json").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "summary.txt"), slurp(kData / "fixture_summary.golden"));
    EXPECT_TRUE(fs::exists(dir / "model.json"));
}

TEST_F(CliTest, SingleRegionReportsGlobalModel) {
    const Result r = run_cli({"train", "--config", (kData / "global.json").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("model: global"), std::string::npos);
}

TEST_F(CliTest, MissingCsvIsInputError) {
    const fs::path cfg = write("c.json", R"({"version": 1, "data": {"csv": "nope.csv"}, "loss": "logistic-regression",
        "model": {"kernel": {"family": "linear"}, "lambda": 1}})");
    const Result r = run_cli({"train", "--config", cfg.string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, MissingConfigIsInputError) {
    EXPECT_EQ(run_cli({"train", "--config", (dir / "absent.json").string()}).code, 2);
    EXPECT_EQ(run_cli({"train"}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
}

TEST_F(CliTest, AuditRoundTripSatisfied) {
    ASSERT_EQ(run_cli({"train", "--config", (kData / "fixture.json").string(), "--out", dir.string()}).code, 0);
    const Result r = run_cli({"audit", "--config", (kData / "fixture.json").string(), "--model",
                              (dir / "model.json").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err << r.out;
    const auto j = nlohmann::json::parse(slurp(dir / "audit.json"));
    EXPECT_TRUE(j.at("satisfied").at("if").get<bool>());
    EXPECT_TRUE(j.at("satisfied").at("maxbias").get<bool>());
    // Gaussian kernel, logistic loss, shared lambda 0.5 over the fitted regions
    const auto model = nlohmann::json::parse(slurp(dir / "model.json"));
    const double regions = static_cast<double>(model.at("locals").size());
    EXPECT_NEAR(j.at("if_bound_rough").get<double>(), 2.0 * regions / 0.5, 1e-15);
    EXPECT_EQ(j.at("empirical").at("points").size(), 5U);
}

TEST_F(CliTest, AuditDetectsViolation) {
    ASSERT_EQ(run_cli({"train", "--config", (kData / "fixture.json").string(), "--out", dir.string()}).code, 0);
    // Inflate every stored lambda 100x: the bound shrinks by the same factor while the refits, solved
    // at the inflated lambda, land far from the stored coefficients.
    auto model = nlohmann::json::parse(slurp(dir / "model.json"));
    for (auto& l : model.at("locals")) l.at("lambda") = l.at("lambda").get<double>() * 100.0;
    std::ofstream(dir / "tampered.json") << model.dump();
    const Result r = run_cli({"audit", "--config", (kData / "fixture.json").string(), "--model",
                              (dir / "tampered.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 1) << r.out << r.err;
}

TEST_F(CliTest, ExperimentCsvShapesAndDeterminism) {
    const Result a = run_cli({"experiment", "--config", (kData / "consistency.json").string(), "--out", dir.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    const std::string csv = slurp(dir / "experiment.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,risk,bayes_proxy,global_risk,lambda");
    const Result b = run_cli({"experiment", "--config", (kData / "consistency.json").string(), "--out", dir.string(),
                              "--threads", "1"});
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(slurp(dir / "experiment.csv"), csv);
    const Result c = run_cli({"experiment", "--config", (kData / "consistency.json").string(), "--out", dir.string(),
                              "--seed", "12"});
    ASSERT_EQ(c.code, 0);
    EXPECT_NE(slurp(dir / "experiment.csv"), csv);
}

TEST_F(CliTest, TradeoffBoundHalvesAsLambdaDoubles) {
    const Result r = run_cli({"experiment", "--config", (kData / "tradeoff.json").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(dir / "experiment.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "lambda,risk,if_bound_rough");
    std::vector<double> bounds;
    while (std::getline(in, line)) bounds.push_back(std::stod(line.substr(line.rfind(',') + 1)));
    ASSERT_EQ(bounds.size(), 4U);
    for (std::size_t i = 1; i < bounds.size(); ++i) EXPECT_EQ(bounds[i], 2.0 * bounds[i - 1]);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config(minimal(R"(, "colour": 1)")), InputError);
    EXPECT_THROW(parse_config(minimal(R"(, "audit": {"epsilon": [0.1]})")), InputError);
    EXPECT_NO_THROW(parse_config(minimal("")));
}

TEST(Config, ContaminationLevelsMustBeBelowOneHalf) {
    EXPECT_THROW(parse_config(minimal(R"(, "audit": {"maxbias_eps": 0.6})")), InputError);
    EXPECT_THROW(parse_config(minimal(R"(, "audit": {"eps_ladder": [0.6, 0.3]})")), InputError);
    EXPECT_NO_THROW(parse_config(minimal(R"(, "audit": {"maxbias_eps": 0.0})")));
}

TEST(Config, SemanticChecks) {
    EXPECT_THROW(parse_config(R"({"version": 2})"), InputError);
    EXPECT_THROW(parse_config("{ not json"), InputError);
    std::string wrong_loss = minimal("");
    wrong_loss.replace(wrong_loss.find("logistic-regression"), 19, "logistic-classification");
    EXPECT_THROW(parse_config(wrong_loss), InputError);
    EXPECT_THROW(parse_config(minimal(R"(, "experiment": {"kind": "consistency", "schedule": {"beta": 0.5}})")),
                 InputError);
    try {
        static_cast<void>(parse_config(minimal(R"(, "audit": {"z": [{"x": [0, 0], "y": 1, "w": 2}]})")));
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("audit.z[0]"), std::string::npos);
    }
}

TEST(Csv, ReadWriteRoundTrip) {
    std::istringstream in("x0,x1,y\n1.5,2,1\n-0.25,3e-2,-1\n");
    const Dataset d = read_csv(in);
    ASSERT_EQ(d.size(), 2);
    EXPECT_EQ(d.x(1, 1), 0.03);
    std::ostringstream out;
    write_csv(out, d);
    std::istringstream again(out.str());
    const Dataset e = read_csv(again);
    EXPECT_EQ(d.x, e.x);
    EXPECT_EQ(d.y, e.y);
}

TEST(Csv, Errors) {
    std::istringstream bad_header("a,b,y\n1,2,3\n");
    EXPECT_THROW(read_csv(bad_header), InputError);
    std::istringstream missing("x0,y\n1,\n");
    try {
        static_cast<void>(read_csv(missing));
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
    std::istringstream junk("x0,y\n1,abc\n");
    EXPECT_THROW(read_csv(junk), InputError);
    std::istringstream ragged("x0,y\n1,2,3\n");
    EXPECT_THROW(read_csv(ragged), InputError);
}

TEST(Serialization, ModelRoundTripPredictsIdentically) {
    const auto cfg = load_config(kData / "fixture.json");
    const auto t = cli::cmd_train(cfg);
    const ComposedModel back = composed_model_from_json(nlohmann::json::parse(to_json(t.model).dump()));
    EXPECT_EQ(predict_composed(back, t.data.x), predict_composed(t.model, t.data.x));
    EXPECT_EQ(back.scheme.partition.size(), t.model.scheme.partition.size());
}
