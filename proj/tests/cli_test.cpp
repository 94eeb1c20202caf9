#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sphanova/cli.hpp"
#include "test_support.hpp"

using namespace sphanova;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

// field count of a CSV line, honoring double quotes
std::size_t fields(const std::string& line) {
    std::size_t n = 1;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) ++n;
    }
    return n;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("sphanova_cli_" + name)).string();
}

} // namespace

TEST(CliTest, AreTableIsNineBySeven) {
    const auto r = run({"are", "--table1"});
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 10u);
    EXPECT_EQ(ls[0].rfind("truth,K_FvML(2)", 0), 0u);
    for (const auto& l : ls) EXPECT_EQ(fields(l), 8u) << l;
    EXPECT_EQ(ls[8].rfind("\"Logis(1,1)\",", 0), 0u);
    EXPECT_EQ(ls[2].rfind("FvML(2),1.000000", 0), 0u);
}

TEST(CliTest, SingleAre) {
    const auto r = run({"are", "--score", "fvml:kappa=2", "--truth", "fvml:kappa=1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(std::stod(r.out), 0.9744, 0.002);
    EXPECT_EQ(run({"are", "--score", "fvml:kappa=2"}).code, 2);
    EXPECT_EQ(run({"are", "--score", "lin:a=0.5", "--truth", "fvml:kappa=1"}).code, 1);
}

TEST(CliTest, SampleIsDeterministic) {
    const std::vector<std::string> args{"sample", "--model", "lin:a=2", "--theta", "0,0,1", "--n", "5", "--seed", "3"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto ls = lines(a.out);
    ASSERT_EQ(ls.size(), 6u);
    EXPECT_EQ(ls[0], "group,x1,x2,x3");
    auto c = args;
    c.back() = "4";
    EXPECT_NE(run(c).out, a.out);
}

TEST(CliTest, TestSubcommandOnSampledData) {
    const std::string path = temp_path("data.csv");
    {
        std::ofstream f(path);
        f << run({"sample", "--model", "fvml:kappa=5", "--theta", "0,0,1", "--n", "60", "--seed", "1", "--group", "a"}).out;
        f << run({"sample", "--model", "fvml:kappa=5", "--theta", "0,0.3,1", "--n", "80", "--seed", "2", "--group", "b",
                  "--no-header"})
                 .out;
    }
    const auto p = run({"test", "--data", path});
    ASSERT_EQ(p.code, 0) << p.err;
    const auto j = nlohmann::json::parse(p.out);
    EXPECT_EQ(j["method"], "pseudo");
    EXPECT_EQ(j["df"], 2);
    EXPECT_EQ(j["groups"].size(), 2u);
    EXPECT_EQ(j["groups"][1]["label"], "b");
    EXPECT_NEAR(j["p_value"].get<double>(), 1.0 - chi2_cdf(j["statistic"].get<double>(), 2), 1e-12);
    EXPECT_NE(p.err.find("pseudo: Q = "), std::string::npos);

    const auto r = run({"test", "--data", path, "--method", "rank", "--scores", "fvml:kappa=5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["method"], "rank");
    EXPECT_EQ(run({"test", "--data", path, "--method", "rank"}).code, 2);
    EXPECT_EQ(run({"test", "--data", path, "--method", "rank", "--scores", "fvml:kappa=1,fvml:kappa=2,fvml:kappa=3"}).code, 2);
    std::filesystem::remove(path);
}

TEST(CliTest, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"test"}).code, 2);
    const auto missing = run({"test", "--data", "/nonexistent.csv"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_EQ(missing.err.rfind("error: ", 0), 0u);
    const std::string bad = temp_path("bad.csv");
    {
        std::ofstream(bad) << "group,x1,x2\n1,1,0\n2,0.5,0.5\n";
    }
    EXPECT_EQ(run({"test", "--data", bad}).code, 1);
    std::filesystem::remove(bad);
}

TEST(CliTest, SimulateWritesReport) {
    const std::string cfg = temp_path("cfg.json"), out = temp_path("report.json");
    {
        auto c = two_sample_design(AngularModel::fvml(15), AngularModel::fvml(2), {{Method::PseudoFvML, {}}}, 5, 3);
        std::ofstream(cfg) << to_json(c).dump();
    }
    const auto r = run({"simulate", "--config", cfg, "--out", out, "--threads", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("xi=3"), std::string::npos);
    std::ifstream f(out);
    const auto j = nlohmann::json::parse(f);
    EXPECT_EQ(j["cells"].size(), 4u);
    EXPECT_EQ(j["config"]["replications"], 5);
    std::filesystem::remove(cfg);
    std::filesystem::remove(out);
}
