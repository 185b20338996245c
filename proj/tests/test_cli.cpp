#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    nlohmann::ordered_json json() const { return nlohmann::ordered_json::parse(out); }
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = maskcheck::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("maskcheck_test_" + name);
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST(Cli, PointwiseFailIsExpected) {
    const Result r = run({"check-pointwise", "--q", "5", "--tw", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["property"], "check-pointwise");
    EXPECT_EQ(j["verdict"], "FAIL");
    const auto& w = j["witness"];
    EXPECT_NE(w["value"], w["value_prime"]);
}

TEST(Cli, EnvelopeFieldOrder) {
    const auto j = run({"check-butterfly", "--q", "3"}).json();
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    const std::vector<std::string> expected{"property", "verdict",  "mode",  "q",          "k",
                                            "twiddles", "seed",     "contexts_checked", "details",
                                            "notes",    "elapsed_ms"};
    EXPECT_EQ(keys, expected);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({"check-pointwise", "--q", "0"}).code, 2);
    EXPECT_EQ(run({"check-pointwise", "--q", "4611686018427387904"}).code, 2);
    EXPECT_EQ(run({"no-such-command"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"check-butterfly", "--q", "5", "--gadget", "nope"}).code, 2);
    EXPECT_EQ(run({"demo-adams-bridge", "--q", "5", "--policy", "zz"}).code, 2);
    EXPECT_EQ(run({"check-pointwise", "--config", "/nonexistent/file.json"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MaskDroppingMutantExitsOne) {
    const Result r = run({"check-butterfly", "--q", "5", "--gadget", "drop-mask"});
    EXPECT_EQ(r.code, 1);
    const auto j = r.json();
    EXPECT_EQ(j["verdict"], "FAIL");
    EXPECT_EQ(j["witness"]["count"], 5);
}

TEST(Cli, TextFormat) {
    const Result r = run({"check-pointwise", "--q", "5", "--format", "text"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("property", 0), 0u);
    EXPECT_NE(r.out.find("verdict           FAIL"), std::string::npos);
}

TEST(Cli, SampledRunsRecordTheSeed) {
    const auto j = run({"check-pipeline", "--q", "3329", "-k", "2", "--contexts", "5", "--seed", "9"}).json();
    EXPECT_EQ(j["mode"], "sampled");
    EXPECT_EQ(j["seed"], 9);
}

TEST(Cli, SeedPrecedence) {
    const auto cfg = temp_file("seed.json", R"({"seed": 5, "q": 3329})");
    const std::vector<std::string> base{"check-pipeline", "-k", "2", "--contexts", "3", "--config", cfg.string()};
    ::setenv("MASKCHECK_SEED", "7", 1);
    EXPECT_EQ(run(base).json()["seed"], 5);
    auto with_flag = base;
    with_flag.insert(with_flag.end(), {"--seed", "11"});
    EXPECT_EQ(run(with_flag).json()["seed"], 11);
    EXPECT_EQ(run({"check-pipeline", "--q", "3329", "-k", "2", "--contexts", "3"}).json()["seed"], 7);
    ::setenv("MASKCHECK_SEED", "x", 1);
    EXPECT_EQ(run({"check-pipeline", "--q", "3329", "-k", "2", "--contexts", "3"}).code, 2);
    ::unsetenv("MASKCHECK_SEED");
    EXPECT_EQ(run({"check-pipeline", "--q", "3329", "-k", "2", "--contexts", "3"}).json()["seed"], 0);
    std::filesystem::remove(cfg);
}

TEST(Cli, DeterministicOutputIsByteIdentical) {
    const std::vector<std::string> args{"check-butterfly", "--q", "3329", "--sweep-tw", "20", "--sweep-inputs", "20",
                                        "--seed", "3", "--deterministic"};
    const Result a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("\"elapsed_ms\": 0"), std::string::npos);
}

TEST(Cli, ThreadCountDoesNotChangeReports) {
    const std::vector<std::string> base{"check-bridge", "--q", "5", "--tables", "30", "--seed", "4", "--deterministic"};
    auto threaded = base;
    threaded.insert(threaded.end(), {"--threads", "4"});
    EXPECT_EQ(run(base).out, run(threaded).out);
}

TEST(Cli, WitnessesSurviveVerification) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"check-pointwise", "--q", "7", "--tw", "3"},
             {"check-butterfly", "--q", "5", "--gadget", "drop-mask"},
             {"second-order", "--q", "7"},
             {"demo-adams-bridge", "--q", "5", "-k", "2"},
             {"check-bridge", "--q", "3", "--tables", "10"},
             {"mi", "--q", "5", "--wire", "identity"}}) {
        const Result r = run(args);
        ASSERT_NE(r.code, 2) << args[0] << ": " << r.err;
        const auto path = temp_file("witness.json", r.out);
        const Result v = run({"--verify-witness", path.string()});
        std::filesystem::remove(path);
        ASSERT_EQ(v.code, 0) << args[0] << ": " << v.out;
        const auto j = v.json();
        EXPECT_EQ(j["property"], "verify-witness");
        EXPECT_FALSE(j["details"].empty()) << args[0];
        for (const auto& d : j["details"]) EXPECT_EQ(d["verdict"], "PASS") << d.dump();
    }
}

TEST(Cli, TamperedWitnessIsRefuted) {
    auto report = run({"check-butterfly", "--q", "5", "--gadget", "drop-mask"}).json();
    report["details"][0]["witness"]["count"] = 1;
    report.erase("witness");
    const auto path = temp_file("tampered.json", report.dump());
    const Result v = run({"--verify-witness", path.string()});
    std::filesystem::remove(path);
    EXPECT_EQ(v.code, 1) << v.out;
}

TEST(Cli, MutualInformationFromDistributionFile) {
    const auto dist = temp_file("dist.json", R"({"joint": [[2, 2], [3, 1]]})");
    const Result r = run({"mi", "--distribution", dist.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    const auto& d = j["details"][0];
    EXPECT_EQ(d["verdict"], "FAIL");
    EXPECT_EQ(d["witness"]["count"], 2);
    EXPECT_EQ(d["witness"]["count_prime"], 3);
    const auto report = temp_file("dist_report.json", r.out);
    EXPECT_EQ(run({"--verify-witness", report.string()}).code, 0);
    std::filesystem::remove(report);
    std::filesystem::remove(dist);
}

TEST(Cli, NttSelftest) {
    const Result r = run({"ntt-selftest", "--q", "17", "--n", "8", "--trials", "50"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["verdict"], "INCONCLUSIVE-PASS");
    EXPECT_EQ(run({"ntt-selftest", "--q", "15", "--n", "8"}).code, 2);
}
