#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "minnaert/cli.hpp"

using namespace minnaert;
using cli::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "minnaert_cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) v.push_back(l);
    return v;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "minnaert_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, Table1CsvHasThreeRows) {
    const Result r = run_cli({"table1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "mu,delta,lambda,tau,k_b2_re,k_b2_im,k_d2_re,k_d2_im,k_b3_re,k_b3_im,k_d3_re,k_d3_im,converged");
    EXPECT_NE(l[1].find("0.262295672,-0.034655164"), std::string::npos) << l[1];
}

TEST(Cli, Table1WithMediumGivesOneRow) {
    const Result r = run_cli({"table1", "--mu", "0.005", "--delta", "0.005"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 2u);
}

TEST(Cli, RootsJsonStructure) {
    const Result r = run_cli({"roots", "--mu", "0.01", "--delta", "0.01", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_TRUE(j.contains("config") && j.contains("rows") && j.contains("diagnostics"));
    ASSERT_EQ(j["rows"].size(), 1u);
    const json& row = j["rows"][0];
    EXPECT_NEAR(row["k_root"]["re"].get<double>(), 0.262064632, 1e-9);
    EXPECT_NEAR(row["k_root"]["im"].get<double>(), -0.034521282, 1e-9);
    EXPECT_TRUE(row["converged"].get<bool>());
    EXPECT_LT(row["relative_gap"].get<double>(), 5e-3);
    EXPECT_EQ(j["config"]["medium"]["mu"].get<double>(), 0.01);
}

TEST(Cli, RootsTwoDimensional) {
    const Result r = run_cli({"roots", "--dim", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["rows"][0]["k_root"]["re"].get<double>(), 0.030796, 1e-6);
    EXPECT_EQ(j["config"]["shape"], "circle");
}

TEST(Cli, DimensionalInputReportsFrequency) {
    const Result r = run_cli({"roots", "--rho-b", "1.2", "--rho-e", "1000", "--kappa", "1.4e5", "--lambda-t", "2e6",
                              "--mu-t", "1e4", "--length", "1e-3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_TRUE(j["rows"][0].contains("omega"));
    EXPECT_GT(j["rows"][0]["omega"]["re"].get<double>(), 0.0);
}

TEST(Cli, MixingDimensionalAndNondimensionalIsAConfigError) {
    const Result r = run_cli({"roots", "--mu", "0.01", "--rho-b", "1.2"});
    EXPECT_EQ(r.code, cli::exit_config);
}

TEST(Cli, RadialSweepPeak) {
    const Result r = run_cli({"sweep", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["rows"].size(), 141u);
    EXPECT_NEAR(j["diagnostics"]["peak_k"].get<double>(), 0.083584, 0.05 * 0.083584);
}

TEST(Cli, GeneralSweepWritesSidecar) {
    const auto out = scratch("ellipsoid.csv");
    std::filesystem::remove(out);
    std::filesystem::remove(out.string() + ".diagnostics.json");
    const Result r = run_cli({"sweep", "--axes", "1,1,1.2", "--resolution", "12,24", "--steps", "3", "--out",
                              out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto l = lines(slurp(out));
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "k,residual,amplification");
    const json side = json::parse(slurp(out.string() + ".diagnostics.json"));
    EXPECT_EQ(side["config"]["shape"], "ellipsoid");
    EXPECT_EQ(side["diagnostics"]["c"].size(), 3u);
    EXPECT_TRUE(side["diagnostics"].contains("projection_leakage"));
}

TEST(Cli, GeneralReportsDiagnostics) {
    const Result r = run_cli({"general", "--resolution", "12,24", "--steps", "3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["rows"].size(), 3u);
    const json& d = j["diagnostics"];
    EXPECT_TRUE(d.contains("c0_numerator") && d.contains("enhanced_condition") && d.contains("minimizer"));
    const double c0 = d["c"][0]["re"].get<double>();
    EXPECT_NEAR(c0, 1.002, 1e-4 * 1.002);
}

TEST(Cli, GeneralRejectsTwoDimensions) {
    EXPECT_EQ(run_cli({"general", "--dim", "2"}).code, cli::exit_config);
}

TEST(Cli, VerifyCsvAllPass) {
    const Result r = run_cli({"verify", "--resolution", "16,32"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const auto l = lines(r.out);
    EXPECT_EQ(l[0], "check,measured,tolerance,status");
    EXPECT_EQ(l.size(), 14u);
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_NE(l[i].find(",pass"), std::string::npos) << l[i];
}

TEST(Cli, VerifyEllipsoidSkipsSphereIdentities) {
    const Result r = run_cli({"verify", "--axes", "1,1,1.5", "--resolution", "12,24", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    int skipped = 0, info = 0;
    for (const json& row : j["rows"]) {
        skipped += row["status"] == "skip";
        info += row["status"] == "info";
    }
    EXPECT_EQ(skipped, 5);
    EXPECT_EQ(info, 2);
}

TEST(Cli, VerifyFailureExitCode) {
    // Too coarse for the identity tolerances.
    const Result r = run_cli({"verify", "--resolution", "8,8"});
    EXPECT_EQ(r.code, cli::exit_verification);
    EXPECT_NE(r.err.find("failed:"), std::string::npos);
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(run_cli({"roots", "--mu", "-1"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"roots", "--dim", "4"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"roots", "--tau", "0"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"roots", "--resolution", "3,4"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"sweep", "--kmin", "0.2", "--kmax", "0.1"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"general", "--order", "9"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"roots", "--shape", "circle"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({"roots", "--no-such-flag"}).code, cli::exit_config);
    EXPECT_EQ(run_cli({}).code, cli::exit_config);
}

TEST(Cli, ConfigFileAndOverride) {
    const auto cfg = scratch("medium.toml");
    {
        std::ofstream f(cfg);
        f << "mu = 0.01\ndelta = 0.01\nformat = \"json\"\n";
    }
    const Result a = run_cli({"roots", "--config", cfg.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(json::parse(a.out)["config"]["medium"]["mu"].get<double>(), 0.01);
    const Result b = run_cli({"roots", "--config", cfg.string(), "--mu", "0.001", "--delta", "0.001"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(json::parse(b.out)["config"]["medium"]["mu"].get<double>(), 0.001);
}

TEST(Cli, OutputIsDeterministic) {
    const Result a = run_cli({"general", "--resolution", "8,16", "--steps", "2", "--format", "json"});
    const Result b = run_cli({"general", "--resolution", "8,16", "--steps", "2", "--format", "json"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find("-0.0,"), std::string::npos);
}

TEST(Cli, Help) {
    const Result r = run_cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("verify"), std::string::npos);
}

#ifdef MINNAERT_CLI_PATH
TEST(CliBinary, ExitCodesFromProcess) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string("\"") + MINNAERT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
        const int s = std::system(cmd.c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("table1"), 0);
    EXPECT_EQ(status("roots --mu -1"), 1);
    EXPECT_EQ(status("verify --resolution 8,8"), 3);
}

TEST(CliBinary, StdoutMatchesInProcessRun) {
    const std::string cmd = std::string("\"") + MINNAERT_CLI_PATH + "\" table1";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    std::string out;
    char buf[256];
    while (std::fgets(buf, sizeof buf, p)) out += buf;
    EXPECT_EQ(pclose(p), 0);
    EXPECT_EQ(out, run_cli({"table1"}).out);
}
#endif
