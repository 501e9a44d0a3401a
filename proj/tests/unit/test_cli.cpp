#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + IHOX_CLI_PATH + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Cli, SubBlockTooLargeIsConfigError) {
    EXPECT_EQ(run("verify --n-trunc 8 --sub-block 7").code, 2);
}

TEST(Cli, MalformedFlagIsConfigError) {
    EXPECT_EQ(run("verify --n-trunc banana").code, 2);
    EXPECT_EQ(run("verify --no-such-flag").code, 2);
}

TEST(Cli, BadSeedEnvironmentIsConfigError) {
    EXPECT_EQ(run("verify", "IHOX_SEED=abc").code, 2);
}

TEST(Cli, LongHorizonNeedsUnsafe) {
    EXPECT_EQ(run("trajectory --n-trunc 32 --t-max 2").code, 2);
}

TEST(Cli, DegenerateDisentangleExitsThree) {
    EXPECT_EQ(run("disentangle --epsilon 1 --mu-plus-re 0.5 --mu-minus-re 0.5").code, 3);
}

TEST(Cli, DisentangleZeroSqueezing) {
    const CliResult r = run("disentangle --epsilon 1");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["v_zero"]["re"].get<double>(), 7.389056, 1e-6);
    EXPECT_EQ(j["v_plus"]["re"].get<double>(), 0.0);
    EXPECT_EQ(j["v_minus"]["re"].get<double>(), 0.0);
}

TEST(Cli, DisentangleConsistency) {
    const CliResult r = run("disentangle --epsilon 0.3 --mu-plus-re 0.1 --mu-plus-im 0.05 --mu-minus-re 0.02");
    ASSERT_EQ(r.code, 0);
    EXPECT_LT(json::parse(r.out)["consistency_residual"].get<double>(), 1e-12);
}

TEST(Cli, DisentangleThetaZeroIsFinite) {
    const CliResult r = run("disentangle --epsilon 0.5 --mu-plus-re 0.25 --mu-minus-re 0.25");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_NEAR(j["v_zero"]["re"].get<double>(), 4.0, 1e-12);
    EXPECT_NEAR(j["v_plus"]["re"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, TrajectoryCsv) {
    const CliResult r = run("trajectory --n-trunc 64 --t-max 0.5 --dt 0.05");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "X_closed", "X_matrix", "P_closed", "P_matrix", "dX", "dP",
                                                 "product"}));
    EXPECT_NEAR(std::stod(rows[1][1]), std::sqrt(2.0) * 0.5, 1e-15);
    for (size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 8u);
        EXPECT_NEAR(std::stod(rows[i][7]), 0.5, 1e-8);
        EXPECT_LT(std::abs(std::stod(rows[i][2]) / std::stod(rows[i][1]) - 1.0), 1e-6);
    }
}

TEST(Cli, TrajectoryWritesOutputFile) {
    const std::string path = ::testing::TempDir() + "ihox_traj.csv";
    const CliResult r = run("trajectory --n-trunc 32 --t-max 0.1 --dt 0.05 --output " + path);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::string head;
    std::getline(f, head);
    EXPECT_EQ(head, "t,X_closed,X_matrix,P_closed,P_matrix,dX,dP,product");
}

TEST(Cli, DemoDivergenceCsv) {
    const CliResult r = run("demo-divergence");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"L", "naive_norm", "hermitian_norm"}));
    EXPECT_NEAR(std::stod(rows[5][2]), 1.0, 1e-8);
    EXPECT_NEAR(std::stod(rows[2][1]) / std::stod(rows[3][1]), 0.5, 1e-10);
}

TEST(Cli, VerifyReportAndExitCodeAgree) {
    const CliResult r = run("verify --n-trunc 32 --sub-block 8");
    ASSERT_TRUE(r.code == 0 || r.code == 1) << r.code;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["pass"].get<bool>(), r.code == 0);
    EXPECT_EQ(j["sigma"], -1);
    EXPECT_EQ(j["metric"], "rho_rho_dag");
    EXPECT_EQ(j["config"]["n_trunc"], 32);
    bool all = true;
    for (const auto& c : j["checks"]) all &= c["pass"].get<bool>();
    EXPECT_EQ(all, j["pass"].get<bool>());
}

TEST(Cli, SeedEnvironmentOverridesFlag) {
    const CliResult r = run("verify --n-trunc 32 --sub-block 8 --seed 5", "IHOX_SEED=99");
    const json j = json::parse(r.out);
    EXPECT_EQ(j["config"]["seed"], 99);
}
