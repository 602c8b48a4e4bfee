#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <otac/datafile.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string output;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(OTAC_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("otac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, OptimizeReportsAsymmetricDesign) {
    const auto out = path("opt.json");
    const auto r = run_cli("optimize --k 100 --q 4 --snr-db 10 --out " + out);
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("t*"), std::string::npos);
    EXPECT_NE(r.output.find("KKT residual"), std::string::npos);
    const auto text = slurp(out);
    auto field = [&](const std::string& key) {
        const auto pos = text.find("\"" + key + "\":");
        EXPECT_NE(pos, std::string::npos) << key;
        return std::stod(text.substr(pos + key.size() + 3));
    };
    EXPECT_GT(field("d2_star"), field("d1_star"));
    EXPECT_LE(field("mse_opt"), field("mse_eq"));
}

TEST_F(CliTest, OptimizeRejectsDegenerateAlphabet) {
    const auto r = run_cli("optimize --k 10 --q 1 --gamma 1");
    EXPECT_EQ(r.status, 3) << r.output;
    EXPECT_NE(r.output.find("domain error"), std::string::npos);
}

TEST_F(CliTest, MissingFlagIsUsageError) {
    const auto out = path("never.json");
    const auto r = run_cli("optimize --q 4 --gamma 1 --out " + out);
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_FALSE(fs::exists(out));

    EXPECT_EQ(run_cli("optimize --k 10 --q 4").status, 2);
    EXPECT_EQ(run_cli("optimize --k 10 --q 4 --gamma 1 --snr-db 3").status, 2);
    EXPECT_EQ(run_cli("").status, 2);
    EXPECT_EQ(run_cli("sweep --k 10 --q 4").status, 2);
}

TEST_F(CliTest, MsePrintsAllColumns) {
    const auto r = run_cli("mse --k 10 --q 4 --gamma 0.1 --trials 20000");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("optimized"), std::string::npos);
    EXPECT_NE(r.output.find("equal"), std::string::npos);
    EXPECT_NE(r.output.find("exact_uniform"), std::string::npos);
    EXPECT_EQ(run_cli("mse --k 10 --q 4 --gamma 0.1 --d1 0.3").status, 2);
}

TEST_F(CliTest, SweepWritesTableAndManifest) {
    const auto out = path("sweep.dat");
    const auto r = run_cli("sweep --k 10 --q 4 --trials 2000 --snr-step 5 --out " + out);
    ASSERT_EQ(r.status, 0) << r.output;
    std::ifstream is(out);
    const auto rows = otac::read_sweep_table(is);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows.front().xi_db, 0.0);
    EXPECT_EQ(rows.back().xi_db, 20.0);
    const auto manifest = slurp(out + ".manifest.json");
    EXPECT_NE(manifest.find("\"timestamp\""), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 1"), std::string::npos);
}

TEST_F(CliTest, SweepStepLargerThanRange) {
    const auto out = path("one.dat");
    ASSERT_EQ(run_cli("sweep --k 2 --q 2 --trials 100 --snr-start 3 --snr-stop 7 --snr-step 10 --out " + out).status,
              0);
    std::ifstream is(out);
    const auto rows = otac::read_sweep_table(is);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].xi_db, 3.0);
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRunsAndWorkers) {
    const std::string args = "sweep --k 10 --q 8 --trials 5000 --snr-step 4 --seed 9";
    const auto a = path("a.dat"), b = path("b.dat"), c = path("c.dat"), d = path("d.dat");
    ASSERT_EQ(run_cli(args + " --workers 1 --out " + a).status, 0);
    ASSERT_EQ(run_cli(args + " --workers 1 --out " + b).status, 0);
    ASSERT_EQ(run_cli(args + " --workers 4 --out " + c).status, 0);
    ASSERT_EQ(run_cli(args + " --workers 16 --out " + d).status, 0);
    const auto ref = slurp(a);
    EXPECT_EQ(ref, slurp(b));
    EXPECT_EQ(ref, slurp(c));
    EXPECT_EQ(ref, slurp(d));
}

TEST_F(CliTest, SweepUnwritablePathIsIoError) {
    const auto r = run_cli("sweep --k 2 --q 2 --trials 10 --snr-step 20 --out " + path("missing/dir/x.dat"));
    EXPECT_EQ(r.status, 4) << r.output;
}

TEST_F(CliTest, ValidateQuickPasses) {
    const auto r = run_cli("validate --quick");
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
}

TEST_F(CliTest, ValidateCatchesCorruptedCoefficients) {
    const auto r = run_cli("validate --quick --inject-fault alpha");
    EXPECT_EQ(r.status, 5) << r.output;
    EXPECT_NE(r.output.find("FAIL closed_form_vs_enumeration"), std::string::npos) << r.output;
}
