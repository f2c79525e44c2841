#include <gtest/gtest.h>

#include "app.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "biotlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = biotlab::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("biotlab_cli_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
        return (dir_ / name).string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string read(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    fs::path dir_;
};

std::string shipped(const char* name) { return std::string(BIOT_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_F(Cli, ZeroCaseRunsCleanly) {
    const auto r = cli({"run", "--config", shipped("zero.cfg"), "--out", path("zero")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.err.empty());
    for (const char* f : {"trajectory.csv", "energy.csv", "picard.csv", "run_config.txt", "snapshot_0001.vtk",
                          "snapshot_0005.vtk"}) {
        EXPECT_TRUE(fs::exists(path("zero") + "/" + f)) << f;
    }
    std::ifstream in(path("zero") + "/trajectory.csv");
    const auto file = biot::io::read_trajectory(in);
    ASSERT_EQ(file.trajectory.steps.size(), 5u);
    for (const auto& st : file.trajectory.steps) {
        EXPECT_EQ(st.u.coefficients.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(st.p.coefficients.cwiseAbs().maxCoeff(), 0.0);
    }
    const auto rc = read(path("zero") + "/run_config.txt");
    EXPECT_NE(rc.find("case = zero"), std::string::npos);
    EXPECT_NE(rc.find("out.dir = " + path("zero")), std::string::npos);
}

TEST_F(Cli, NonConvergenceExitsThree) {
    const auto cfg = write("ck.cfg", "mesh.n = 4\nmesh.bc = dirichlet\ncase = smooth-forcing\ntime.dt = 0.1\n"
                                     "time.T = 0.3\nperm.model = carman_kozeny\nperm.scale = 100\nperm.k1 = 1\n"
                                     "perm.k2 = 100\npicard.max_iter = 1\n");
    const auto r = cli({"run", "--config", cfg, "--out", path("ck")});
    EXPECT_EQ(r.code, 3);
    const auto rec = nlohmann::json::parse(r.err);
    EXPECT_EQ(rec["error"], "NonConvergence");
    EXPECT_EQ(rec["exit_code"], 3);
    EXPECT_EQ(rec["iterations"], 1);
    EXPECT_GT(rec["last_residual"].get<double>(), 0.0);
    // outputs are still written for inspection
    EXPECT_TRUE(fs::exists(path("ck") + "/picard.csv"));
}

TEST_F(Cli, StrictIncompatibleSourceExitsTwo) {
    const auto r = cli({"run", "--config", shipped("neumann_strict.cfg"), "--out", path("strict")});
    EXPECT_EQ(r.code, 2);
    const auto rec = nlohmann::json::parse(r.err);
    EXPECT_EQ(rec["error"], "IncompatibleSource");
}

TEST_F(Cli, CorrectedIncompatibleSourceWarns) {
    const auto cfg = write("inc.cfg", "mesh.n = 4\nmesh.bc = neumann\ncase = incompatible\ntime.dt = 0.1\ntime.T = 0.2\n");
    const auto r = cli({"run", "--config", cfg, "--out", path("inc")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("warning"), std::string::npos);
    EXPECT_NE(read(path("inc") + "/trajectory.csv").find("# source_mean_corrected: true"), std::string::npos);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    const auto cfg = write("bad.cfg", "mesh.n = 4\nmesh.bc = neumann\ncase = zero\ntime.dt = 0.1\ntime.T = 0.5\n"
                                      "physics.c0 = -1\n");
    const auto r = cli({"run", "--config", cfg});
    EXPECT_EQ(r.code, 2);
    const auto rec = nlohmann::json::parse(r.err);
    EXPECT_EQ(rec["error"], "ConfigError");
    EXPECT_NE(rec["message"].get<std::string>().find("line 6"), std::string::npos);
    EXPECT_EQ(cli({"run", "--config", path("missing.cfg")}).code, 2);
}

TEST_F(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"run"}).code, 2);
    EXPECT_EQ(cli({"operators", "--n", "4,x", "--out", path("o")}).code, 2);
    EXPECT_EQ(cli({"operators", "--bc", "sideways", "--out", path("o")}).code, 2);
    EXPECT_EQ(cli({"mms", "--dt-rule", "fast", "--levels", "2,4", "--out", path("m")}).code, 2);
    EXPECT_EQ(cli({"--version"}).code, 0);
}

TEST_F(Cli, OperatorsWritesOneRowPerLevel) {
    const auto r = cli({"operators", "--n", "4,8", "--bc", "neumann", "--out", path("ops")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(read(path("ops") + "/operators.csv"));
    int data = 0;
    for (std::string l; std::getline(in, l);)
        if (!l.empty() && l[0] != '#' && l.rfind("n,", 0) != 0) ++data;
    EXPECT_EQ(data, 2);
    EXPECT_EQ(cli({"operators", "--n", "64", "--out", path("ops")}).code, 2);  // dense cap
}

TEST_F(Cli, MmsWritesRates) {
    const auto r = cli({"mms", "--case", "mms1", "--levels", "2,4", "--out", path("mms")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(read(path("mms") + "/rates.csv").find("level,n,h,err_u_h1,err_p_l2,err_p_h1semi,order_u,order_p\n"),
              std::string::npos);
    EXPECT_EQ(cli({"mms", "--case", "smooth-forcing", "--levels", "2", "--out", path("mms")}).code, 2);
}

TEST_F(Cli, AuditReproducesRunLedger) {
    ASSERT_EQ(cli({"run", "--config", shipped("quadratic.cfg"), "--out", path("q")}).code, 0);
    const auto r = cli({"audit", "--trajectory", path("q") + "/trajectory.csv", "--out", path("q")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read(path("q") + "/audit_energy.csv"), read(path("q") + "/energy.csv"));
    // a trajectory that does not match the configuration is refused
    const auto bad = cli({"audit", "--trajectory", path("q") + "/trajectory.csv", "--config", shipped("zero.cfg"),
                          "--out", path("q")});
    EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, CompareAgrees) {
    const auto r = cli({"compare", "--config", shipped("compare.cfg"), "--out", path("cmp")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("cmp") + "/compare.csv"));
}

TEST_F(Cli, RepeatedRunsAreBitIdentical) {
    ASSERT_EQ(cli({"run", "--config", shipped("quadratic.cfg"), "--out", path("a")}).code, 0);
    ASSERT_EQ(cli({"run", "--config", shipped("quadratic.cfg"), "--out", path("b")}).code, 0);
    for (const auto& e : fs::directory_iterator(path("a"))) {
        const auto name = e.path().filename().string();
        if (name == "run_config.txt") continue;  // records the output directory
        EXPECT_EQ(read(e.path().string()), read(path("b") + "/" + name)) << name;
    }
}
