#include "fle/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using fle::cli::run;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fle_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_quiet(const std::string& cmd, const std::vector<std::string>& sets, const fs::path& out,
              const std::string& config = "")
{
    std::ostringstream log, err;
    return run(cmd, config, sets, out, log, err);
}

int shell(const std::string& args)
{
    const std::string cmd = std::string(FLE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t count(const std::string& hay, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1))
        ++n;
    return n;
}

} // namespace

TEST(Cli, CheckAdmissibleAndFailures)
{
    const auto out = scratch("check");
    EXPECT_EQ(run_quiet("check", {}, out), 0);
    const auto j = nlohmann::json::parse(slurp(out / "check.json"));
    EXPECT_EQ(j["command"], "check");
    EXPECT_TRUE(j.contains("config"));

    // p = q = 3 is on the critical hyperbole for N=1, s=0.25
    EXPECT_EQ(run_quiet("check", {"problem.p=3", "problem.q=3"}, out), 1);
    EXPECT_NE(slurp(out / "check.json").find("subcritical"), std::string::npos);

    const auto out2 = scratch("check2");
    EXPECT_EQ(run_quiet("check", {"problem.N=2", "problem.s=0.5", "problem.alpha=3"}, out2), 1);
    const auto k = nlohmann::json::parse(slurp(out2 / "check.json"));
    bool named = false;
    for (const auto& c : k["report"]["conditions"])
        if (c["name"] == "alpha_lt_N")
            named = !c["pass"].get<bool>();
    EXPECT_TRUE(named);
}

TEST(Cli, ParseErrors)
{
    const auto out = scratch("parse");
    EXPECT_EQ(run_quiet("check", {"problem.nonsense=1"}, out), 2);
    EXPECT_EQ(run_quiet("check", {"problem.p"}, out), 2);
    EXPECT_EQ(run_quiet("check", {}, out, "/nonexistent/config.json"), 2);
    const fs::path bad = out / "bad.json";
    fs::create_directories(out);
    std::ofstream(bad) << "{ not json";
    EXPECT_EQ(run_quiet("check", {}, out, bad.string()), 2);
    EXPECT_EQ(shell("frobnicate --out " + out.string()), 2);
    EXPECT_EQ(shell("check --bogus-flag"), 2);
    EXPECT_EQ(shell("--help"), 0);
}

TEST(Cli, RegionMarkers)
{
    const auto a = scratch("region_a");
    EXPECT_EQ(run_quiet("region", {"problem.N=2", "problem.s=0.5", "problem.alpha=0.3", "problem.beta=0.3"}, a), 0);
    EXPECT_EQ(count(slurp(a / "region.svg"), "class=\"intersection\""), 0u);
    const auto b = scratch("region_b");
    EXPECT_EQ(run_quiet("region",
                        {"problem.N=2", "problem.s=0.5", "problem.alpha=1.5", "problem.beta=0.25", "region.samples=57"},
                        b),
              0);
    EXPECT_EQ(count(slurp(b / "region.svg"), "class=\"intersection\""), 1u);
    const auto j = nlohmann::json::parse(slurp(b / "region.json"));
    ASSERT_EQ(j["intersections"].size(), 1u);
    EXPECT_NEAR(j["intersections"][0]["p"].get<double>(), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(j["intersections"][0]["q"].get<double>(), 1.5, 1e-12);
    const std::string csv = slurp(b / "region.csv");
    EXPECT_EQ(count(csv, "\n"), 58u); // header + samples
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Cli, SolveReferenceAndDeterminism)
{
    const auto a = scratch("solve_a"), b = scratch("solve_b");
    EXPECT_EQ(run_quiet("solve", {}, a), 0);
    EXPECT_EQ(run_quiet("solve", {}, b), 0);
    for (const char* f : {"field.csv", "residual.txt", "solution.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(count(slurp(a / "field.csv"), "\n"), 202u);
    EXPECT_FALSE(fs::exists(a / "field.csv.tmp"));
}

TEST(Cli, SolveSublinearGuard)
{
    const auto out = scratch("solve_sub");
    EXPECT_EQ(run_quiet("solve", {"problem.p=0.5", "problem.q=1.5"}, out), 1);
    EXPECT_FALSE(fs::exists(out / "solution.json"));
}

TEST(Cli, SolveNotConverged)
{
    const auto out = scratch("solve_nc");
    EXPECT_EQ(run_quiet("solve", {"solver.max_power_iter=2", "solver.max_newton_iter=0"}, out), 3);
}

TEST(Cli, SweepHeaderAndGuard)
{
    const auto out = scratch("sweep");
    EXPECT_EQ(run_quiet("sweep", {"solver.M=16", "sweep.thetas=[1.0,1.1]"}, out), 0);
    const std::string csv = slurp(out / "sweep.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,q,gap,sup_u,theta_norm_u,J,iter_power,iter_newton,converged");
    EXPECT_EQ(count(csv, "\n"), 3u);
    EXPECT_EQ(run_quiet("sweep", {"solver.M=16", "sweep.thetas=[1.0,1.5]"}, out), 1);
}

TEST(Cli, OpsCompare)
{
    const auto out = scratch("ops");
    EXPECT_EQ(run_quiet("ops-compare", {"problem.s=0.5", "ops_compare.n=256"}, out), 0);
    const auto j = nlohmann::json::parse(slurp(out / "ops_compare.json"));
    EXPECT_TRUE(j["results"][0]["first_eigenvalue"]["strict"].get<bool>());
    EXPECT_EQ(run_quiet("ops-compare", {"domain=\"square\""}, out), 1);
}

TEST(Cli, BootstrapAndConst)
{
    const auto out = scratch("boot");
    EXPECT_EQ(run_quiet("bootstrap", {"problem.s=0.4", "problem.t=0.5"}, out), 0);
    const std::string csv = slurp(out / "bootstrap.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,gamma,tau,theta,eta,delta");
    EXPECT_EQ(run_quiet("bootstrap", {"bootstrap.max_steps=0"}, out), 1);

    const auto c1 = scratch("const1"), c2 = scratch("const2");
    EXPECT_EQ(run_quiet("const", {"problem.s=0.5"}, c1), 0);
    EXPECT_EQ(run_quiet("const", {"problem.s=0.5"}, c2), 0);
    const std::string line = slurp(c1 / "const.txt");
    EXPECT_EQ(line, slurp(c2 / "const.txt"));
    EXPECT_EQ(count(line, "\n"), 1u);
    EXPECT_NEAR(std::stod(line), 0.3183098861837907, 1e-15);
    EXPECT_EQ(run_quiet("const", {"problem.s=1.5"}, c1), 2);
}

TEST(Cli, BinaryExitCodes)
{
    const auto out = scratch("binary");
    EXPECT_EQ(shell("check --out " + out.string()), 0);
    EXPECT_EQ(shell("check --set problem.p=3 problem.q=3 --out " + out.string()), 1);
    EXPECT_EQ(shell("const --set problem.N=2 problem.s=0.5 --out " + out.string()), 0);
    EXPECT_NEAR(std::stod(slurp(out / "const.txt")), 0.5 / 3.141592653589793, 1e-12); // C(2, 1/2) = 1/(2 pi)
}
