#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "atomwave/runner.hpp"

using namespace atomwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("atomwave_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(is, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Config base(const std::string& command, const fs::path& out) {
  Config c;
  c.set("run.command", command);
  c.set("run.out", out.string());
  c.set("run.workers", "1");
  return c;
}

}  // namespace

TEST(Runner, SimulateAtResonanceKeepsMomentum) {
  const fs::path out = scratch("simulate");
  Config c = base("simulate", out);
  c.set("system.delta", "0");
  c.set("simulate.tau_max", "50");
  c.set("simulate.sample_interval", "1");
  const Manifest m = run_experiment(c);
  const auto rows = read_csv(out / "trajectory.csv");
  ASSERT_EQ(rows.size(), 52u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"tau", "xi", "p", "u", "v", "z"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(parse_double(rows[i][2]), 60.0, 1e-9);
  EXPECT_TRUE(fs::exists(out / "events.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.ini"));
  EXPECT_EQ(parse_double(m.find_result("final_tau")), 50);
}

TEST(Runner, CycleClassifyReportsPeriodThree) {
  const fs::path out = scratch("classify");
  Config c = base("cycle-classify", out);
  c.set("system.n", "14846");
  const Manifest m = run_experiment(c);
  EXPECT_EQ(m.find_result("label"), "Period(3)");
  EXPECT_EQ(m.find_result("category"), "3");
  const std::string ini = slurp(out / "manifest.ini");
  EXPECT_NE(ini.find("label = Period(3)"), std::string::npos);
  EXPECT_NE(ini.find("n = 14846"), std::string::npos);
}

TEST(Runner, ExitScanIsReproducibleAcrossRunsAndWorkers) {
  auto run = [](const std::string& tag, int workers) {
    const fs::path out = scratch("exit_" + tag);
    Config c = base("exit-scan", out);
    c.set("run.workers", std::to_string(workers));
    c.set("system.n", "11880");
    c.set("system.gamma_a", "0");
    c.set("exit.min", "-2");
    c.set("exit.points", "11");
    c.set("exit.depth", "1");
    c.set("exit.zoom", "4");
    c.set("exit.max_flagged", "3");
    c.set("exit.tau_max", "2000");
    run_experiment(c);
    return std::make_pair(slurp(out / "exit_scan.csv"), slurp(out / "levels.csv"));
  };
  const auto a = run("a", 1), b = run("b", 1), c = run("c", 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(read_csv(fs::temp_directory_path() / "atomwave_test_exit_a" / "exit_scan.csv")[0],
            (std::vector<std::string>{"level", "parent_interval", "param", "T", "outcome"}));
}

TEST(Runner, SyncMapIndependentOfWorkersAndRecordsInjectedFailure) {
  auto run = [](const std::string& tag, int workers, int inject) {
    const fs::path out = scratch("sync_" + tag);
    Config c = base("sync-map", out);
    c.set("run.workers", std::to_string(workers));
    c.set("run.inject_failure", std::to_string(inject));
    c.set("scan.n_min", "2000");
    c.set("scan.n_max", "4000");
    c.set("scan.n_points", "2");
    c.set("scan.delta_min", "20");
    c.set("scan.delta_max", "28");
    c.set("scan.delta_points", "2");
    c.set("classify.transient", "500");
    c.set("classify.window", "200");
    c.set("classify.max_transient", "500");
    const Manifest m = run_experiment(c);
    return std::make_pair(slurp(out / "map.csv"), m);
  };
  const auto [a, ma] = run("a", 1, -1);
  const auto [b, mb] = run("b", 4, -1);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(ma.failed_cells.empty());

  const auto [f, mf] = run("f", 2, 2);
  ASSERT_EQ(mf.failed_cells.size(), 1u);
  EXPECT_EQ(mf.failed_cells[0].index, 2u);
  EXPECT_FALSE(mf.warnings.empty());
  const auto rows = read_csv(fs::temp_directory_path() / "atomwave_test_sync_f" / "map.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[3][2], "-1");
  EXPECT_NE(rows[1][2], "-1");
  const std::string ini = slurp(fs::temp_directory_path() / "atomwave_test_sync_f" / "manifest.ini");
  EXPECT_NE(ini.find("status = warnings"), std::string::npos);
  EXPECT_NE(ini.find("cell2 = "), std::string::npos);
}

TEST(Runner, BadConfigurationIsAUsageError) {
  Config c = base("simulate", scratch("bad"));
  c.set("integrator.method", "euler");
  try {
    run_experiment(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Usage);
  }
  Config d = base("no-such-command", scratch("bad2"));
  EXPECT_THROW(run_experiment(d), Error);
}

#ifdef ATOMWAVE_CLI_PATH
TEST(Cli, ExitCodes) {
  const fs::path out = scratch("cli");
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(ATOMWAVE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(status("--set system.bogus=1 simulate"), 2);
  EXPECT_EQ(status("--set system.n=abc simulate"), 2);
  EXPECT_EQ(status("--out " + out.string() + " --set system.gamma_a=-1 simulate"), 3);
  EXPECT_EQ(status("--out " + out.string() + " --set simulate.tau_max=5 simulate"), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.ini"));
  EXPECT_EQ(status("--print-config"), 0);
}
#endif
