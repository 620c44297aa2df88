#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef DBSPLACE_CLI_PATH
#define DBSPLACE_CLI_PATH "dbsplace"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path() / "dbsplace_cli_out.txt";
  const std::string cmd =
      std::string(DBSPLACE_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(tmp);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string write_config(const std::string& name, const std::string& body) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kTinyConfig = R"({
  "rng_seed": 3,
  "num_terminals": 4,
  "num_dbs": 2,
  "radio": {"target_rate_bps": 4e7},
  "pso": {"num_particles": 5, "max_iterations": 15},
  "solver": {"max_iterations": 300},
  "experiments": {"replications": 2, "target_rates_bps": [2e7, 4e7], "dbs_counts": [1, 2]}
})";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("missing config exits with 2 and names the path") {
  const RunResult r = run_cli("validate --config /no/such/config.json");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("/no/such/config.json") != std::string::npos);
}

TEST_CASE("validate accepts a good config") {
  const std::string cfg = write_config("cli_good.json", kTinyConfig);
  const RunResult r = run_cli("validate --config " + cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ok") != std::string::npos);
}

TEST_CASE("validate reports every bad field") {
  const std::string cfg = write_config(
      "cli_bad.json", R"({"radio": {"total_power_w": -2}, "wifi": {"omega_slots": 1}})");
  const RunResult r = run_cli("validate --config " + cfg);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("total_power_w") != std::string::npos);
  CHECK(r.output.find("omega_slots") != std::string::npos);
}

TEST_CASE("coexistence optimizer prints the smallest feasible window") {
  const RunResult r = run_cli("coexistence --omega 16 --m 3 --aps 10 --cap 0.5");
  CHECK(r.exit_code == 0);
  const bool ok = r.output.find("gamma_star,5") != std::string::npos ||
                  r.output.find("gamma_star,6") != std::string::npos ||
                  r.output.find("gamma_star,7") != std::string::npos;
  CHECK(ok);
}

TEST_CASE("coexistence sweep emits one row per gamma") {
  const RunResult r = run_cli("coexistence --omega 16 --m 3 --aps 10 --sweep-gamma 1..8");
  CHECK(r.exit_code == 0);
  int lines = 0;
  for (char c : r.output) lines += c == '\n';
  CHECK(lines == 9);  // header + 8 rows
}

TEST_CASE("solve produces the documented result set deterministically") {
  const std::string cfg = write_config("cli_solve.json", kTinyConfig);
  const fs::path out1 = fs::temp_directory_path() / "dbsplace_cli_run1";
  const fs::path out2 = fs::temp_directory_path() / "dbsplace_cli_run2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  REQUIRE(run_cli("solve --config " + cfg + " --seed 9 --workers 1 --out " + out1.string())
              .exit_code == 0);
  REQUIRE(run_cli("solve --config " + cfg + " --seed 9 --workers 2 --out " + out2.string())
              .exit_code == 0);
  for (const char* name : {"allocation.csv", "cost_trace.csv", "position_trace.csv",
                           "dbs_positions.csv", "fig6.csv", "summary.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(out1 / name));
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
}

TEST_CASE("rap prints an allocation for given positions") {
  const std::string cfg = write_config("cli_rap.json", kTinyConfig);
  const std::string pos = write_config("cli_pos.csv", "dbs,x_km,y_km,z_km\n0,0.1,0.2,0.3\n");
  const RunResult r = run_cli("rap --scenario " + cfg + " --positions " + pos);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("terminal,b_hz,p_w,tau_1,rate_bps,gap_bps") != std::string::npos);
  int lines = 0;
  for (char c : r.output) lines += c == '\n';
  CHECK(lines == 5);  // header + 4 terminals
}

TEST_CASE("sweeps write their figure files") {
  const std::string cfg = write_config("cli_sweep.json", kTinyConfig);
  const fs::path out = fs::temp_directory_path() / "dbsplace_cli_sweeps";
  fs::remove_all(out);
  REQUIRE(run_cli("sweep-target-rate --config " + cfg + " --out " + out.string()).exit_code ==
          0);
  REQUIRE(run_cli("sweep-dbs --config " + cfg + " --out " + out.string()).exit_code == 0);
  REQUIRE(run_cli("trace --config " + cfg + " --out " + out.string()).exit_code == 0);
  CHECK(fs::exists(out / "fig1.csv"));
  CHECK(fs::exists(out / "fig2.csv"));
  CHECK(fs::exists(out / "fig4.csv"));
  CHECK(fs::exists(out / "fig5.csv"));
  CHECK(fs::exists(out / "cost_trace.csv"));
  const std::string fig1 = slurp(out / "fig1.csv");
  CHECK(fig1.find("target_rate_bps,scheme,mean_gap_bps,std_gap_bps") == 0);
}

TEST_SUITE_END();
