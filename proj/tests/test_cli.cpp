// End-to-end checks of the raa binary: exit codes, output determinism, and
// the numeric anchors on a fixed diagonal problem.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(RAA_CLI_PATH) + " " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  REQUIRE(WIFEXITED(status));
  r.exit_code = WEXITSTATUS(status);
  return r;
}

std::string temp_path(const std::string& stem) {
  return "/tmp/raa_cli_test_" + std::to_string(getpid()) + "_" + stem;
}

std::string write_problem(const std::string& stem, const std::string& body) {
  const std::string path = temp_path(stem);
  std::ofstream out(path);
  REQUIRE(out.good());
  out << body;
  out.close();
  return path;
}

std::string grab_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

const std::string kCanonical = "n 2\nM 0.5 0 0 -0.5\nb 1 1\n";

}  // namespace

TEST_CASE("solve reports the picard iteration count on the halving instance",
          "[cli]") {
  const std::string path = write_problem("canon", kCanonical);
  const RunResult r = run_cli("solve " + path + " --method picard --tol 1e-10");
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "termination: ") == "tolerance-reached");
  CHECK(grab_line(r.out, "steps: ") == "34");
  CHECK(grab_line(r.out, "dimension: ") == "2");
  const double rate = std::strtod(grab_line(r.out, "rate empirical: ").c_str(), nullptr);
  CHECK(rate == Catch::Approx(0.5).margin(1e-12));
  CHECK(grab_line(r.out, "rate closed form: ").empty());
}

TEST_CASE("solve reports the restarted rate with its closed form", "[cli]") {
  const std::string path = write_problem("canon_aa", kCanonical);
  const RunResult r = run_cli("solve " + path + " --method aa1-restarted --tol 1e-10");
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "steps: ") == "32");
  const std::string closed = grab_line(r.out, "rate closed form: ");
  REQUIRE_FALSE(closed.empty());
  const double emp = std::strtod(grab_line(r.out, "rate empirical: ").c_str(), nullptr);
  const double cf = std::strtod(closed.c_str(), nullptr);
  const double gap = std::strtod(grab_line(r.out, "rate discrepancy: ").c_str(), nullptr);
  CHECK(std::abs(emp - cf) == Catch::Approx(gap).margin(1e-15));
  CHECK(gap < 1e-10);
}

TEST_CASE("solve output is byte-identical across runs", "[cli]") {
  const std::string path = write_problem("canon_det", kCanonical);
  const std::string args = "solve " + path + " --method aa1-restarted --tol 1e-10";
  CHECK(run_cli(args).out == run_cli(args).out);
}

TEST_CASE("solve writes a reparsable trace", "[cli]") {
  const std::string path = write_problem("canon_trace", kCanonical);
  const std::string trace = temp_path("trace.csv");
  const RunResult r = run_cli("solve " + path +
                              " --method aa1-restarted --tol 1e-10 --trace-out " + trace);
  REQUIRE(r.exit_code == 0);

  std::ifstream in(trace);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "k,residual_norm,beta");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 33);  // steps 0..32
  CHECK(rows.front().rfind("0,", 0) == 0);
  const double first_norm =
      std::strtod(rows.front().c_str() + 2, nullptr);
  CHECK(first_norm == std::sqrt(2.0));
  std::remove(trace.c_str());
}

TEST_CASE("exit codes separate usage errors from runtime failures", "[cli]") {
  CHECK(run_cli("solve /tmp/raa_cli_no_such_file.problem").exit_code == 1);
  const std::string bad = write_problem("bad", "n 2\nM 0.5 0 0\nb 1 1\n");
  CHECK(run_cli("solve " + bad).exit_code == 2);
  const std::string canon = write_problem("canon_codes", kCanonical);
  CHECK(run_cli("solve " + canon + " --method bogus").exit_code == 2);
  CHECK(run_cli("nonsense-subcommand").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);

  const std::string div = write_problem("div", "n 2\nM 2 0 0 2\nb 1 1\n");
  CHECK(run_cli("solve " + div + " --max-iters 200").exit_code == 1);
}

TEST_CASE("format errors carry the offending line", "[cli]") {
  const std::string bad = write_problem("bad_line", "n 2\nM 0.5 0 0 half\nb 1 1\n");
  const RunResult r = run_cli("solve " + bad, true);
  CHECK(r.exit_code == 2);
  CHECK(r.out.find(":2:") != std::string::npos);
  CHECK(r.out.find("'half'") != std::string::npos);
}

TEST_CASE("analyze2x2 reports the rescue verdict", "[cli]") {
  const RunResult r = run_cli("analyze2x2 --m1 2 --m2 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "verdict: ") == "aa-converges-picard-diverges");
  const double rho = std::strtod(grab_line(r.out, "rate aa worst: ").c_str(), nullptr);
  CHECK(rho == Catch::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
  CHECK(grab_line(r.out, "rate picard worst: ") == "2");
}

TEST_CASE("analyze2x2 evaluates a requested mix ratio", "[cli]") {
  const RunResult r =
      run_cli("analyze2x2 --m1 0.5 --m2 -0.5 --eps 0.57735026918962573");
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "verdict: ") == "equal-rates");
  CHECK(grab_line(r.out, "four-step factor: ") == "0.0625");
  CHECK(grab_line(r.out, "rate at ratio: ") == "0.5");
}

TEST_CASE("sweep writes a csv with the declared header", "[cli]") {
  const std::string out = temp_path("sweep.csv");
  const RunResult r = run_cli("sweep --resolution 11 --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("cells: 121") != std::string::npos);

  std::ifstream in(out);
  REQUIRE(in.good());
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "m1,m2,rho_aa,rho_pi,ratio,masked,valid");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 121);
  std::remove(out.c_str());

  CHECK(run_cli("sweep --range bogus --out /tmp/raa_cli_unused.csv").exit_code == 2);
  CHECK(run_cli("sweep --resolution 11").exit_code == 2);  // --out is required
}

TEST_CASE("verify passes and is deterministic for a fixed seed", "[cli]") {
  const RunResult a = run_cli("verify --seed 42 --samples 25");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("[FAIL]") == std::string::npos);
  CHECK(a.out.find("all 6 suites passed") != std::string::npos);

  const RunResult b = run_cli("verify --seed 42 --samples 25");
  CHECK(a.out == b.out);

  const RunResult c = run_cli("verify --seed 7 --samples 25");
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);  // different draws, same verdicts
}
