#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code;
  std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "gsmp-cli-tests";
  fs::create_directories(dir);
  fs::path out = dir / ("stdout-" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string(GSMP_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out);
  std::ostringstream buf;
  buf << in.rdbuf();
  return {WEXITSTATUS(rc), buf.str()};
}

fs::path scratch_file(const std::string& name, const std::string& content) {
  fs::path dir = fs::temp_directory_path() / "gsmp-cli-tests";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("info prints the bound and the event table") {
  CliResult fig1 = run_cli("info fig1-producer-consumer");
  CHECK(fig1.exit_code == 0);
  CHECK(fig1.stdout_text.find("B = 1") != std::string::npos);
  CHECK(fig1.stdout_text.find("fixed") != std::string::npos);

  CliResult ntp = run_cli("info ntp");
  CHECK(ntp.exit_code == 0);
  CHECK(ntp.stdout_text.find("B = 100") != std::string::npos);
}

TEST_CASE("malformed files exit with code 1 and a located error") {
  fs::path bad = scratch_file("bad.gsmp", "states: a\nevents:\n  e kind=warp lower=0\n");
  CliResult res = run_cli("validate " + bad.string());
  CHECK(res.exit_code == 1);
  CHECK(res.stdout_text.find("line 3") != std::string::npos);

  CliResult unknown = run_cli("validate no-such-model");
  CHECK(unknown.exit_code == 1);
}

TEST_CASE("validation catches missing successor rows over reachable regions") {
  fs::path partial = scratch_file("partial.gsmp",
                                  "states: s\n"
                                  "events:\n"
                                  "  e kind=uniform lower=0 upper=1\n"
                                  "  f kind=uniform lower=2 upper=3\n"
                                  "schedule:\n"
                                  "  s: e f\n"
                                  "succ:\n"
                                  "  s [e] -> s 1\n"
                                  "init:\n"
                                  "  s 1\n");
  CliResult res = run_cli("validate " + partial.string());
  CHECK(res.exit_code == 1);
  CHECK(res.stdout_text.find("missing successor rows") != std::string::npos);
}

TEST_CASE("stochastic commands require a seed") {
  CliResult res = run_cli("simulate renewal-2 --steps 100");
  CHECK(res.exit_code != 0);

  CliResult ok = run_cli("simulate renewal-2 --steps 100 --seed 4");
  CHECK(ok.exit_code == 0);
}

TEST_CASE("check reports the verdict and honors warnings-as-errors") {
  CliResult granted = run_cli("check renewal-2");
  CHECK(granted.exit_code == 0);
  CHECK(granted.stdout_text.find("single-ticking: yes") != std::string::npos);

  CliResult refused = run_cli("check fig1-producer-consumer");
  CHECK(refused.exit_code == 0);
  CHECK(refused.stdout_text.find("single-ticking: no") != std::string::npos);
  CHECK(refused.stdout_text.find("no guarantee") != std::string::npos);
}

TEST_CASE("estimation on unstable models is diagnostic-only and can be an error") {
  CliResult warn = run_cli("estimate fig2-sink --method mc --seed 3 --runs 50 --horizon 256 "
                           "--steps 4096");
  CHECK(warn.exit_code == 0);
  CHECK(warn.stdout_text.find("diagnostic-only") != std::string::npos);

  CliResult strict = run_cli("estimate fig2-sink --method mc --seed 3 --runs 50 --horizon 256 "
                             "--steps 4096 --warnings-as-errors");
  CHECK(strict.exit_code == 2);

  CliResult grid_refused = run_cli("estimate fig1-producer-consumer --method grid --seed 3");
  CHECK(grid_refused.exit_code == 2);
  CHECK(grid_refused.stdout_text.find("refused") != std::string::npos);
}

TEST_CASE("regions writes DOT and JSON files") {
  fs::path dir = fs::temp_directory_path() / "gsmp-cli-tests";
  fs::path dot = dir / "g.dot", json = dir / "g.json";
  CliResult res =
      run_cli("regions fig2-sink --dot " + dot.string() + " --out " + json.string());
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("8 vertices") != std::string::npos);
  std::ifstream d(dot), j(json);
  CHECK(d.good());
  CHECK(j.good());
}

TEST_CASE("simulate writes trace and checkpoint files") {
  fs::path dir = fs::temp_directory_path() / "gsmp-cli-tests";
  fs::path trace = dir / "trace.csv", cps = dir / "cps.csv";
  CliResult res = run_cli("simulate renewal-2 --seed 11 --steps 64 --target s1 --trace " +
                          trace.string() + " --checkpoints " + cps.string());
  CHECK(res.exit_code == 0);
  std::ifstream t(trace);
  std::string header;
  std::getline(t, header);
  CHECK(header == "step,dwell,state,occurring,e1,e2");
  std::ifstream c(cps);
  std::getline(c, header);
  CHECK(header == "step,partial_d,partial_c");
}
