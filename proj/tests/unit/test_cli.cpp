#include "config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using cahnlab::cli::Config;
using cahnlab::cli::ConfigError;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CAHNLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_test_out" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = Config::defaults();
  CHECK(cfg.raw("mesh.family") == "icosphere");
  CHECK(cfg.integer("mesh.subdivisions") == 4);
  CHECK(cfg.origin("epsilon") == "default");
  cfg.load_text(
      "# comment\n"
      "epsilon = 0.02   # trailing\n"
      "\n"
      "[mesh]\n"
      "family = torus\n"
      "axes = 1, 2, 3\n"
      "[flow]\n"
      "newton = false\n"
      "max_steps = 50\n",
      "t.cfg");
  CHECK(cfg.number("epsilon") == 0.02);
  CHECK(cfg.origin("epsilon") == "t.cfg:2");
  CHECK(cfg.raw("mesh.family") == "torus");
  CHECK(cfg.numbers("mesh.axes") == std::vector<double>{1, 2, 3});
  CHECK_FALSE(cfg.boolean("flow.newton"));
  CHECK(cfg.integer("flow.max_steps") == 50);

  const auto lines = cahnlab::cli::header_lines(cfg);
  CHECK(std::find(lines.begin(), lines.end(), "epsilon = 0.02") != lines.end());
}

TEST_CASE("config errors are line-precise") {
  auto cfg = Config::defaults();
  try {
    cfg.load_text("epsilon = 0.1\nbogus.key = 3\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
  }
  CHECK_THROWS_AS(cfg.load_text("epsilon 0.1\n", "x"), ConfigError);
  CHECK_THROWS_AS(cfg.load_text("[mesh\n", "x"), ConfigError);
  cfg.set("epsilon", "abc", "flag");
  CHECK_THROWS_AS(cfg.number("epsilon"), ConfigError);
  cfg.set("flow.newton", "maybe", "flag");
  CHECK_THROWS_AS(cfg.boolean("flow.newton"), ConfigError);
  CHECK_THROWS_AS(cfg.set("nope", "1", "flag"), ConfigError);
}

TEST_CASE("environment overrides") {
  auto cfg = Config::defaults();
  setenv("CAHNLAB_FLOW_TAU0", "0.003", 1);
  cfg.apply_environment();
  unsetenv("CAHNLAB_FLOW_TAU0");
  CHECK(cfg.number("flow.tau0") == 0.003);
  CHECK(cfg.origin("flow.tau0") == "env:CAHNLAB_FLOW_TAU0");
}

TEST_CASE("command line") {
  CHECK(run_cli("") != 0);
  CHECK(run_cli("no-such-mode") != 0);

  const auto dir = fresh_dir("profile");
  CHECK(run_cli("profile --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "profile.jsonl"));
  CHECK(fs::exists(dir / "profile_summary.csv"));
  CHECK(slurp(dir / "profile_summary.csv").rfind("# mode = profile", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "FAILED"));

  const auto bad = fresh_dir("bad");
  std::ofstream(bad / "bad.cfg") << "bogus.key = 1\n";
  CHECK(run_cli("profile --config " + (bad / "bad.cfg").string() + " --out " + bad.string()) == 2);

  // V larger than the surface area is rejected
  const auto failed = fresh_dir("failed");
  setenv("CAHNLAB_VOLUME", "100", 1);
  const int code = run_cli("photograph --out " + failed.string());
  unsetenv("CAHNLAB_VOLUME");
  CHECK(code != 0);
  CHECK(fs::exists(failed / "FAILED"));
  CHECK(slurp(failed / "FAILED").find("photograph") != std::string::npos);

  // a later success clears the marker
  CHECK(run_cli("profile --out " + failed.string()) == 0);
  CHECK_FALSE(fs::exists(failed / "FAILED"));
}

TEST_CASE("sweep output is reproducible") {
  const auto cfg_dir = fresh_dir("sweep_cfg");
  std::ofstream(cfg_dir / "small.cfg") << "[mesh]\nsubdivisions = 3\n[seeds]\ncount = 3\n";
  std::string first;
  for (int k = 0; k < 2; ++k) {
    const auto dir = fresh_dir("sweep" + std::to_string(k));
    REQUIRE(run_cli("sweep --threads 2 --config " + (cfg_dir / "small.cfg").string() + " --out " + dir.string()) == 0);
    const std::string text = without_timestamp(slurp(dir / "sweep.jsonl"));
    CHECK(text.find("\"type\":\"class\"") != std::string::npos);
    if (k == 0) first = text;
    else CHECK(text == first);
  }
}

TEST_CASE("gamma table") {
  const auto dir = fresh_dir("gamma");
  std::ofstream(dir / "g.cfg") << "epsilon = 0.2, 0.1, 0.05, 0.02\n[mesh]\nsubdivisions = 3\n";
  REQUIRE(run_cli("gamma --config " + (dir / "g.cfg").string() + " --out " + dir.string()) == 0);
  std::ifstream in(dir / "gamma.csv");
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      CHECK(line == "epsilon,energy,sigma_perimeter,overshoot,l1_to_ball");
      header = true;
    } else {
      ++rows;
    }
  }
  CHECK(rows == 4);
}
