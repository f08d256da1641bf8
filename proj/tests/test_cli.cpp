#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "mpsim_cli_test";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(MPSIM_CLI_PATH) + " " + args + " > " +
                          (kWork / "stdout.txt").string() + " 2> " + (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE_FIXTURE(Workspace, "usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("verify") == 2);
  CHECK(run("verify nonsense") == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("simulate --preset 1a --scale 3") == 2);
  CHECK(run("density --lambda -1") == 2);
  CHECK(run("census --n 4 --d 9") == 2);
  write(kWork / "bad.json", R"({"model": {"type": "iid", "p": 4, "m": 4}, "typo": true})");
  CHECK(run("simulate --config " + (kWork / "bad.json").string()) == 2);
  write(kWork / "broken.json", "{not json");
  CHECK(run("simulate --config " + (kWork / "broken.json").string()) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE_FIXTURE(Workspace, "simulate honours flags, config and the output override") {
  write(kWork / "cfg.json", R"({"name": "small", "seed": 5, "output_dir": ")" + (kWork / "from_config").string() +
                                R"(", "model": {"type": "block", "blocks": [{"kind": "gaussian_hermite", "count": 40}], "m": 320}})");
  const std::string cfg = "simulate --config " + (kWork / "cfg.json").string();
  REQUIRE(run(cfg) == 0);
  CHECK(fs::exists(kWork / "from_config" / "eigenvalues.csv"));
  const auto result = nlohmann::json::parse(slurp(kWork / "from_config" / "result.json"));
  CHECK(result["config"]["seed"] == 5);
  CHECK(result["p"] == 80);

  REQUIRE(run(cfg + " --seed 6 -o " + (kWork / "flag").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "flag" / "result.json"))["config"]["seed"] == 6);
  CHECK(slurp(kWork / "flag" / "eigenvalues.csv") != slurp(kWork / "from_config" / "eigenvalues.csv"));

  REQUIRE(run(cfg + " -o ignored", "MPSIM_OUTPUT_DIR=" + (kWork / "env").string()) == 0);
  CHECK(fs::exists(kWork / "env" / "histogram.csv"));
  CHECK_FALSE(fs::exists("ignored"));
  CHECK(slurp(kWork / "env" / "eigenvalues.csv") == slurp(kWork / "from_config" / "eigenvalues.csv"));
  CHECK(slurp(kWork / "stdout.txt").find("seed=5") != std::string::npos);
}

TEST_CASE_FIXTURE(Workspace, "density, census and lemmas") {
  REQUIRE(run("density --lambda 0.25 --points 11 --x-min 0 --x-max 2.5") == 0);
  const std::string density = slurp(kWork / "stdout.txt");
  CHECK(density.rfind("x,value\n", 0) == 0);
  CHECK(std::count(density.begin(), density.end(), '\n') == 12);
  REQUIRE(run("density --atoms '[[1,1]]' --lambda 0.25 --points 5 --quantity cdf --x-max 3") == 0);
  CHECK(slurp(kWork / "stdout.txt").find("\n3,1\n") != std::string::npos);

  REQUIRE(run("census --n 6 --d 2") == 0);
  const std::string census = slurp(kWork / "stdout.txt");
  CHECK(census.rfind("w,v,r,enumerated,formula,match", 0) == 0);
  CHECK(census.find("false") == std::string::npos);

  CHECK(run("lemmas -o " + (kWork / "lemmas.json").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "lemmas.json"))["passed"] == true);
}

TEST_CASE_FIXTURE(Workspace, "verify and varcheck exit codes") {
  CHECK(run("verify census --n 6 --d 2") == 0);
  const auto report = nlohmann::json::parse(slurp(kWork / "stdout.txt"));
  CHECK(report["passed"] == true);
  CHECK(report["seed"].is_number());
  CHECK(run("verify yaskov --samples 2000") == 0);
  CHECK(run("varcheck --model 1a --scale 0.05 --samples 2000 --matrices 2") == 0);
  // A prefactor far below any honest constant makes the tensor bound fail.
  CHECK(run("varcheck --model 2 --scale 0.02 --samples 2000 --matrices 2 --bound-constant 1e-9 --bound-cutoff 1") == 1);
  const auto failed = nlohmann::json::parse(slurp(kWork / "stdout.txt"));
  CHECK(failed["passed"] == false);
  CHECK(failed["reports"][0]["bound_kind"] == "tensor");
}
