#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

// Runs the command line under a shell and returns the process exit code.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(STCLF_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;

  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "stclf-cli-XXXXXX").string();
    char* made = mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    path = made;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream os(p);
    os << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("cli: help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("run --help") == 0);
}

TEST_CASE("cli: configuration problems exit with code 2") {
  CHECK(run_cli("run --scenario no-such-plant") == 2);
  CHECK(run_cli("nonsense-subcommand") == 2);
  CHECK(run_cli("run") == 2);  // no scenario given
  CHECK(run_cli("run --scenario train --strategy sideways") == 2);

  const TempDir tmp;
  const std::string bad = tmp.file("bad.json", R"({"scenario": "train", "typo_key": 1})");
  CHECK(run_cli("run --config " + bad) == 2);
}

TEST_CASE("cli: hypothesis failures exit with code 3") {
  const TempDir tmp;
  // The sensor is too coarse for the core geometry: preparation fails.
  CHECK(run_cli("run --scenario train --eps 0.2 --out " + tmp.path.string()) == 3);
}

TEST_CASE("cli: a zero-horizon run succeeds and writes its artifacts") {
  const TempDir tmp;
  const std::string cfg = tmp.file("t0.json", R"({
    "scenario": "train",
    "sim": {"T": 0.0}
  })");
  CHECK(run_cli("run --config " + cfg + " --out " + tmp.path.string()) == 0);
  CHECK(fs::exists(tmp.path / "prepared.json"));
  CHECK(fs::exists(tmp.path / "summary_1.json"));
  CHECK(fs::exists(tmp.path / "trace_1.csv"));
}

TEST_CASE("cli: verify reports the hypothesis rows and exits by the gate") {
  const TempDir tmp;
  CHECK(run_cli("verify --scenario train --out " + tmp.path.string()) == 0);
  REQUIRE(fs::exists(tmp.path / "verify.txt"));
  std::ifstream is(tmp.path / "verify.txt");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(text.find("required rows: PASS") != std::string::npos);
  CHECK(text.find("uniform-accuracy-bound (informational)") != std::string::npos);
}

TEST_CASE("cli: field writes the admissible-error grid") {
  const TempDir tmp;
  CHECK(run_cli("field --scenario cubic3d --grid 5 --out " + tmp.path.string()) == 0);
  REQUIRE(fs::exists(tmp.path / "field.csv"));
  std::ifstream is(tmp.path / "field.csv");
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(text.find("# minimum eps_bar = ") != std::string::npos);
  CHECK(text.find("# required accuracy = ") != std::string::npos);
}
