#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace spdelab_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"spdelab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spdelab_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("defaults and overrides") {
  RunConfig c;
  CHECK(c.get("q") == "2");
  CHECK(c.origin("q") == "default");
  apply_override(c, "q=2.5");
  CHECK(c.get("q") == "2.5");
  CHECK_THROWS_AS(apply_override(c, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "q"), ConfigError);
  CHECK_THROWS_AS(c.get("nonsense"), ConfigError);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("files");
  SUBCASE("override wins over the file") {
    write(dir / "a.cfg", "# comment\nsamples = 7\nq = 3\n");
    RunConfig c;
    load_file(c, dir / "a.cfg");
    apply_override(c, "q=4");
    CHECK(c.get("samples") == "7");
    CHECK(c.get("q") == "4");
    CHECK(c.origin("samples").find("a.cfg:2") != std::string::npos);
  }
  SUBCASE("unknown key names its line") {
    write(dir / "b.cfg", "samples = 7\n\nbogus = 1\n");
    RunConfig c;
    try {
      load_file(c, dir / "b.cfg");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("b.cfg:3") != std::string::npos);
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    RunConfig c;
    CHECK_THROWS_AS(load_file(c, dir / "missing.cfg"), ConfigError);
  }
  SUBCASE("echo round trip") {
    RunConfig c;
    apply_preset(c, "evolve-noise");
    write(dir / "echo.cfg", c.echo());
    RunConfig d;
    load_file(d, dir / "echo.cfg");
    CHECK(d.echo() == c.echo());
  }
  fs::remove_all(dir);
}

TEST_CASE("presets") {
  RunConfig c;
  apply_preset(c, "space-desk");
  CHECK(c.get("ref_cells") == "256");
  CHECK(c.get("space_levels") == "16,32,64,128");
  CHECK_THROWS_AS(apply_preset(c, "nope"), ConfigError);
  CHECK(preset_names().size() >= 6);
}

TEST_CASE("typed settings") {
  RunConfig c;
  apply_override(c, "variants=deterministic|q=0.1|gamma=0.5,coupling=half_linear");
  const Settings s(c, SPDELAB_STUDY_EVOLVE);
  REQUIRE(s.variants().size() == 3);
  CHECK(s.variants()[0].deterministic == 1);
  CHECK(s.variants()[1].has_q == 1);
  CHECK(s.variants()[1].q == 0.1);
  CHECK(s.variants()[2].has_gamma == 1);
  CHECK(s.variants()[2].coupling == SPDELAB_G_HALF_LINEAR);
  CHECK(s.params().padding_mode == SPDELAB_PADDING_TAPERED);
  CHECK(s.params().auto_padding == 1);

  RunConfig rough;
  apply_override(rough, "q=1.5");
  CHECK_THROWS_AS(Settings(rough, SPDELAB_STUDY_TIME), ConfigError);
  RunConfig bad;
  apply_override(bad, "samples=ten");
  CHECK_THROWS_AS(Settings(bad, SPDELAB_STUDY_TIME), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  const auto r = run({"converge-time", "--set", "q=1.5", "--print-config"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("q must be at least 2") != std::string::npos);
  CHECK(run({"converge-time", "--config", "/nonexistent.cfg"}).code == kExitConfig);
  CHECK(run({"--version"}).code == kExitOk);
  CHECK(run({"--list-keys"}).out.find("padding_mode") != std::string::npos);
}

TEST_CASE("print-config shows the effective values") {
  const auto r = run({"converge-space", "-p", "space-desk", "-s", "samples=3", "--print-config"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("samples = 3") != std::string::npos);
  CHECK(r.out.find("ref_cells = 256") != std::string::npos);
}

TEST_CASE("sample-field is reproducible") {
  const fs::path a = scratch("field_a"), b = scratch("field_b");
  for (const auto& dir : {a, b})
    REQUIRE(run({"sample-field", "--set", "ref_cells=32", "--set", "sample_index=4", "--run-dir",
                 dir.string()})
                .code == kExitOk);
  const std::string x = slurp(a / "sample_field_4.csv");
  CHECK(x.rfind("node_index,x,z,a", 0) == 0);
  CHECK(x == slurp(b / "sample_field_4.csv"));
  CHECK(fs::exists(a / "config.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("covariance-check writes the comparison table") {
  const fs::path dir = scratch("cov");
  const auto r = run({"covariance-check", "--set", "q=2.5", "--set", "check_lags=0,0.5,1",
                      "--run-dir", dir.string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream in(dir / "covariance_check.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,quadrature,closed_form,difference");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double diff = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(diff) < 1e-8);
  }
  CHECK(rows == 3);
  fs::remove_all(dir);
}

TEST_CASE("timestamped run directories do not collide") {
  const fs::path root = scratch("runs");
  for (int i = 0; i < 2; ++i)
    REQUIRE(run({"padding-check", "--set", "ref_cells=16", "--set", "padding_list=0,8",
                 "--out", root.string()})
                .code == kExitOk);
  std::size_t dirs = 0;
  for (const auto& e : fs::directory_iterator(root)) {
    ++dirs;
    CHECK(fs::exists(e.path() / "padding_check.csv"));
    CHECK(e.path().filename().string().find("-seed20240601-padding-check") != std::string::npos);
  }
  CHECK(dirs == 2);
  fs::remove_all(root);
}
