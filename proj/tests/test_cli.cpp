#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ergodiff/cli.hpp"

namespace fs = std::filesystem;
using ergodiff::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("ergodiff_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& sub) const { return (dir / sub).string(); }
};

std::size_t polylines(const std::string& svg) {
  std::size_t n = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes one row per checkpoint") {
    Scratch s("sim");
    const auto r = cli({"simulate", "--field", "z4", "--start", "1,1", "--delta", "1e-4", "--T", "1", "--seed", "7",
                        "--out", s / "a"});
    REQUIRE(r.code == 0);
    const auto rows = lines(slurp(s / "a/trajectory.csv"));
    CHECK(rows.size() == 1 + 10000 / 100 + 1);
    CHECK(rows[0] == "t,x1,x2");
    CHECK(rows[1] == "0,1,1");
    const auto m = nlohmann::json::parse(slurp(s / "a/manifest.json"));
    CHECK(m["subcommand"] == "simulate");
    CHECK(m["seed"] == 7);
    CHECK(m["outputs"].size() == 1);
  }

  TEST_CASE("missing field is a usage error naming the flag") {
    const auto r = cli({"simulate", "--start", "1,1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--field") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    Scratch s("usage");
    CHECK(cli({}).code == 2);
    CHECK(cli({"simulate", "--field", "nope", "--out", s / "x"}).code == 2);
    CHECK(cli({"simulate", "--field", "z4", "--delta", "0", "--out", s / "x"}).code == 2);
    CHECK(cli({"simulate", "--field", "z4", "--start", "1", "--out", s / "x"}).code == 2);
    CHECK(cli({"simulate", "--field", "z4", "--scheme", "rk4", "--out", s / "x"}).code == 2);
    CHECK(cli({"simulate", "--field", "z4", "--delta", "abc"}).code == 2);
    CHECK(cli({"classify", "--out", s / "x"}).code == 2);
    CHECK(cli({"classify", "--profile", "unknown", "--out", s / "x"}).code == 2);
    CHECK(cli({"ergodic", "--box", "3,1", "--out", s / "x"}).code == 2);
    CHECK(cli({"order-check", "--levels", "6", "--out", s / "x"}).code == 2);
    CHECK(cli({"simulate", "--manifest", s / "missing.json"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("schemes differ but share the initial row") {
    Scratch s("schemes");
    REQUIRE(cli({"simulate", "--field", "z4", "--start", "1,1", "--T", "0.1", "--seed", "3", "--out", s / "t"}).code == 0);
    REQUIRE(cli({"simulate", "--field", "z4", "--start", "1,1", "--T", "0.1", "--seed", "3", "--scheme", "euler",
                 "--out", s / "e"})
                .code == 0);
    const auto a = lines(slurp(s / "t/trajectory.csv"));
    const auto b = lines(slurp(s / "e/trajectory.csv"));
    CHECK(a[1] == b[1]);
    CHECK(a.back() != b.back());
  }

  TEST_CASE("explosion exits with 3 and keeps partial output") {
    Scratch s("boom");
    const auto r = cli({"simulate", "--field", "z4", "--start", "0,20", "--delta", "1e-2", "--T", "10", "--out", s / "b"});
    CHECK(r.code == 3);
    CHECK(r.err.find("explosion") != std::string::npos);
    const auto rows = lines(slurp(s / "b/trajectory.csv"));
    CHECK(rows.size() >= 2);
    CHECK(rows.size() < 1 + 1000 / 100 + 1);
  }

  TEST_CASE("bundled field file matches the built-in field") {
    Scratch s("file");
    const std::string file = std::string(ERGODIFF_SOURCE_DIR) + "/data/fields/z4.json";
    REQUIRE(cli({"simulate", "--field", file, "--start", "1,0", "--T", "0.1", "--out", s / "f"}).code == 0);
    REQUIRE(cli({"simulate", "--field", "z4", "--start", "1,0", "--T", "0.1", "--out", s / "b"}).code == 0);
    CHECK(slurp(s / "f/trajectory.csv") == slurp(s / "b/trajectory.csv"));
  }

  TEST_CASE("classify summaries") {
    Scratch s("classify");
    auto summary = [&](const std::vector<std::string>& extra) {
      std::vector<std::string> args{"classify", "--out", s / "c"};
      args.insert(args.end(), extra.begin(), extra.end());
      const auto r = cli(args);
      REQUIRE(r.code == 0);
      CHECK(r.out.find("summary:") != std::string::npos);
      return nlohmann::json::parse(slurp(s / "c/report.json"))["summary"].get<std::string>();
    };
    CHECK(summary({"--profile", "brownian", "--dim", "2"}) == "recurrent");
    CHECK(summary({"--profile", "z4"}) == "inconclusive");
    CHECK(summary({"--profile", "power-well", "--dim", "3", "--alpha", "1"}) == "transient");
    CHECK(summary({"--profile", "power-attractive", "--dim", "2", "--alpha", "4"}) == "positive_recurrent");
    CHECK(summary({"--field", "quartic-well", "--doublings", "5"}) == "positive_recurrent");
  }

  TEST_CASE("ergodic outputs") {
    Scratch s("ergodic");
    REQUIRE(cli({"ergodic", "--n-traj", "1", "--T", "2", "--delta", "1e-3", "--centers", "0,0", "--out", s / "one"})
                .code == 0);
    CHECK(polylines(slurp(s / "one/fT_c0.svg")) == 1);
    REQUIRE(cli({"ergodic", "--n-traj", "1", "--T", "2", "--delta", "1e-3", "--centers", "0,0", "--out", s / "two"})
                .code == 0);
    CHECK(slurp(s / "one/fT_c0.svg") == slurp(s / "two/fT_c0.svg"));
    const auto rows = lines(slurp(s / "one/series_c0.csv"));
    CHECK(rows[0] == "T,f_T,seed,start_x1,start_x2,center_x1,center_x2");
    const auto summary = nlohmann::json::parse(slurp(s / "one/summary.json"));
    CHECK(summary["centers"].size() == 1);
    CHECK(summary["centers"][0]["trajectories"].size() == 1);
  }

  TEST_CASE("ergodic default centers") {
    Scratch s("centers");
    REQUIRE(cli({"ergodic", "--n-traj", "2", "--T", "1", "--delta", "1e-3", "--box", "-2,2", "--out", s / "d"}).code ==
            0);
    for (int i = 0; i < 7; ++i) CHECK(fs::exists(s / ("d/fT_c" + std::to_string(i) + ".svg")));
    const auto summary = nlohmann::json::parse(slurp(s / "d/summary.json"));
    CHECK(summary["centers"].size() == 7);
  }

  TEST_CASE("manifest replay is byte identical at any worker count") {
    Scratch s("replay");
    REQUIRE(cli({"ergodic", "--n-traj", "4", "--T", "2", "--delta", "1e-3", "--box", "-3,3", "--centers", "0,0;2,0",
                 "--seed", "11", "--out", s / "a"})
                .code == 0);
    REQUIRE(cli({"--manifest", s / "a/manifest.json", "--out", s / "b", "--workers", "3"}).code == 0);
    REQUIRE(cli({"ergodic", "--manifest", s / "a/manifest.json", "--out", s / "c", "--workers", "2"}).code == 0);
    for (const char* f : {"series_c0.csv", "series_c1.csv", "fT_c0.svg", "fT_c1.svg", "summary.json"}) {
      CHECK(slurp(s / (std::string("a/") + f)) == slurp(s / (std::string("b/") + f)));
      CHECK(slurp(s / (std::string("a/") + f)) == slurp(s / (std::string("c/") + f)));
    }
    CHECK(cli({"simulate", "--manifest", s / "a/manifest.json"}).code == 2);
  }

  TEST_CASE("manifest flags can be overridden") {
    Scratch s("override");
    REQUIRE(cli({"simulate", "--field", "z4", "--start", "0.5,0.5", "--T", "0.2", "--out", s / "a"}).code == 0);
    REQUIRE(cli({"--manifest", s / "a/manifest.json", "--T", "0.1", "--out", s / "b"}).code == 0);
    CHECK(lines(slurp(s / "b/trajectory.csv")).size() == 1 + 10 + 1);
    const auto a = lines(slurp(s / "a/trajectory.csv"));
    const auto b = lines(slurp(s / "b/trajectory.csv"));
    CHECK(a[5] == b[5]);
  }

  TEST_CASE("order-check is reproducible") {
    Scratch s("order");
    const std::vector<std::string> args{"order-check", "--levels", "3,4,5", "--ref-level", "7",
                                        "--n-paths",   "10",       "--seed", "5"};
    auto a = args;
    a.insert(a.end(), {"--out", s / "a"});
    auto b = args;
    b.insert(b.end(), {"--out", s / "b", "--workers", "3"});
    REQUIRE(cli(a).code == 0);
    REQUIRE(cli(b).code == 0);
    CHECK(slurp(s / "a/order.json") == slurp(s / "b/order.json"));
    REQUIRE(cli({"--manifest", s / "a/manifest.json", "--out", s / "c"}).code == 0);
    CHECK(slurp(s / "a/order.json") == slurp(s / "c/order.json"));
  }

  TEST_CASE("seed from the environment, flags and config file") {
    Scratch s("seed");
    ::setenv("ERGODIFF_SEED", "12", 1);
    REQUIRE(cli({"simulate", "--field", "z4", "--T", "0.01", "--out", s / "env"}).code == 0);
    CHECK(nlohmann::json::parse(slurp(s / "env/manifest.json"))["seed"] == 12);
    REQUIRE(cli({"simulate", "--field", "z4", "--T", "0.01", "--seed", "4", "--out", s / "flag"}).code == 0);
    CHECK(nlohmann::json::parse(slurp(s / "flag/manifest.json"))["seed"] == 4);
    ::setenv("ERGODIFF_SEED", "x1", 1);
    CHECK(cli({"simulate", "--field", "z4", "--out", s / "bad"}).code == 2);
    ::unsetenv("ERGODIFF_SEED");

    {
      std::ofstream toml(s / "run.toml");
      toml << "[simulate]\nfield = \"z4\"\nT = 0.5\nseed = 9\nstride = 10\n";
    }
    REQUIRE(cli({"simulate", "--config", s / "run.toml", "--T", "0.2", "--out", s / "cfg"}).code == 0);
    const auto m = nlohmann::json::parse(slurp(s / "cfg/manifest.json"));
    CHECK(m["seed"] == 9);
    CHECK(m["config"]["T"] == "0.2");
    CHECK(m["config"]["stride"] == "10");
  }
}
