// Drives the installed binary through its external contract: config parsing,
// report shape, exit codes, determinism, CSV side outputs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "lpq/matrix.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "lpq_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const auto path = scratch_dir() / name;
  std::ofstream(path) << body;
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LPQ_BIN) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

ordered_json load_json(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return ordered_json::parse(in);
}

const char* kCompactJob = R"({
  "operator": "laplace", "lambda": 1, "p": 2, "q": 2,
  "v": [{"from": 1, "to": 2}],
  "grid": {"t_min": 1e-6, "t_max": 1e6, "points_per_decade": 24},
  "tasks": ["criteria", "normest", "verify", "compactness", "spectrum"]
})";

}  // namespace

TEST_CASE("a full run writes a parseable report and exits 0") {
  const auto cfg = write_config("compact.json", kCompactJob);
  const auto out = scratch_dir() / "compact.json.out";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + out.string() + " --quiet") == 0);

  const auto r = load_json(out);
  CHECK(r.at("tool").at("name") == "lpq");
  CHECK(r.at("regime") == "Laplace-i");
  CHECK(r.at("verdicts").at("bounded") == "yes");
  CHECK(r.at("verdicts").at("compact") == "yes");
  CHECK(r.at("normest").at("estimate").get<double>() > 0.3);
  CHECK(r.at("bounds").at("lower_ok") == true);
  CHECK(r.at("bounds").at("upper_ok") == true);
  CHECK(r.at("diagnostics").contains("spectrum"));
  CHECK(r.at("criteria").at("curves").at("A_L").at("sup").get<double>() ==
        Catch::Approx(std::sqrt(0.5)).epsilon(1e-9));
  // the clock is the designated nondeterministic field and comes last
  CHECK(r.rbegin().key() == "wall_clock_seconds");
}

TEST_CASE("reruns are byte-identical once the clock is removed") {
  const auto cfg = write_config("compact2.json", kCompactJob);
  const auto a = scratch_dir() / "a.json";
  const auto b = scratch_dir() / "b.json";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + a.string() + " --quiet") == 0);
  REQUIRE(run_cli("run " + cfg.string() + " --out " + b.string() + " --quiet") == 0);
  auto ra = load_json(a);
  auto rb = load_json(b);
  ra.erase("wall_clock_seconds");
  rb.erase("wall_clock_seconds");
  CHECK(ra.dump() == rb.dump());
}

TEST_CASE("curve csv files land next to the report") {
  const auto cfg = write_config("csv.json", kCompactJob);
  const auto out = scratch_dir() / "csv.json.out";
  const auto dir = scratch_dir() / "curves";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + out.string() + " --csv " +
                  dir.string() + " --quiet") == 0);
  REQUIRE(fs::exists(dir / "A_L.csv"));
  std::ifstream f(dir / "A_L.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "t,value");
  double t = 0.0, val = 0.0;
  char comma = 0;
  std::size_t rows = 0;
  while (f >> t >> comma >> val) ++rows;
  CHECK(rows > 200);
}

TEST_CASE("task override trims the report") {
  const auto cfg = write_config("trim.json", kCompactJob);
  const auto out = scratch_dir() / "trim.json.out";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + out.string() +
                  " --task criteria --quiet") == 0);
  const auto r = load_json(out);
  CHECK(r.contains("criteria"));
  CHECK_FALSE(r.contains("normest"));
  CHECK_FALSE(r.contains("verdicts"));
}

TEST_CASE("input errors exit 1") {
  SECTION("exponent out of domain") {
    const auto cfg = write_config(
        "p_half.json",
        R"({"operator": "laplace", "lambda": 1, "p": 0.5, "q": 2, "v": [{}]})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("unknown key at the root") {
    const auto cfg = write_config(
        "extra.json",
        R"({"operator": "laplace", "lambda": 1, "p": 2, "q": 2, "v": [{}], "zz": 0})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("unknown key inside a weight piece") {
    const auto cfg = write_config(
        "piece.json",
        R"({"operator": "laplace", "lambda": 1, "p": 2, "q": 2, "v": [{"slope": 1}]})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("unknown operator") {
    const auto cfg = write_config(
        "op.json", R"({"operator": "mellin", "lambda": 1, "p": 2, "q": 2, "v": [{}]})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("unknown task") {
    const auto cfg = write_config(
        "task.json",
        R"({"operator": "laplace", "lambda": 1, "p": 2, "q": 2, "v": [{}],
            "tasks": ["normest", "everything"]})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("malformed json") {
    const auto cfg = write_config("broken.json", "{not json");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
  SECTION("missing file") {
    CHECK(run_cli("run " + (scratch_dir() / "nope.json").string() + " --quiet") == 1);
  }
  SECTION("spectrum task away from p = q = 2") {
    const auto cfg = write_config(
        "spec3.json",
        R"({"operator": "laplace", "lambda": 1, "p": 2, "q": 3, "v": [{}],
            "tasks": ["spectrum"]})");
    CHECK(run_cli("run " + cfg.string() + " --quiet") == 1);
  }
}

TEST_CASE("an uncharacterized regime exits 2") {
  // forward Hardy at q = 1 has no stated boundedness test
  const auto cfg = write_config(
      "hardy_q1.json",
      R"({"operator": "hardy", "lambda": 1, "p": 2, "q": 1,
          "v": [{"from": 0, "to": 1}], "w": [{"a": -2, "from": 1}],
          "grid": {"t_min": 1e-3, "t_max": 1e3, "points_per_decade": 8}})");
  const auto out = scratch_dir() / "hardy_q1.json.out";
  CHECK(run_cli("run " + cfg.string() + " --out " + out.string() + " --quiet") == 2);
  const auto r = load_json(out);
  CHECK(r.at("verdicts").at("compact") == "inconclusive");
}

TEST_CASE("the outer weight of the exponential kernel is reported as ignored") {
  const auto cfg = write_config(
      "wnote.json",
      R"({"operator": "laplace", "lambda": 1, "p": 2, "q": 2,
          "v": [{"from": 1, "to": 2}], "w": [{"c": 3}],
          "grid": {"t_min": 1e-3, "t_max": 1e3, "points_per_decade": 8},
          "tasks": ["criteria"]})");
  const auto out = scratch_dir() / "wnote.json.out";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  const auto r = load_json(out);
  REQUIRE(r.at("notes").size() == 1);
  CHECK(r.at("notes")[0].get<std::string>().find("ignored") != std::string::npos);
}

TEST_CASE("table weights and inf spellings parse") {
  const auto cfg = write_config(
      "table.json",
      R"({"operator": "laplace", "lambda": 1, "p": 2, "q": "inf",
          "v": {"table": [[0.5, 1.0], [1.0, 2.0], [2.0, 0.5]]},
          "grid": {"t_min": 1e-2, "t_max": 1e2, "points_per_decade": 8},
          "tasks": ["criteria", "normest"]})");
  const auto out = scratch_dir() / "table.json.out";
  REQUIRE(run_cli("run " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  const auto r = load_json(out);
  CHECK(r.at("config").at("q") == "inf");
  CHECK(r.at("normest").at("estimate").get<double>() > 0.0);
}

TEST_CASE("matrix csv export holds full precision") {
  lpq::Matrix m = lpq::Matrix::zeros(2, 3);
  m.at(0, 0) = 1.0 / 3.0;
  m.at(0, 2) = -2.5e-17;
  m.at(1, 1) = 12345.678901234567;
  const auto path = scratch_dir() / "m.csv";
  lpq::write_matrix_csv(path.string(), m);

  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  std::istringstream row0(line);
  std::string cell;
  std::getline(row0, cell, ',');
  CHECK(std::stod(cell) == 1.0 / 3.0);
  std::getline(row0, cell, ',');
  CHECK(std::stod(cell) == 0.0);
  std::getline(row0, cell, ',');
  CHECK(std::stod(cell) == -2.5e-17);
  std::getline(f, line);
  std::istringstream row1(line);
  std::getline(row1, cell, ',');
  std::getline(row1, cell, ',');
  CHECK(std::stod(cell) == 12345.678901234567);
  CHECK_FALSE(std::getline(f, line));
}

TEST_CASE("selftest subcommand passes") {
  CHECK(run_cli("selftest --quiet") == 0);
}
