#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rigidlab/io.hpp"
#include "rigidlab/piola.hpp"

using namespace rigidlab;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
#ifdef RIGIDLAB_CLI_PATH
  return RIGIDLAB_CLI_PATH;
#else
  const char* p = std::getenv("RIGIDLAB_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
#endif
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rigidlab_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  static inline int counter = 0;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  // Enough for the unquoted numeric CSVs the tool emits.
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

const std::string kTorusConfig = R"({
  "manifold": "flat_torus",
  "level": 1,
  "p": 2.0,
  "seed": 7,
  "family": {"kind": "double_theta"}
})";

}  // namespace

TEST_CASE("cli: energy output matches the library on double_theta") {
  TempDir dir;
  const std::string cfg = dir.str() + "/config.json";
  write_text(cfg, kTorusConfig);
  REQUIRE(run_cli("energy --config " + cfg + " --out " + dir.str()) == 0);

  const auto rows = parse_csv(slurp(dir.str() + "/energy.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>(
                       {"map", "Ep", "e", "degree", "piola_residual"}));
  CHECK(rows[1][0] == "double_theta");
  // E_2 of (2 theta, phi) on the flat torus is 4 pi^2.
  CHECK(std::stod(rows[1][1]) ==
        doctest::Approx(4.0 * M_PI * M_PI).epsilon(0.01));
  CHECK(std::stod(rows[1][3]) == doctest::Approx(2.0).epsilon(0.02));

  // The CSV numbers equal direct library evaluations on the same family.
  const ExperimentConfig parsed = parse_config(kTorusConfig);
  const SurfaceMesh mesh =
      build_mesh(Manifold::get(parsed.manifold), parsed.resolution());
  const auto family = generate_family(mesh, parsed);
  REQUIRE(family.size() == 1);
  CHECK(std::stod(rows[1][1]) ==
        doctest::Approx(energy(family[0].map, parsed.p).Ep).epsilon(1e-10));
  CHECK(std::stod(rows[1][3]) ==
        doctest::Approx(degree(family[0].map)).epsilon(1e-10));

  // Mesh exports exist.
  CHECK(fs::exists(dir.str() + "/mesh.off"));
  CHECK(fs::exists(dir.str() + "/mesh.obj"));
}

TEST_CASE("cli: reruns are byte-identical") {
  TempDir a, b;
  const std::string cfg = a.str() + "/config.json";
  const std::string body = R"({
    "manifold": "sphere", "level": 2, "p": 2.0, "seed": 3,
    "family": {"kind": "random", "count": 2, "eps": [0.02]}
  })";
  write_text(cfg, body);
  REQUIRE(run_cli("energy --config " + cfg + " --out " + a.str()) == 0);
  REQUIRE(run_cli("energy --config " + cfg + " --out " + b.str()) == 0);
  CHECK(slurp(a.str() + "/energy.csv") == slurp(b.str() + "/energy.csv"));
  CHECK(slurp(a.str() + "/mesh.off") == slurp(b.str() + "/mesh.off"));
}

TEST_CASE("cli: invalid configs exit with code 2") {
  TempDir dir;
  const std::string cfg = dir.str() + "/config.json";

  write_text(cfg, R"({"manifold": "sphere", "p": 0.5})");
  CHECK(run_cli("energy --config " + cfg + " --out " + dir.str()) == 2);

  write_text(cfg, R"({"manifold": "sphere", "bogus_key": 1})");
  CHECK(run_cli("energy --config " + cfg + " --out " + dir.str()) == 2);

  write_text(cfg, "{not json");
  CHECK(run_cli("energy --config " + cfg + " --out " + dir.str()) == 2);

  // double_theta is torus-only.
  write_text(cfg, R"({"manifold": "sphere",
                      "family": {"kind": "double_theta"}})");
  CHECK(run_cli("energy --config " + cfg + " --out " + dir.str()) == 2);

  CHECK(run_cli("energy --config " + dir.str() + "/missing.json --out " +
                dir.str()) == 2);
  CHECK(run_cli("energy") == 2);           // missing required --config
  CHECK(run_cli("no_such_command") == 2);  // unknown subcommand
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: nullspace command writes spectrum and basis") {
  TempDir dir;
  const std::string cfg = dir.str() + "/config.json";
  write_text(cfg, R"({"manifold": "flat_torus", "level": 1, "seed": 1})");
  REQUIRE(run_cli("nullspace --config " + cfg + " --out " + dir.str()) == 0);

  const auto rows = parse_csv(slurp(dir.str() + "/eigenvalues.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>({"index", "eigenvalue"}));
  // Flat torus: exactly 2 nullspace eigenvalues, then a gap.
  CHECK(std::abs(std::stod(rows[1][1])) < 1e-10);
  CHECK(std::abs(std::stod(rows[2][1])) < 1e-10);
  CHECK(std::stod(rows[3][1]) > 1.0);
  CHECK(fs::exists(dir.str() + "/basis_0.json"));
  CHECK(fs::exists(dir.str() + "/basis_1.json"));
  CHECK(fs::exists(dir.str() + "/nullspace.json"));
}

TEST_CASE("cli: recover on an identity map succeeds") {
  TempDir dir;
  const std::string cfg = dir.str() + "/config.json";
  write_text(cfg, R"({"manifold": "sphere", "level": 2, "seed": 1,
                      "family": {"kind": "identity"}})");
  REQUIRE(run_cli("recover --config " + cfg + " --out " + dir.str()) == 0);
  const std::string report = slurp(dir.str() + "/report_identity.json");
  CHECK(report.find("rigidlab-report-v1") != std::string::npos);
  CHECK(report.find("\"ok\": true") != std::string::npos);
  CHECK(fs::exists(dir.str() + "/deficit_identity.svg"));
}

TEST_CASE("cli: heatflow command writes monitor table") {
  TempDir dir;
  const std::string cfg = dir.str() + "/config.json";
  write_text(cfg, R"({"manifold": "sphere", "level": 2, "seed": 5,
                      "family": {"kind": "random", "count": 1,
                                 "eps": [0.05]},
                      "pipeline": {"T1": 0.01}})");
  REQUIRE(run_cli("heatflow --config " + cfg + " --out " + dir.str()) == 0);
  const auto rows = parse_csv(slurp(dir.str() + "/heatflow.csv"));
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0][0] == "step");
  // Energy monotone down the monitor table.
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][2]) <= std::stod(rows[i - 1][2]) + 1e-10);
  }
}
