#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcfem/app/config.hpp"
#include "mcfem/app/csv.hpp"
#include "mcfem/app/runs.hpp"

using namespace mcfem;
using namespace mcfem::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcfem_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MCFEM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kSmall1D = R"({
  "dimension": 1,
  "mesh": {"length": 10.0, "dz": 0.2},
  "material": {"sigma": 1.0, "mu": 1.0},
  "profile": {"type": "rect_pulse_1d", "a": 4.0, "b": 6.0, "amplitude": 1.0},
  "peclet": [2, 2000]
})";

template <typename F>
std::string config_error_path(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors carry the field path") {
  auto j = json::parse(kSmall1D);
  CHECK_NOTHROW(parse_run_1d(j));

  auto empty = j;
  empty["peclet"] = json::array();
  CHECK(config_error_path([&] { parse_run_1d(empty); }) == "$.peclet");

  auto bad_dz = j;
  bad_dz["mesh"]["dz"] = 0.3;
  CHECK(config_error_path([&] { parse_run_1d(bad_dz); }) == "$.mesh.length");

  auto no_sigma = j;
  no_sigma["material"].erase("sigma");
  CHECK(config_error_path([&] { parse_run_1d(no_sigma); }) == "$.material.sigma");

  auto bad_scheme = j;
  bad_scheme["schemes"] = {"supg"};
  CHECK(config_error_path([&] { parse_run_1d(bad_scheme); }) == "$.schemes");

  auto bad_type = j;
  bad_type["profile"]["type"] = "triangle";
  CHECK(config_error_path([&] { parse_run_1d(bad_type); }) == "$.profile.type");

  auto both = j;
  both["u_z"] = {1.0};
  CHECK(config_error_path([&] { parse_run_1d(both); }) == "$");

  auto dim = j;
  dim["dimension"] = 2;
  CHECK(config_error_path([&] { parse_run_1d(dim); }) == "$.dimension");
}

TEST_CASE("scheme override") {
  const std::vector<Scheme> base{Scheme::Galerkin};
  CHECK(apply_scheme_override(base, "").size() == 1);
  CHECK(apply_scheme_override(base, "both").size() == 2);
  CHECK(apply_scheme_override(base, "averaged") == std::vector<Scheme>{Scheme::ElementAveraged});
  CHECK_THROWS_AS(apply_scheme_override(base, "x"), ConfigError);
}

TEST_CASE("sweep config") {
  const auto j = json::parse(R"({"dimension": 1, "layout": {"m_b": 10, "m_c": 8, "m_d": 10}, "dz": 0.1,
                                 "sweep": {"pe_min": 1.1, "pe_max": 1000, "count": 5}})");
  const auto c = parse_sweep(j);
  REQUIRE(c.peclet.size() == 5);
  CHECK(c.peclet.front() == Catch::Approx(1.1));
  CHECK(c.peclet.back() == Catch::Approx(1000));
  CHECK(c.schemes.size() == 2);
}

TEST_CASE("2D config derives the axial extent from the field width") {
  const auto j = json::parse(R"({"dimension": 2, "geometry": {"thickness": 1.3},
      "material": {"sigma": 7.21e6, "mu_r": 1}, "profile": {"type": "smooth_circle", "radius": 0.65, "amplitude": 1},
      "peclet": [60]})");
  const auto c = parse_run_2d(j);
  CHECK(c.geometry.axial_length == Catch::Approx(6.0 * 4.0 * 0.65));
  CHECK(c.material.mu == Catch::Approx(kMu0));
}

TEST_CASE("csv formatting round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(fmt_double(x)) == x);
  CHECK(fmt_double(std::nan("")) == "nan");
}

TEST_CASE("run-1d output is deterministic and self-describing") {
  const auto dir = scratch("run1d");
  write(dir / "c.json", kSmall1D);
  REQUIRE(cli("run-1d --config " + (dir / "c.json").string() + " --out " + (dir / "a").string(), dir / "log") == 0);
  REQUIRE(cli("run-1d --config " + (dir / "c.json").string() + " --out " + (dir / "b").string(), dir / "log") == 0);
  for (const char* f : {"run1d_pe2_galerkin.csv", "run1d_pe2000_averaged.csv"}) {
    const std::string a = slurp(dir / "a" / f), b = slurp(dir / "b" / f);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.rfind("# mcfem " + std::string(kVersion), 0) == 0);
    CHECK(a.find("# config {") != std::string::npos);
    CHECK(a.find("\nz,a_y,b_x\n") != std::string::npos);
  }
  CHECK(fs::exists(dir / "a" / "run1d_pe2000.svg"));
  const auto rec = json::parse(slurp(dir / "a" / "run_record_run-1d.json"));
  CHECK(rec["config_hash"].get<std::string>().size() == 16);
  CHECK(rec["solves"].size() == 4);
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("exit");
  auto j = json::parse(kSmall1D);
  j["peclet"] = json::array();
  write(dir / "empty.json", j.dump());
  CHECK(cli("run-1d --config " + (dir / "empty.json").string() + " --out " + dir.string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("$.peclet") != std::string::npos);
  write(dir / "broken.json", "{ not json");
  CHECK(cli("run-1d --config " + (dir / "broken.json").string() + " --out " + dir.string(), dir / "log") == 2);
  CHECK(cli("run-1d --config " + (dir / "missing.json").string(), dir / "log") == 2);
  CHECK(cli("run-2d --config " + (dir / "empty.json").string() + " --out " + dir.string(), dir / "log") == 2);
}

TEST_CASE("verify passes, and a perturbed N1 fails naming it") {
  const auto dir = scratch("verify");
  CHECK(cli("verify --out " + (dir / "ok").string(), dir / "log") == 0);
  const std::string report = slurp(dir / "ok" / "verify.txt");
  CHECK(report.find("derived cofactor f3(Zm)") != std::string::npos);
  CHECK(report.find("FAIL") == std::string::npos);
  CHECK(cli("verify --perturb N1 --out " + (dir / "bad").string(), dir / "log") == 4);
  CHECK(slurp(dir / "log").find("N1") != std::string::npos);
}

TEST_CASE("sweep flags Pe <= 1 rows and tracks the closed form") {
  const auto dir = scratch("sweep");
  write(dir / "s.json", R"({"dimension": 1, "layout": {"m_b": 30, "m_c": 16, "m_d": 30}, "dz": 0.1,
                           "sweep": {"values": [0.5, 1.0, 2.0, 10.0, 100.0]}, "threads": 2})");
  REQUIRE(cli("sweep-error --config " + (dir / "s.json").string() + " --out " + dir.string(), dir / "log") == 0);
  std::istringstream in(slurp(dir / "sweep_error.csv"));
  std::string line;
  int flagged = 0, ok = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'p') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 6);
    const double pe = std::stod(cells[0]);
    if (pe <= 1.0) {
      CHECK(cells[5] == "out-of-validity");
      CHECK(cells[2] == "nan");
      ++flagged;
    } else {
      CHECK(cells[5] == "ok");
      CHECK(std::abs(std::stod(cells[1]) - std::stod(cells[2])) <= 1e-6);
      CHECK(std::abs(std::stod(cells[3]) - std::stod(cells[4])) <= 1e-6);
      ++ok;
    }
  }
  CHECK(flagged == 2);
  CHECK(ok == 3);
}

TEST_CASE("2D run with zero amplitude writes all-zero fields") {
  const auto dir = scratch("zero2d");
  write(dir / "z.json", R"({"dimension": 2,
      "geometry": {"thickness": 1.3, "conductor_rows": 4, "air_rows": 3, "nz": 25},
      "material": {"sigma": 7.21e6, "mu_r": 1},
      "profile": {"type": "smooth_circle", "radius": 0.65, "amplitude": 0},
      "peclet": [60], "schemes": ["averaged"], "svg": false})");
  REQUIRE(cli("run-2d --config " + (dir / "z.json").string() + " --out " + dir.string(), dir / "log") == 0);
  for (const char* f : {"centerline_averaged.csv", "field_pe60_averaged.csv"}) {
    std::istringstream in(slurp(dir / f));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
      std::stringstream ls(line);
      std::string c;
      std::getline(ls, c, ',');
      if (std::string(f).rfind("field", 0) == 0) std::getline(ls, c, ',');
      for (; std::getline(ls, c, ',');) CHECK(std::stod(c) == 0.0);
      ++rows;
    }
    CHECK(rows > 0);
  }
}
