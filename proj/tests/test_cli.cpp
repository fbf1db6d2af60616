#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "solar/experiment.hpp"

using namespace solar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("solar-flow-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_spec(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "spec.ini";
  std::ofstream(p) << text;
  return p;
}

int cli(const std::string& args, const fs::path& err_file) {
  const std::string cmd = std::string(SOLAR_FLOW_BIN) + " " + args + " > /dev/null 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("spec parsing") {
  SUBCASE("sections, comments and fourier modes") {
    const auto s = parse_experiment(KeyValueFile::parse(
        "# comment\n[model]\nfamily = mu-lambda\nlambda = 3 ; trailing\n"
        "[initial]\nconstant = 1\nmodes = 1:0.1:0, 2:0:0.05\n[run]\nn = 64\nt_end = 0.5\n"));
    CHECK(s.lambda == 3.0);
    CHECK(s.run.n == 64);
    CHECK(s.run.t_end == 0.5);
    REQUIRE(s.initial.modes.size() == 2);
    CHECK(s.initial.modes[1].k == 2);
    CHECK(s.initial.modes[1].cos_coeff == 0.05);
    const Field u0 = s.initial.sample(PeriodicGrid(64));
    CHECK(mean(u0) == doctest::Approx(1.0));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_experiment(KeyValueFile::parse("[model]\nlambda = 2\ncolour = red\n")), SpecError);
    CHECK_THROWS_AS(parse_experiment(KeyValueFile::parse("[model]\nlambda = two\n")), SpecError);
    CHECK_THROWS_AS(parse_experiment(KeyValueFile::parse("[model]\nfamily = mu-lambda\n")), SpecError);
    CHECK_THROWS_AS(parse_experiment(KeyValueFile::parse("[model]\nlambda = 2\n[run]\nn = 63\n")), SpecError);
    CHECK_THROWS_AS(parse_experiment(KeyValueFile::parse("[model]\nlambda = 2\n[initial]\npreset = wave\n")),
                    SpecError);
    CHECK_THROWS_AS(KeyValueFile::parse("[model\n"), SpecError);
    CHECK_THROWS_AS(KeyValueFile::parse("lambda 2\n"), SpecError);
  }
  SUBCASE("lambda = 1 names the gamma singularity") {
    try {
      parse_experiment(KeyValueFile::parse("[model]\nlambda = 1\n"));
      FAIL("expected SpecError");
    } catch (const SpecError& e) {
      CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
  }
  SUBCASE("overrides") {
    auto s = parse_experiment(KeyValueFile::parse("[model]\nlambda = 2\n"));
    apply_overrides(s, {128, 0.01, 2.0, fs::path("elsewhere")});
    CHECK(s.run.n == 128);
    CHECK(s.run.dt == 0.01);
    CHECK(s.output_dir == fs::path("elsewhere"));
    CHECK_THROWS_AS(apply_overrides(s, {std::size_t{0}, {}, {}, {}}), SpecError);
  }
}

TEST_CASE("constant data runs to completion with min x = 1") {
  const fs::path dir = scratch("constant");
  auto s = parse_experiment(KeyValueFile::parse(
      "[model]\nlambda = 2\n[initial]\npreset = constant\nconstant = 0.7\n[run]\nn = 64\nt_end = 1\n"));
  s.output_dir = dir;
  std::ostringstream err;
  CHECK(run_experiment(s, err) == kCompleted);
  std::istringstream csv(slurp(dir / "series.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,min_x,E,L2,sigma,angmom_err_max,c1,c2,c3");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    CHECK(std::stod(line.substr(a + 1, b - a - 1)) == doctest::Approx(1.0).epsilon(1e-14));
    ++rows;
  }
  CHECK(rows == 101);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["schema"] == "solar-flow/1");
  CHECK(report["status"] == "completed");
  CHECK(report["mckean"]["verdict"] == "global");
}

TEST_CASE("burgers preset stops at breakdown near T = 1") {
  const fs::path dir = scratch("burgers");
  auto s = parse_experiment(KeyValueFile::parse(
      "[model]\nlambda = 3\n[initial]\npreset = burgers\n[run]\nt_end = 1.5\nsnapshot_every = 50\n"));
  s.output_dir = dir;
  std::ostringstream err;
  CHECK(run_experiment(s, err) == kBreakdown);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["breakdown"]["T"].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(report["breakdown"]["theta_star"].get<double>() == doctest::Approx(0.5));
  CHECK(fs::exists(dir / "snap_0.500000.csv"));
  CHECK(fs::exists(dir / "min_x.svg"));
  const std::string first = slurp(dir / "snap_0.000000.csv");
  CHECK(first.rfind("theta,x,v,y,w,u,m\n", 0) == 0);
}

TEST_CASE("reruns are byte-identical, including sweeps") {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  auto s = parse_experiment(KeyValueFile::parse(
      "[model]\nlambda = 2\n[initial]\npreset = mckean-breakdown\n[run]\nn = 64\nt_end = 0.5\n"
      "[sweep]\nparameter = lambda\nvalues = 2, 3\n"));
  std::ostringstream err;
  s.output_dir = a;
  CHECK(run_experiment(s, err) == kCompleted);
  s.output_dir = b;
  CHECK(run_experiment(s, err) == kCompleted);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    CHECK(slurp(e.path()) == slurp(b / fs::relative(e.path(), a)));
    ++files;
  }
  CHECK(files > 6);
  CHECK(fs::exists(a / "lambda_3" / "series.csv"));
}

TEST_CASE("numerical failure keeps a report") {
  const fs::path dir = scratch("failure");
  auto s = parse_experiment(KeyValueFile::parse(
      "[model]\nfamily = osw\nlambda = 1\n[initial]\nconstant = 1\nmodes = 1:1:0\n[run]\nn = 64\n"));
  s.output_dir = dir;
  std::ostringstream err;
  CHECK(run_experiment(s, err) == kFailed);
  CHECK_FALSE(err.str().empty());
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["status"] == "error");
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const fs::path err = dir / "stderr.txt";
  SUBCASE("lambda = 1 exits 1 with a gamma message") {
    const fs::path spec = write_spec(dir, "[model]\nlambda = 1\n");
    CHECK(cli("run " + spec.string(), err) == 1);
    CHECK(slurp(err).find("gamma") != std::string::npos);
  }
  SUBCASE("missing spec file exits 1") { CHECK(cli("run " + (dir / "nope.ini").string(), err) == 1); }
  SUBCASE("unknown suite exits 1") {
    CHECK(cli("verify unknown --out " + dir.string(), err) == 1);
    CHECK(slurp(err).find("unknown suite") != std::string::npos);
  }
  SUBCASE("burgers with overrides exits 2") {
    const fs::path spec =
        write_spec(dir, "[model]\nlambda = 3\n[initial]\npreset = burgers\n[run]\nt_end = 0.1\n");
    CHECK(cli("run " + spec.string() + " --n 128 --t-end 1.5 --out " + (dir / "out").string(), err) == 2);
    CHECK(fs::exists(dir / "out" / "report.json"));
  }
}
