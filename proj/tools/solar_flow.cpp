#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "solar/experiment.hpp"
#include "solar/suites.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const std::string& spec_path, const solar::Overrides& overrides) {
  try {
    solar::ExperimentSpec spec = solar::load_experiment(spec_path);
    solar::apply_overrides(spec, overrides);
    return solar::run_experiment(spec, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "solar-flow: " << e.what() << '\n';
    return solar::kFailed;
  }
}

int verify_command(const std::string& suite, const fs::path& out_dir) {
  std::vector<int> ids;
  try {
    ids = solar::suite_criteria(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << "solar-flow: " << e.what() << '\n';
    return solar::kFailed;
  }
  std::vector<solar::CriterionResult> results;
  bool ok = true;
  for (int id : ids) {
    try {
      results.push_back(solar::run_criterion(id));
    } catch (const std::exception& e) {
      solar::CriterionResult r;
      r.id = id;
      r.title = std::string("raised: ") + e.what();
      results.push_back(r);
    }
    solar::print_result(std::cout, results.back());
    ok = ok && results.back().pass();
  }
  fs::create_directories(out_dir);
  const fs::path file = out_dir / (suite + ".junit.xml");
  std::ofstream xml(file);
  if (!xml) {
    std::cerr << "solar-flow: cannot write " << file << '\n';
    return solar::kFailed;
  }
  solar::write_junit(xml, suite, results);
  std::cout << "results written to " << file.string() << '\n';
  return ok ? solar::kCompleted : solar::kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solar-flow: Lagrangian central-force solver for the mu-lambda and OSW families"};
  app.require_subcommand(1);

  solar::Overrides overrides;
  std::string out;
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option_function<std::size_t>("--n", [&](std::size_t v) { overrides.n = v; }, "grid size");
    cmd->add_option_function<double>("--dt", [&](double v) { overrides.dt = v; }, "time step");
    cmd->add_option_function<double>("--t-end", [&](double v) { overrides.t_end = v; }, "final time");
    cmd->add_option("--out", out, "output directory");
  };

  std::string spec_path;
  auto* run = app.add_subcommand("run", "run an experiment spec");
  run->add_option("spec", spec_path, "experiment spec file")->required();
  add_overrides(run);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run an acceptance suite");
  verify->add_option("suite", suite, "oracles | conservation | mckean | lemmas | osw")->required();
  verify->add_option("--out", out, "directory for the results file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : solar::kFailed;
  }

  if (*run) {
    if (!out.empty()) overrides.out = out;
    return run_command(spec_path, overrides);
  }
  return verify_command(suite, out.empty() ? fs::path("verify-results") : fs::path(out));
}
