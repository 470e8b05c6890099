#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qqm/qqm.hpp"

namespace {

void print_rows(const qqm::RunResult& res, bool quiet) {
  if (quiet) return;
  for (const auto& r : res.rows) {
    if (r.status == qqm::RowStatus::info) continue;
    std::printf("%-5s %-44s %.6e  %s\n", r.tag.c_str(), r.quantity.c_str(), r.value, qqm::to_string(r.status));
  }
  for (const auto& f : res.files) std::printf("wrote %s\n", f.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternionic quantum mechanics verification harness"};
  app.require_subcommand(1);

  std::string file;
  std::size_t refine = 0;
  std::optional<double> tolerance;
  bool quiet = false;
  std::string out_dir = ".";

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--grid-refine", refine, "Extra refinement levels for a convergence study");
  run->add_option("--tolerance", tolerance, "Override discretization thresholds")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "Only report failures");
  run->add_option("--out-dir", out_dir, "Directory for relative output prefixes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto sc = qqm::Scenario::load(file);
    qqm::RunOptions opt;
    opt.tolerance = tolerance;
    opt.grid_refine = refine;
    opt.out_dir = out_dir;
    const auto res = qqm::run_scenario(sc, opt);
    print_rows(res, quiet);
    if (res.exit_code != 0) std::cerr << "qqm: " << res.message << '\n';
    return res.exit_code;
  } catch (const qqm::ScenarioError& e) {
    std::cerr << "qqm: scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qqm: " << e.what() << '\n';
    return 2;
  }
}
