// Batch front door: `phimoment run` executes a scenario config and writes
// reports; `phimoment selftest` runs the fast invariant suite.
//
// Exit codes for `run`: 0 all pass-band assertions hold, 1 some scenario
// failed its band, 2 config parse error, 3 scenario validation error,
// 4 numeric failure.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "phimoment/runner.hpp"
#include "phimoment/selftest.hpp"

int main(int argc, char** argv) {
  CLI::App app{"phimoment: Phi-moment inequality verification workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", format = "json", filter;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("--config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed_value, "override every scenario seed")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--workers", workers, "worker threads (0 = PHIMOMENT_WORKERS or hardware)");
  run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--filter", filter, "glob over scenario ids");

  bool inject_fault = false;
  CLI::App* self = app.add_subcommand("selftest", "run the fast invariant suite");
  self->add_flag("--inject-fault", inject_fault, "corrupt a breakpoint to exercise failure");

  CLI11_PARSE(app, argc, argv);

  if (self->parsed()) return phimoment::selftest(inject_fault);

  using namespace phimoment;
  try {
    ConfigOverrides overrides;
    if (seed_given) overrides.seed = seed_value;
    overrides.workers = workers;
    const auto text = detail::read_file(config_path);
    const RunConfig cfg =
        parse_config(text, std::filesystem::path(config_path).parent_path(), overrides);
    for (std::size_t i = 0; i < cfg.scenarios.size(); ++i) validate_scenario(cfg.scenarios[i]);

    const RunOutcome outcome = run_suite(cfg, filter, &std::cout);
    RunManifest manifest;
    manifest.config_path = config_path;
    manifest.output_dir = out_dir;
    if (seed_given) manifest.seed_override = seed_value;
    manifest.workers = workers;
    manifest.format = format;
    manifest.filter = filter;
    write_outputs(outcome, manifest);
    std::cout << (outcome.all_pass ? "all scenarios passed\n" : "some scenarios FAILED\n");
    return outcome.all_pass ? 0 : 1;
  } catch (const ConfigParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ScenarioValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
