/**
 * killing-transport: run one geometry computation described by a JSON config
 * and write its reports into an output directory.
 *
 *   killing-transport <command> --config run.json [--output dir] [--seed n]
 *
 * On success the tool prints nothing and exits 0; the output directory holds
 * the command's CSV/JSON reports plus manifest.json describing the run.  On
 * failure a one-line JSON diagnostic goes to stderr and the exit code is
 * 1 (config/schema), 2 (geometry), or 3 (tolerance).
 */
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kt/errors.hpp"
#include "kt/runner.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& message) {
  nlohmann::json diag;
  diag["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  std::cerr << diag.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Killing transport and isometry diagnostics for surfaces"};
  app.set_help_all_flag("--help-all");

  std::string command;
  std::string config_path;
  std::string output_dir;
  std::int64_t seed = 0;
  bool seed_given = false;

  const std::vector<std::string> commands = {
      "transport",    "holonomy",      "classify",      "gauss-bonnet",
      "rigid-var",    "jacobi-check",  "killing-check", "curvature-defect"};
  app.add_option("command", command, "What to run")
      ->required()
      ->check(CLI::IsMember(commands));
  app.add_option("--config", config_path, "Path to the JSON run config")
      ->required();
  app.add_option("--output", output_dir,
                 "Output directory (overrides the config's 'output')");
  app.add_option("--seed", seed, "Seed recorded in the manifest")
      ->each([&](const std::string&) { seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    return fail(1, "schema", e.what());
  }

  nlohmann::json config;
  try {
    config = kt::load_config_file(config_path);
  } catch (const kt::SchemaError& e) {
    return fail(1, "schema", e.what());
  }

  if (!config.is_object())
    return fail(1, "schema", "config must be a JSON object");
  if (config.contains("command")) {
    if (!config["command"].is_string() ||
        config["command"].get<std::string>() != command)
      return fail(1, "schema",
                  "config 'command' does not match the requested command '" +
                      command + "'");
  } else {
    config["command"] = command;
  }

  std::string out_dir = ".";
  if (config.contains("output")) {
    if (!config["output"].is_string())
      return fail(1, "schema", "'output' must be a string");
    out_dir = config["output"].get<std::string>();
  }
  if (!output_dir.empty()) {
    out_dir = output_dir;
    config["output"] = output_dir;
  }
  if (seed_given) config["seed"] = seed;

  const kt::RunOutcome outcome = kt::run_config(config, out_dir);
  if (outcome.exit_code != 0)
    return fail(outcome.exit_code, outcome.error_kind, outcome.message);
  return 0;
}
