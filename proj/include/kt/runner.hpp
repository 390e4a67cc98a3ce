#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "kt/chart.hpp"
#include "kt/curve.hpp"

namespace kt {

inline constexpr const char* kLibraryVersion = "0.1.0";

/**
 * One numeric run parameter: the command it belongs to ("*" = every command),
 * its config location as a JSON pointer, and the default used when the config
 * omits it.  The same table drives default resolution and the manifest, so
 * every tunable number has a config key and every run records the value that
 * was actually in effect.
 */
struct ParamSpec {
  const char* command;
  const char* pointer;
  double def;
};

const std::vector<ParamSpec>& run_parameters();

struct RunOutcome {
  int exit_code = 0;
  /** "schema", "geometry" or "tolerance" when exit_code is 1, 2 or 3. */
  std::string error_kind;
  std::string message;
  /** Files written into the output directory (manifest.json last). */
  std::vector<std::string> outputs;
};

/** Parse a config file; malformed JSON becomes SchemaError carrying the byte
 *  offset reported by the parser. */
nlohmann::json load_config_file(const std::string& path);

/** Build the surface described by a config "surface" block. */
MetricChart build_surface(const nlohmann::json& spec);

/** Build the curve described by a config "curve" block. */
SampledCurve build_curve(const MetricChart& chart, const nlohmann::json& spec);

/**
 * Execute one command and write its outputs plus manifest.json into out_dir.
 * Never throws: schema problems come back as exit code 1, geometry problems
 * as 2, tolerance failures as 3, with a human-readable message.  Outputs are
 * deterministic functions of the config (seed included), byte for byte.
 */
RunOutcome run_config(nlohmann::json config, const std::string& out_dir);

}  // namespace kt
