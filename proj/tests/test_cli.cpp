#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

#include "json.hpp"
#include "kt/chart.hpp"
#include "kt/csv.hpp"
#include "kt/gauss_bonnet.hpp"
#include "kt/runner.hpp"

using namespace kt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kt_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

json sphere_transport_config() {
  return json{{"command", "transport"},
              {"surface", {{"kind", "sphere"}}},
              {"curve",
               {{"kind", "coordinate"},
                {"u0", kPi / 3},
                {"v0", 0.0},
                {"span", 2 * kPi},
                {"steps", 400}}},
              {"jet0", {1.0, 0.0, 0.0}}};
}

json torus_parallel_curve(double u0, int steps = 400) {
  return json{{"kind", "coordinate"},
              {"u0", u0},
              {"v0", 0.0},
              {"span", 2 * kPi},
              {"steps", steps}};
}

// Run the CLI binary and return its exit code.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(KT_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("csv emission quotes cells and keeps unix line endings") {
  std::ostringstream os;
  emit_csv(os, {"a", "b"}, {{"1", "plain"}, {"2", "has,comma"},
                            {"3", "has \"quote\""}});
  CHECK(os.str() ==
        "a,b\n1,plain\n2,\"has,comma\"\n3,\"has \"\"quote\"\"\"\n");

  std::ostringstream empty;
  emit_csv(empty, {"u", "v"}, {});
  CHECK(empty.str() == "u,v\n");

  // Shortest-exact formatting must round-trip.
  const double x = 0.1234567890123456;
  CHECK(std::stod(csv_number(x)) == x);
  CHECK(csv_number(2.0) == "2");
}

TEST_CASE("identical configs produce byte-identical outputs") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const json config = sphere_transport_config();

  const RunOutcome ra = run_config(config, a.string());
  const RunOutcome rb = run_config(config, b.string());
  REQUIRE_MESSAGE(ra.exit_code == 0, ra.message);
  REQUIRE(rb.exit_code == 0);
  REQUIRE(ra.outputs == rb.outputs);
  REQUIRE(ra.outputs ==
          std::vector<std::string>{"transport.csv", "report.json",
                                   "manifest.json"});
  for (const auto& name : ra.outputs) CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("unknown keys are rejected wherever they appear") {
  const fs::path dir = fresh_dir("unknown");
  auto expect_schema = [&](json config, const std::string& fragment) {
    const RunOutcome out = run_config(config, dir.string());
    CHECK(out.exit_code == 1);
    CHECK(out.error_kind == "schema");
    CHECK_MESSAGE(out.message.find(fragment) != std::string::npos,
                  out.message);
  };

  json top = sphere_transport_config();
  top["extra"] = 1;
  expect_schema(top, "unknown key 'extra'");

  json surf = sphere_transport_config();
  surf["surface"]["bogus"] = 1;
  expect_schema(surf, "unknown key 'surface.bogus'");

  json curve = sphere_transport_config();
  curve["curve"]["slack"] = 1;
  expect_schema(curve, "unknown key 'curve.slack'");

  json scan = {{"command", "classify"},
               {"surface", {{"kind", "sphere"}}},
               {"grid", {{"nu", 4}, {"nv", 4}, {"stride", 2}}}};
  expect_schema(scan, "unknown key 'grid.stride'");

  json opts = {{"command", "classify"},
               {"surface", {{"kind", "sphere"}}},
               {"options", {{"rank_cutoff", 1e-6}}}};
  expect_schema(opts, "unknown key 'options.rank_cutoff'");
}

TEST_CASE("missing blocks and malformed values are schema errors") {
  const fs::path dir = fresh_dir("malformed");
  auto run = [&](const json& config) { return run_config(config, dir.string()); };

  json no_jet = sphere_transport_config();
  no_jet.erase("jet0");
  RunOutcome out = run(no_jet);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("jet0") != std::string::npos);

  json short_jet = sphere_transport_config();
  short_jet["jet0"] = {1.0, 0.0};
  out = run(short_jet);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("three numbers") != std::string::npos);

  json few_steps = sphere_transport_config();
  few_steps["curve"]["steps"] = 3;
  out = run(few_steps);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("at least 4") != std::string::npos);

  json bad_radius = sphere_transport_config();
  bad_radius["surface"]["radius"] = -2.0;
  out = run(bad_radius);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("positive") != std::string::npos);

  // Scan bounds come as a full set or not at all.
  json half_bounds = {{"command", "classify"},
                      {"surface", {{"kind", "sphere"}}},
                      {"grid", {{"nu", 4}, {"nv", 4}, {"u0", 0.5}}}};
  out = run(half_bounds);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("grid.u1") != std::string::npos);

  json both_meshes = {{"command", "gauss-bonnet"},
                      {"surface", {{"kind", "torus"}}},
                      {"mesh", "x.json"},
                      {"grid", {{"nu", 4}, {"nv", 4}}}};
  out = run(both_meshes);
  CHECK(out.exit_code == 1);
  CHECK(out.message.find("not both") != std::string::npos);
}

TEST_CASE("error kinds map to the documented exit codes") {
  const fs::path dir = fresh_dir("kinds");

  // Expression syntax problems carry the offset of the failure.
  const json bad_metric = {
      {"command", "curvature-defect"},
      {"surface",
       {{"kind", "custom"},
        {"g11", "1 +* u"},
        {"g22", "1"},
        {"domain", {{"u", {0.0, 1.0}}, {"v", {0.0, 1.0}}}}}},
      {"point", {0.5, 0.5}}};
  RunOutcome out = run_config(bad_metric, dir.string());
  CHECK(out.exit_code == 1);
  CHECK(out.error_kind == "schema");
  CHECK(out.message.find("offset") != std::string::npos);

  // Holonomy of an open curve is a geometry error.
  const json open_loop = {{"command", "holonomy"},
                          {"surface", {{"kind", "sphere"}}},
                          {"curve",
                           {{"kind", "segment"},
                            {"a", {1.0, 0.0}},
                            {"b", {1.5, 0.5}},
                            {"steps", 50}}}};
  out = run_config(open_loop, dir.string());
  CHECK(out.exit_code == 2);
  CHECK(out.error_kind == "geometry");

  // An unmeetable jet consistency demand is a tolerance error.
  const json strict_jet = {{"command", "curvature-defect"},
                           {"surface", {{"kind", "torus"}}},
                           {"point", {kPi / 4, 0.3}},
                           {"jet_tol", 1e-13}};
  out = run_config(strict_jet, dir.string());
  CHECK(out.exit_code == 3);
  CHECK(out.error_kind == "tolerance");
}

TEST_CASE("every run parameter resolves its default into the manifest") {
  const json torus_surface = {{"kind", "torus"}};
  const json sphere_surface = {{"kind", "sphere"}};

  std::map<std::string, json> minimal;
  minimal["transport"] = {{"surface", sphere_surface},
                          {"curve",
                           {{"kind", "coordinate"},
                            {"u0", 1.2},
                            {"v0", 0.0},
                            {"span", 0.5}}},
                          {"jet0", {1.0, 0.0, 0.0}}};
  minimal["holonomy"] = {{"surface", torus_surface},
                         {"curve",
                          {{"kind", "coordinate"},
                           {"u0", kPi / 4},
                           {"v0", 0.0},
                           {"span", 2 * kPi}}}};
  minimal["classify"] = {{"surface", sphere_surface},
                         {"grid", {{"nu", 4}, {"nv", 4}}}};
  minimal["gauss-bonnet"] = {{"surface", torus_surface},
                             {"grid", {{"nu", 4}, {"nv", 4}, {"edge_steps", 20}}}};
  minimal["rigid-var"] = {{"surface", sphere_surface},
                          {"curve",
                           {{"kind", "coordinate"},
                            {"u0", kPi / 2},
                            {"v0", 0.0},
                            {"span", 1.0},
                            {"steps", 100}}},
                          {"jet0", {0.0, 1.0, 0.0}}};
  minimal["jacobi-check"] = {{"surface", sphere_surface},
                             {"curve",
                              {{"kind", "geodesic"},
                               {"p0", {kPi / 2, 0.0}},
                               {"theta", kPi / 2},
                               {"length", 1.0},
                               {"steps", 100}}},
                             {"jet0", {0.0, 0.0, 1.0}}};
  minimal["killing-check"] = {{"surface", torus_surface},
                              {"field", {{"xi1", "0"}, {"xi2", "2 + cos(u)"}}},
                              {"grid", {{"nu", 4}, {"nv", 4}}}};
  minimal["curvature-defect"] = {{"surface", torus_surface},
                                 {"point", {kPi / 4, 0.3}}};

  for (const auto& [cmd, base] : minimal) {
    CAPTURE(cmd);
    json config = base;
    config["command"] = cmd;
    const fs::path dir = fresh_dir("defaults_" + cmd);
    const RunOutcome out = run_config(config, dir.string());
    REQUIRE_MESSAGE(out.exit_code == 0, (cmd + ": " + out.message));

    const json manifest = read_json(dir / "manifest.json");
    CHECK(manifest.at("command") == cmd);
    CHECK(manifest.at("version") == std::string(kLibraryVersion));
    CHECK(manifest.at("seed") == 0);
    CHECK(manifest.at("outputs") == json(out.outputs));
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);

    const json& params = manifest.at("parameters");
    for (const auto& spec : run_parameters()) {
      if (std::string(spec.command) != cmd) continue;
      if (std::string(spec.pointer) == "/mesh_steps") continue;  // grid mode
      CAPTURE(spec.pointer);
      REQUIRE(params.contains(spec.pointer));
      // Values the minimal config pins explicitly resolve to those pins;
      // everything else resolves to the table default.
      const json::json_pointer ptr(spec.pointer);
      if (!base.contains(ptr))
        CHECK(params.at(spec.pointer).get<double>() ==
              doctest::Approx(spec.def));
      CHECK(manifest.at("config").at(ptr) == params.at(spec.pointer));
    }
  }

  // Explicit values win over defaults and show up resolved.
  json tuned = minimal["curvature-defect"];
  tuned["command"] = "curvature-defect";
  tuned["h"] = 1e-3;
  const fs::path dir = fresh_dir("defaults_override");
  REQUIRE(run_config(tuned, dir.string()).exit_code == 0);
  const json manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("parameters").at("/h").get<double>() ==
        doctest::Approx(1e-3));
  CHECK(manifest.at("parameters").at("/side_steps").get<double>() ==
        doctest::Approx(64));
}

TEST_CASE("holonomy around a sphere latitude is the identity") {
  const fs::path dir = fresh_dir("holonomy_sphere");
  const json config = {{"command", "holonomy"},
                       {"surface", {{"kind", "sphere"}}},
                       {"curve",
                        {{"kind", "coordinate"},
                         {"u0", kPi / 3},
                         {"v0", 0.0},
                         {"span", 2 * kPi},
                         {"steps", 400}}}};
  REQUIRE(run_config(config, dir.string()).exit_code == 0);
  const json rep = read_json(dir / "holonomy.json");
  CHECK(rep.at("identity_distance").get<double>() < 1e-7);
  CHECK(rep.at("fixed_dims") == 3);
  CHECK(std::abs(rep.at("det_drift").get<double>()) < 1e-9);
}

TEST_CASE("a classify scan writes the histogram and the verbatim header") {
  const fs::path dir = fresh_dir("classify_sphere");
  const json config = {{"command", "classify"},
                       {"surface", {{"kind", "sphere"}}},
                       {"grid", {{"nu", 5}, {"nv", 4}}}};
  REQUIRE(run_config(config, dir.string()).exit_code == 0);

  const json rep = read_json(dir / "classify.json");
  CHECK(rep.at("points") == 20);
  CHECK(rep.at("histogram").at("ThreeParam") == 20);
  CHECK(rep.at("histogram").at("OneParam") == 0);
  CHECK(rep.at("skipped") == 0);
  CHECK(rep.at("rank_one_points").empty());

  const std::string csv = slurp(dir / "classify.csv");
  CHECK(csv.rfind("u,v,sigma1,sigma2,sigma3_of_top3,rank,class\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
  CHECK(csv.find("ThreeParam") != std::string::npos);

  // The resolved window lands both in the report and in the manifest.
  const json manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("config").at("grid").contains("u0"));
  CHECK(rep.at("grid").at("u0") ==
        manifest.at("config").at("grid").at("u0"));
}

TEST_CASE("a saved mesh replaces the generated grid") {
  const fs::path dir = fresh_dir("mesh_mode");
  const MetricChart chart = MetricChart::torus();
  const Triangulation tri = torus_grid(chart, 3, 3, 20);
  save_triangulation((dir / "mesh.json").string(), tri);

  const json config = {{"command", "gauss-bonnet"},
                       {"surface", {{"kind", "torus"}}},
                       {"mesh", (dir / "mesh.json").string()},
                       {"mesh_steps", 20}};
  REQUIRE(run_config(config, dir.string()).exit_code == 0);

  const json rep = read_json(dir / "gauss_bonnet.json");
  CHECK(rep.at("triangles") == 18);
  CHECK(rep.at("euler") == 0);
  CHECK(std::abs(rep.at("residual").get<double>()) < 1e-3);
  CHECK(rep.at("max_pair_m") == 0);

  const json manifest = read_json(dir / "manifest.json");
  CHECK(manifest.at("parameters").contains("/mesh_steps"));
  CHECK(!manifest.at("parameters").contains("/grid/nu"));
}

TEST_CASE("the binary wires configs to exit codes end to end") {
  const fs::path dir = fresh_dir("binary");

  write_file(dir / "ok.json", sphere_transport_config().dump());
  CHECK(run_cli("transport --config " + (dir / "ok.json").string() +
                " --output " + (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "transport.csv"));
  CHECK(fs::exists(dir / "run" / "report.json"));
  CHECK(fs::exists(dir / "run" / "manifest.json"));

  // The requested command must match the config's own label.
  CHECK(run_cli("holonomy --config " + (dir / "ok.json").string() +
                " --output " + (dir / "mismatch").string()) == 1);

  // Unknown command names are rejected by the argument parser.
  CHECK(run_cli("frobnicate --config " + (dir / "ok.json").string()) == 1);

  // Unreadable and unparsable configs are schema failures.
  CHECK(run_cli("transport --config " + (dir / "absent.json").string()) == 1);
  write_file(dir / "broken.json", "{\"surface\": ");
  CHECK(run_cli("transport --config " + (dir / "broken.json").string()) == 1);

  // Geometry and tolerance failures keep their exit codes through main().
  const json open_loop = {{"surface", {{"kind", "sphere"}}},
                          {"curve",
                           {{"kind", "segment"},
                            {"a", {1.0, 0.0}},
                            {"b", {1.5, 0.5}},
                            {"steps", 50}}}};
  write_file(dir / "open.json", open_loop.dump());
  CHECK(run_cli("holonomy --config " + (dir / "open.json").string() +
                " --output " + (dir / "g").string()) == 2);

  const json strict_jet = {{"surface", {{"kind", "torus"}}},
                           {"point", {kPi / 4, 0.3}},
                           {"jet_tol", 1e-13}};
  write_file(dir / "strict.json", strict_jet.dump());
  CHECK(run_cli("curvature-defect --config " + (dir / "strict.json").string() +
                " --output " + (dir / "t").string()) == 3);

  // --seed overrides the config and is recorded in the manifest.
  CHECK(run_cli("transport --config " + (dir / "ok.json").string() +
                " --output " + (dir / "seeded").string() + " --seed 7") == 0);
  const json manifest = read_json(dir / "seeded" / "manifest.json");
  CHECK(manifest.at("seed") == 7);
  CHECK(manifest.at("config").at("seed") == 7);

  // A failed run leaves no manifest behind.
  CHECK(!fs::exists(dir / "t" / "manifest.json"));
}

}  // TEST_SUITE
