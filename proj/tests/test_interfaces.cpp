#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "slicegeo/cli.hpp"
#include "slicegeo/config.hpp"
#include "slicegeo/fieldspec.hpp"

using namespace slicegeo;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "slicegeo_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const nlohmann::json& config) {
  const auto path = temp_dir() / name;
  std::ofstream out(path);
  out << config.dump(2);
  return path.string();
}

std::string de_sitter_config() {
  return write_config("de_sitter.json", {{"model", "de_sitter"},
                                         {"grid_n", 256},
                                         {"t_domain", {"-inf", "inf"}},
                                         {"params", nlohmann::json::object()}});
}

std::string static_config() {
  return write_config("static.json", {{"model", "static"},
                                      {"grid_n", 128},
                                      {"t_domain", {"-inf", "inf"}},
                                      {"params", nlohmann::json::object()}});
}

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("field spec mini-language") {
  const Grid g(64);
  const ScalarField c = parse_field("const:2.5", g);
  CHECK(c[0] == 2.5);
  CHECK(parse_field("-1.25", g)[10] == -1.25);

  const ScalarField h = parse_field("harmonic:2:cos:0.5", g);
  CHECK(h[0] == doctest::Approx(0.5));
  const ScalarField s = parse_field("harmonic:1:sin", g);
  CHECK(s[g.n / 4] == doctest::Approx(1.0));

  CHECK_THROWS_AS(parse_field("harmonic:1:tan", g), Error);
  CHECK_THROWS_AS(parse_field("waves:3", g), Error);
  CHECK_THROWS_AS(parse_field("", g), Error);
}

TEST_CASE("field spec reads CSV samples") {
  const Grid g(8);
  const auto path = temp_dir() / "samples.csv";
  {
    std::ofstream out(path);
    out << "x,value\n";
    for (int i = 0; i < 8; ++i) out << g.point(i) << "," << (i * 0.5) << "\n";
  }
  const ScalarField f = parse_field("samples:@" + path.string(), g);
  CHECK(f[3] == doctest::Approx(1.5));

  const Grid wrong(16);
  CHECK_THROWS_AS(parse_field("samples:@" + path.string(), wrong), Error);
  CHECK_THROWS_AS(parse_field("samples:@/nonexistent/file.csv", g), Error);
}

TEST_CASE("reference metric mini-language") {
  const Grid g(32);
  const SpacetimeModel ds = SpacetimeModel::make_de_sitter();
  CHECK(parse_reference_metric("g0", g, ds)[0] == doctest::Approx(1.0));
  const double c = std::cosh(0.5);
  CHECK(parse_reference_metric("gt:0.5", g, ds)[0] == doctest::Approx(c * c));
  CHECK(parse_reference_metric("const:2.0", g, ds)[0] == 2.0);
  CHECK(parse_reference_metric("scale:4:g0", g, ds)[0] == doctest::Approx(4.0));
  CHECK_THROWS_AS(parse_reference_metric("scale:-1:g0", g, ds), Error);
  CHECK_THROWS_AS(parse_reference_metric("h1", g, ds), Error);
}

TEST_CASE("cli: sectional curvature record") {
  const auto result = run({"sectional", "--model", de_sitter_config(), "--slice", "0", "--u",
                           "harmonic:1:cos", "--v", "harmonic:1:sin"});
  CHECK(result.exit_code == 0);
  const auto record = nlohmann::json::parse(result.out);
  CHECK(record.at("schema_version") == 1);
  CHECK(record.at("operation") == "sectional");
  CHECK(record.at("grid_n") == 256);
  CHECK(record.at("values").at("K").get<double>() == doctest::Approx(-1.0 / kPi).epsilon(1e-6));
}

TEST_CASE("cli: byte-identical output for identical invocations") {
  const std::vector<std::string> args = {"sectional", "--model", de_sitter_config(), "--slice",
                                         "0.2",       "--u",     "harmonic:1:cos",   "--v",
                                         "harmonic:2:sin"};
  const auto first = run(args);
  const auto second = run(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
}

TEST_CASE("cli: exit codes") {
  // Usage error: unknown flag.
  CHECK(run({"sectional", "--bogus"}).exit_code == 1);
  // Usage error: missing subcommand.
  CHECK(run({}).exit_code == 1);
  // Config error: missing file.
  CHECK(run({"sectional", "--model", "/nonexistent.json", "--u", "1", "--v", "2"}).exit_code == 1);
  // Domain error: slice not spacelike.
  const auto domain = run({"sectional", "--model", static_config(), "--slice",
                           "harmonic:1:sin:1.4", "--u", "harmonic:1:cos", "--v", "harmonic:1:sin"});
  CHECK(domain.exit_code == 2);
  CHECK(domain.err.find("SpacelikeViolation") != std::string::npos);
  // Help succeeds.
  CHECK(run({"--help"}).exit_code == 0);
}

TEST_CASE("cli: metric and connection records") {
  const auto metric = run({"metric", "--model", static_config(), "--f", "const:0", "--u",
                           "const:1", "--v", "const:1"});
  CHECK(metric.exit_code == 0);
  CHECK(nlohmann::json::parse(metric.out).at("values").at("G").get<double>() ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));

  const auto conn = run({"connection", "--model", static_config(), "--f", "const:0.4", "--u",
                         "harmonic:1:cos", "--v", "harmonic:1:sin"});
  CHECK(conn.exit_code == 0);
  CHECK(nlohmann::json::parse(conn.out).at("values").at("gamma_max_abs").get<double>() == 0.0);
}

TEST_CASE("cli: distance bound carries the lapse-bound flag") {
  const auto result = run({"distance-bound", "--model", de_sitter_config(), "--f0", "const:0",
                           "--f1", "const:0.5", "--h", "g0"});
  CHECK(result.exit_code == 0);
  const auto record = nlohmann::json::parse(result.out);
  CHECK(record.at("values").at("bound").get<double>() ==
        doctest::Approx(0.5 * std::sqrt(2.0 * kPi)).epsilon(1e-12));
  CHECK(record.at("values").at("lapse_bound_pass").get<bool>());

  const auto failing = run({"distance-bound", "--model", de_sitter_config(), "--f0", "const:0",
                            "--f1", "const:0.5", "--h", "scale:4:g0"});
  CHECK(failing.exit_code == 0);
  const auto failing_record = nlohmann::json::parse(failing.out);
  CHECK_FALSE(failing_record.at("values").at("lapse_bound_pass").get<bool>());
  CHECK(failing_record.at("values").at("lapse_bound_min").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("cli: geodesic subcommands produce summaries and CSV") {
  const auto csv_path = (temp_dir() / "traj.csv").string();
  const auto ivp = run({"geodesic-ivp", "--model", static_config(), "--grid", "32", "--f0",
                        "const:0", "--u0", "const:0.5", "--s-end", "0.2", "--ds", "0.01", "--csv",
                        csv_path});
  CHECK(ivp.exit_code == 0);
  const auto ivp_record = nlohmann::json::parse(ivp.out);
  CHECK(ivp_record.at("values").at("status") == "ok");
  CHECK(ivp_record.at("values").at("speed_drift_rel").get<double>() <= 1e-12);
  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header.substr(0, 4) == "s,x0");

  const auto bvp = run({"geodesic-bvp", "--model", de_sitter_config(), "--grid", "64", "--f0",
                        "const:0", "--f1", "const:0.3", "--K", "8"});
  CHECK(bvp.exit_code == 0);
  const auto bvp_record = nlohmann::json::parse(bvp.out);
  CHECK(bvp_record.at("values").at("converged").get<bool>());
  const double length = bvp_record.at("values").at("length").get<double>();
  const double energy = bvp_record.at("values").at("energy").get<double>();
  CHECK(length * length <= 2.0 * energy + 1e-10);
}

TEST_CASE("cli: reparametrize emits a certificate and exports a loadable config") {
  const auto export_path = (temp_dir() / "reparametrized.json").string();
  const auto result = run({"reparametrize", "--model", de_sitter_config(), "--grid", "32", "--h",
                           "scale:4:g0", "--t-window", "-1:1", "--export", export_path});
  CHECK(result.exit_code == 0);
  const auto record = nlohmann::json::parse(result.out);
  CHECK_FALSE(record.at("values").at("input_bound_pass").get<bool>());
  CHECK(record.at("values").at("output_bound_pass").get<bool>());
  CHECK(record.at("values").at("fprime_min").get<double>() >= 1.0);

  const LoadedModel loaded = load_model_file(export_path);
  CHECK(loaded.model.kind() == SpacetimeModel::Kind::tabulated);
}

TEST_CASE("cli: ivp domain violations exit with the domain code") {
  const auto tab_path = write_config(
      "window.json",
      nlohmann::json::parse(
          R"({"model":"static","grid_n":32,"t_domain":[-0.25,0.25],"params":{}})"));
  const auto result = run({"geodesic-ivp", "--model", tab_path, "--f0", "const:0", "--u0",
                           "const:1", "--s-end", "1.0", "--ds", "0.01"});
  CHECK(result.exit_code == 2);
  const auto record = nlohmann::json::parse(result.out);
  CHECK(record.at("values").at("status") == "domain_violation");
}
