// Scenario configs: presets, strict JSON schema, serialization round-trips,
// report bookkeeping, and end-to-end runs that write their artifacts.

#include <doctest/doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfpt/errors.hpp"
#include "mfpt/report.hpp"
#include "mfpt/scenario.hpp"

using namespace mfpt;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// Smallest config that parses without a preset: inviscid planar rest state.
std::string minimal_config_text() {
  return R"({
    "model": "inviscid",
    "geometry": "planar",
    "material": {"rho_0": 0.5, "pi_0": 1.0, "K": 1.0, "gamma": 1.4},
    "time": {"t_end": 0.01},
    "domain": {"length": 3.0, "slug_left": 1.0, "slug_right": 2.0}
  })";
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("profile specs evaluate their closed forms") {
  const ProfileSpec c = ProfileSpec::constant(2.5);
  CHECK(c(0.0) == 2.5);
  CHECK(c(-7.0) == 2.5);
  CHECK(c(123.0) == 2.5);

  const ProfileSpec g = ProfileSpec::gaussian(1.0, 0.5, 1.5, 0.2);
  CHECK(std::abs(g(1.5) - 1.5) < 1e-15);
  CHECK(std::abs(g(1.7) - (1.0 + 0.5 * std::exp(-1.0))) < 1e-15);
  CHECK(std::abs(g(1.3) - g(1.7)) < 1e-15);  // symmetric about the center
  CHECK(std::abs(g(50.0) - 1.0) < 1e-15);    // decays to the base value
}

TEST_CASE("scenario checks fall back only for unset names") {
  ScenarioChecks checks;
  CHECK(checks.get("mass_law", 0.25) == 0.25);
  checks.set("mass_law", 1e-9);
  CHECK(checks.get("mass_law", 0.25) == 1e-9);
  checks.set("mass_law", 2e-9);
  CHECK(checks.get("mass_law", 0.25) == 2e-9);
  CHECK(checks.get("energy_law", 0.5) == 0.5);
}

TEST_CASE("preset catalog lists working scenarios and rejects unknown names") {
  const std::vector<std::string> names = preset_names();
  const std::set<std::string> got(names.begin(), names.end());
  CHECK(got.count("equilibrium_planar") == 1);
  CHECK(got.count("shell_acoustic") == 1);
  CHECK(got.count("sphere_mms") == 1);
  CHECK(got.count("sphere_variational") == 1);

  for (const std::string& name : names) {
    const Scenario sc = preset_scenario(name);
    CHECK(sc.name == name);
    CHECK_NOTHROW(sc.sim.validate());
  }

  CHECK_THROWS_AS((void)preset_scenario("bogus"), ConfigError);
  const std::string msg =
      message_of([] { (void)preset_scenario("bogus"); });
  CHECK(msg.find("unknown preset: 'bogus'") != std::string::npos);
}

TEST_CASE("scenario json round-trips through serialize and parse") {
  for (const std::string& name : preset_names()) {
    const Scenario sc = preset_scenario(name);
    const std::string text = scenario_to_json(sc);
    const Scenario back = parse_scenario(text);
    CHECK(scenario_to_json(back) == text);
    CHECK(back.name == sc.name);
    CHECK(back.sim.cells_b == sc.sim.cells_b);
    CHECK(back.checks.tol == sc.checks.tol);
  }
}

TEST_CASE("a preset key turns every other scenario key into an override") {
  const Scenario sc = parse_scenario(R"({
    "preset": "shell_acoustic",
    "grid": {"cells_b": 100},
    "time": {"dt": 4e-4, "t_end": 0.01},
    "checks": {"mass_law": 5e-7}
  })");
  // Overridden fields take the new values...
  CHECK(sc.sim.cells_b == 100);
  CHECK(sc.sim.dt == 4e-4);
  CHECK(sc.sim.t_end == 0.01);
  CHECK(sc.checks.get("mass_law", 0.0) == 5e-7);
  // ...while everything untouched keeps the preset values.
  CHECK(sc.name == "shell_acoustic");
  CHECK(sc.sim.model == Model::Viscous);
  CHECK(sc.sim.geometry == GeometryKind::Spherical);
  CHECK(sc.sim.material.mu_A == 0.01);
  CHECK(sc.sim.interface_radius == 1.0);
  CHECK(sc.sim.outer_radius == 2.0);
  CHECK(sc.checks.get("interface_balance", 0.0) == 1e-10);
  CHECK(sc.vel_b.kind == ProfileSpec::Kind::Gaussian);
  CHECK(sc.vel_b.amplitude == 0.05);
}

TEST_CASE("minimal config parses with documented defaults") {
  const Scenario sc = parse_scenario(minimal_config_text());
  CHECK(sc.name == "custom");
  CHECK(sc.sim.model == Model::Inviscid);
  CHECK(sc.sim.geometry == GeometryKind::Planar);
  CHECK(sc.sim.flux_mode == FluxMode::Conservative);
  CHECK(sc.sim.material.rho_0 == 0.5);
  CHECK(sc.sim.material.pi_0 == 1.0);
  CHECK(sc.sim.cells_b == 400);  // untouched default
  CHECK(sc.sim.dt == 0.0);       // adaptive by default
  CHECK(sc.rho_b.kind == ProfileSpec::Kind::Constant);
  CHECK(sc.rho_b.value == 1.0);
  CHECK(sc.output_every == 0);
}

TEST_CASE("strict schema reports missing and unknown keys by dotted path") {
  // Missing required key inside a nested object.
  const std::string no_pi0 = R"({
    "model": "inviscid",
    "geometry": "planar",
    "material": {"rho_0": 0.5, "K": 1.0, "gamma": 1.4},
    "time": {"t_end": 0.01},
    "domain": {"length": 3.0, "slug_left": 1.0, "slug_right": 2.0}
  })";
  CHECK_THROWS_AS((void)parse_scenario(no_pi0), ConfigError);
  CHECK(message_of([&] { (void)parse_scenario(no_pi0); })
            .find("material.pi_0") != std::string::npos);

  // Unknown keys at top level and nested.
  CHECK(message_of([] { (void)parse_scenario(R"({"bogus": 1})"); })
            .find("unknown key: bogus") != std::string::npos);
  const std::string bad_mat = R"({
    "preset": "shell_acoustic",
    "material": {"viscosity": 1.0}
  })";
  CHECK(message_of([&] { (void)parse_scenario(bad_mat); })
            .find("unknown key: material.viscosity") != std::string::npos);

  // Bad values keep the dotted path in the message.
  const std::string bad_model = R"({"preset": "sphere_mms", "model": "magic"})";
  CHECK(message_of([&] { (void)parse_scenario(bad_model); })
            .find("invalid value for model") != std::string::npos);
  const std::string bad_every =
      R"({"preset": "sphere_mms", "output_every": -3})";
  CHECK_THROWS_AS((void)parse_scenario(bad_every), ConfigError);

  // Structural failures.
  CHECK(message_of([] { (void)parse_scenario("{not json"); })
            .find("invalid config JSON") != std::string::npos);
  CHECK(message_of([] { (void)parse_scenario("[1, 2]"); })
            .find("config root must be a JSON object") != std::string::npos);

  // Physically invalid numbers are still rejected (validate runs last).
  const std::string bad_radius = R"({
    "preset": "shell_acoustic",
    "domain": {"interface_radius": 2.5, "outer_radius": 2.0}
  })";
  CHECK_THROWS_AS((void)parse_scenario(bad_radius), ConfigError);
}

TEST_CASE("checks files accept known names and reject the rest") {
  CHECK(parse_checks_text("{}").tol.empty());
  CHECK(parse_checks_text(R"({"checks": {}})").tol.empty());

  // Every published name parses.
  for (const std::string& name : known_check_names()) {
    const std::string text = R"({"checks": {")" + name + R"(": 0.125}})";
    const ScenarioChecks checks = parse_checks_text(text);
    CHECK(checks.get(name, 0.0) == 0.125);
  }

  CHECK(message_of([] {
          (void)parse_checks_text(R"({"checks": {"nope": 1.0}})");
        }).find("unknown key: checks.nope") != std::string::npos);
  CHECK(message_of([] {
          (void)parse_checks_text(R"({"checks": {"mass_law": "tight"}})");
        }).find("key must be a number: checks.mass_law") != std::string::npos);
  CHECK(message_of([] { (void)parse_checks_text(R"({"bogus": {}})"); })
            .find("unknown key: bogus") != std::string::npos);
}

TEST_CASE("materialize turns profiles into initial-data callables") {
  Scenario sc = preset_scenario("shell_acoustic");
  sc.rho_b = ProfileSpec::gaussian(1.0, 0.2, 1.4, 0.3);
  sc.vel_b = ProfileSpec::constant(0.0125);
  const SimulatorConfig cfg = materialize(sc);
  REQUIRE(static_cast<bool>(cfg.rho_b0));
  REQUIRE(static_cast<bool>(cfg.vel_b0));
  for (double r : {1.05, 1.4, 1.73, 1.99}) {
    CHECK(std::abs(cfg.rho_b0(r) - sc.rho_b(r)) < 1e-15);
    CHECK(cfg.vel_b0(r) == 0.0125);
  }
}

TEST_CASE("scenario files load from disk and missing paths are reported") {
  const auto dir = fresh_dir("mfpt_scenario_io");
  const auto path = (dir / "case.json").string();
  {
    std::ofstream out(path);
    out << scenario_to_json(preset_scenario("sphere_mms"));
  }
  const Scenario sc = load_scenario_file(path);
  CHECK(sc.name == "sphere_mms");
  CHECK(scenario_to_json(sc) ==
        scenario_to_json(preset_scenario("sphere_mms")));

  const std::string missing = (dir / "nope.json").string();
  CHECK(message_of([&] { (void)load_scenario_file(missing); })
            .find("cannot open config file") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports evaluate verdicts by bound direction and serialize "
          "losslessly") {
  Report rep;
  rep.suite = "demo";
  rep.add_upper("small_residual", 1e-9, 1e-8);
  rep.add_upper("large_residual", 2e-8, 1e-8);
  rep.add_lower("good_order", 1.9, 1.0);
  rep.add_lower("bad_order", 0.4, 1.0);
  rep.add_case("explicit", 3.0, 7.0, true);

  REQUIRE(rep.cases.size() == 5);
  CHECK(rep.cases[0].pass);
  CHECK(!rep.cases[1].pass);
  CHECK(rep.cases[2].pass);
  CHECK(!rep.cases[3].pass);
  CHECK(rep.cases[4].pass);
  CHECK(!rep.all_pass());

  const Report back = Report::from_json(rep.to_json());
  CHECK(back.suite == rep.suite);
  REQUIRE(back.cases.size() == rep.cases.size());
  for (std::size_t i = 0; i < rep.cases.size(); ++i) {
    CHECK(back.cases[i].name == rep.cases[i].name);
    CHECK(back.cases[i].value == rep.cases[i].value);
    CHECK(back.cases[i].tolerance == rep.cases[i].tolerance);
    CHECK(back.cases[i].pass == rep.cases[i].pass);
  }
  CHECK(back.to_json() == rep.to_json());

  Report all_green;
  all_green.add_upper("only", 0.0, 1e-12);
  CHECK(all_green.all_pass());
}

TEST_CASE("observed order recovers the slope of synthetic error data") {
  const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> second, first;
  for (double hi : h) {
    second.push_back(3.0 * hi * hi);
    first.push_back(0.7 * hi);
  }
  CHECK(std::abs(observed_order(h, second) - 2.0) < 1e-10);
  CHECK(std::abs(observed_order(h, first) - 1.0) < 1e-10);
  // Exactly-zero errors read as very high order rather than NaN.
  CHECK(observed_order({0.1, 0.05}, {1e-3, 0.0}) > 8.0);
}

TEST_CASE("running the planar equilibrium preset passes its checks and "
          "writes artifacts") {
  Scenario sc = preset_scenario("equilibrium_planar");
  sc.output_every = 2;
  const auto dir = fresh_dir("mfpt_scenario_run");

  RunOptions opt;
  opt.out_dir = dir.string();
  opt.compare_classical = true;  // rest state: kernels must agree exactly
  const Report rep = run_scenario(sc, opt);

  CHECK(rep.suite == "equilibrium_planar");
  CHECK(rep.all_pass());
  bool saw_classical = false;
  for (const CaseResult& c : rep.cases)
    if (c.name == "classical_difference") {
      saw_classical = true;
      CHECK(c.value <= 1e-10);
    }
  CHECK(saw_classical);

  CHECK(std::filesystem::exists(dir / "ledger.csv"));
  CHECK(std::filesystem::exists(dir / "snapshot.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));

  // summary.json holds the same report that came back.
  const Report from_disk = Report::from_json(read_file((dir / "summary.json").string()));
  CHECK(from_disk.suite == rep.suite);
  CHECK(from_disk.cases.size() == rep.cases.size());

  // output_every > 0 produced interior snapshots, not just first and last.
  std::set<std::string> times;
  std::istringstream snap(read_file((dir / "snapshot.csv").string()));
  std::string line;
  std::getline(snap, line);  // header
  while (std::getline(snap, line))
    times.insert(line.substr(0, line.find(',')));
  CHECK(times.size() >= 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("deterministic runs zero the wall clock and are byte-identical") {
  Scenario sc = preset_scenario("equilibrium_planar");
  sc.sim.t_end = 0.02;

  const auto dir1 = fresh_dir("mfpt_det_run_1");
  const auto dir2 = fresh_dir("mfpt_det_run_2");
  RunOptions opt;
  opt.deterministic = true;

  opt.out_dir = dir1.string();
  const Report rep1 = run_scenario(sc, opt);
  opt.out_dir = dir2.string();
  const Report rep2 = run_scenario(sc, opt);

  CHECK(rep1.wall_time == 0.0);
  CHECK(rep2.wall_time == 0.0);
  for (const char* leaf : {"summary.json", "ledger.csv", "snapshot.csv"}) {
    const std::string a = read_file((dir1 / leaf).string());
    const std::string b = read_file((dir2 / leaf).string());
    CHECK(a == b);
    CHECK(!a.empty());
  }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("tolerance scaling multiplies every configured bound") {
  Scenario sc = preset_scenario("equilibrium_planar");
  sc.sim.t_end = 0.01;
  RunOptions opt;
  opt.tol_scale = 2.0;
  const Report rep = run_scenario(sc, opt);
  bool saw_mass = false;
  for (const CaseResult& c : rep.cases)
    if (c.name == "mass_law") {
      saw_mass = true;
      CHECK(std::abs(c.tolerance - 2.0 * 1e-12) < 1e-27);
    }
  CHECK(saw_mass);
}
