#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfpt/report.hpp"
#include "mfpt/simulator.hpp"

namespace mfpt {

/// Serializable radial/axial profile for initial data.
struct ProfileSpec {
  enum class Kind { Constant, Gaussian };
  Kind kind = Kind::Constant;
  double value = 0.0;  // constant
  // gaussian: base + amplitude * exp(-((x - center)/width)^2)
  double base = 0.0;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const;
  static ProfileSpec constant(double v);
  static ProfileSpec gaussian(double base, double amplitude, double center,
                              double width);
};

/// Named tolerances. Consumers look entries up by name and fall back to a
/// documented default, so every threshold that appears in a report can be
/// overridden from the config file.
struct ScenarioChecks {
  std::map<std::string, double> tol;
  double get(const std::string& name, double fallback) const;
  void set(const std::string& name, double value) { tol[name] = value; }
};

struct Scenario {
  std::string name = "custom";
  SimulatorConfig sim;
  ProfileSpec rho_b = ProfileSpec::constant(1.0);
  ProfileSpec vel_b = ProfileSpec::constant(0.0);
  ScenarioChecks checks;
  int output_every = 0;  // snapshot cadence in steps; 0 = initial and final
};

/// Built-in presets: equilibrium_planar, shell_acoustic, sphere_mms,
/// sphere_variational.
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

/// Names accepted inside a "checks" object, scenario-wide.
const std::vector<std::string>& known_check_names();

/// Parses a standalone tolerance override file: {"checks": {name: value}}.
/// An empty object is valid; the schema is as strict as scenario files.
ScenarioChecks parse_checks_text(const std::string& json_text);

/// Parses a scenario from JSON text. The schema is strict: unknown keys are
/// rejected and missing required keys are reported by their dotted path. A
/// top-level "preset" key starts from that preset and applies the remaining
/// keys as overrides (making every other key optional).
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

/// SimulatorConfig with the initial-data profiles materialized.
SimulatorConfig materialize(const Scenario& scenario);

struct RunOptions {
  std::string out_dir;  // empty = write nothing
  bool deterministic = false;
  double tol_scale = 1.0;
  bool compare_classical = false;
};

/// Runs the scenario to sim.t_end, evaluates the conservation checks against
/// the configured tolerances, and (when out_dir is set) writes snapshot.csv,
/// ledger.csv, and summary.json. The returned report carries one case per
/// check; wall_time is zeroed in deterministic mode.
Report run_scenario(const Scenario& scenario, const RunOptions& options);

/// CSV writers used by run_scenario (exposed for tools/tests).
void write_ledger_csv(const Ledger& ledger, const std::string& path);
void write_snapshot_csv(const std::vector<double>& times,
                        const std::vector<PhaseState>& phase_a,
                        const std::vector<PhaseState>& phase_b,
                        const std::string& path);

}  // namespace mfpt
