#include "mfpt/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mfpt/errors.hpp"

namespace mfpt {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

double ProfileSpec::operator()(double x) const {
  if (kind == Kind::Constant) return value;
  const double arg = (x - center) / width;
  return base + amplitude * std::exp(-arg * arg);
}

ProfileSpec ProfileSpec::constant(double v) {
  ProfileSpec p;
  p.kind = Kind::Constant;
  p.value = v;
  return p;
}

ProfileSpec ProfileSpec::gaussian(double base, double amplitude, double center,
                                  double width) {
  ProfileSpec p;
  p.kind = Kind::Gaussian;
  p.base = base;
  p.amplitude = amplitude;
  p.center = center;
  p.width = width;
  return p;
}

double ScenarioChecks::get(const std::string& name, double fallback) const {
  auto it = tol.find(name);
  return it == tol.end() ? fallback : it->second;
}

// ---------------------------------------------------------------------------
// Schema helpers
// ---------------------------------------------------------------------------

const std::vector<std::string>& known_check_names() {
  static const std::vector<std::string> names = {
      "mass_law",
      "energy_law",
      "interface_balance",
      "divergence_theorem",
      "surface_order_floor",
      "transport_order_window",
      "variational_inviscid",
      "variational_viscous",
      "helmholtz_gradient",
      "equivalence",
      "manufactured_residual",
      "primitive_order_floor",
      "classical_difference",
      "energy_refinement_ratio",
      "energy_law_inviscid",
  };
  return names;
}

namespace {

[[noreturn]] void schema_error(const std::string& message) {
  throw ConfigError(message);
}

std::string join_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void require_known_keys(const ordered_json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known)
      schema_error("unknown key: " + join_path(where, it.key()));
  }
}

double get_number(const ordered_json& obj, const std::string& where,
                  const std::string& key, bool required, double fallback) {
  if (!obj.contains(key)) {
    if (required)
      schema_error("missing required key: " + join_path(where, key));
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number())
    schema_error("key must be a number: " + join_path(where, key));
  return v.get<double>();
}

int get_int(const ordered_json& obj, const std::string& where,
            const std::string& key, bool required, int fallback) {
  if (!obj.contains(key)) {
    if (required)
      schema_error("missing required key: " + join_path(where, key));
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    schema_error("key must be an integer: " + join_path(where, key));
  return v.get<int>();
}

std::string get_string(const ordered_json& obj, const std::string& where,
                       const std::string& key, bool required,
                       const std::string& fallback) {
  if (!obj.contains(key)) {
    if (required)
      schema_error("missing required key: " + join_path(where, key));
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_string())
    schema_error("key must be a string: " + join_path(where, key));
  return v.get<std::string>();
}

ProfileSpec parse_profile(const ordered_json& obj, const std::string& where) {
  if (!obj.is_object())
    schema_error("profile must be an object: " + where);
  const std::string kind = get_string(obj, where, "kind", true, "");
  if (kind == "constant") {
    require_known_keys(obj, where, {"kind", "value"});
    return ProfileSpec::constant(get_number(obj, where, "value", true, 0.0));
  }
  if (kind == "gaussian") {
    require_known_keys(obj, where,
                       {"kind", "base", "amplitude", "center", "width"});
    ProfileSpec p = ProfileSpec::gaussian(
        get_number(obj, where, "base", true, 0.0),
        get_number(obj, where, "amplitude", true, 0.0),
        get_number(obj, where, "center", true, 0.0),
        get_number(obj, where, "width", true, 1.0));
    if (!(p.width > 0.0))
      schema_error("profile width must be positive: " + where);
    return p;
  }
  schema_error("invalid profile kind '" + kind + "' at " + where);
}

ordered_json profile_to_json(const ProfileSpec& p) {
  ordered_json j;
  if (p.kind == ProfileSpec::Kind::Constant) {
    j["kind"] = "constant";
    j["value"] = p.value;
  } else {
    j["kind"] = "gaussian";
    j["base"] = p.base;
    j["amplitude"] = p.amplitude;
    j["center"] = p.center;
    j["width"] = p.width;
  }
  return j;
}

Model parse_model(const std::string& s) {
  if (s == "inviscid") return Model::Inviscid;
  if (s == "viscous") return Model::Viscous;
  schema_error("invalid value for model: '" + s +
               "' (expected inviscid or viscous)");
}

GeometryKind parse_geometry(const std::string& s) {
  if (s == "planar") return GeometryKind::Planar;
  if (s == "spherical") return GeometryKind::Spherical;
  schema_error("invalid value for geometry: '" + s +
               "' (expected planar or spherical)");
}

FluxMode parse_flux_mode(const std::string& s) {
  if (s == "conservative") return FluxMode::Conservative;
  if (s == "primitive") return FluxMode::Primitive;
  schema_error("invalid value for flux_mode: '" + s +
               "' (expected conservative or primitive)");
}

SlopeLimiter parse_limiter(const std::string& s) {
  if (s == "first_order") return SlopeLimiter::FirstOrder;
  if (s == "central") return SlopeLimiter::Central;
  if (s == "minmod") return SlopeLimiter::Minmod;
  schema_error("invalid value for limiter: '" + s +
               "' (expected first_order, central, or minmod)");
}

const char* model_name(Model m) {
  return m == Model::Inviscid ? "inviscid" : "viscous";
}
const char* geometry_name(GeometryKind g) {
  return g == GeometryKind::Planar ? "planar" : "spherical";
}
const char* flux_mode_name(FluxMode f) {
  return f == FluxMode::Conservative ? "conservative" : "primitive";
}
const char* limiter_name(SlopeLimiter l) {
  switch (l) {
    case SlopeLimiter::FirstOrder: return "first_order";
    case SlopeLimiter::Central: return "central";
    default: return "minmod";
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"equilibrium_planar", "shell_acoustic", "sphere_mms",
          "sphere_variational"};
}

Scenario preset_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  if (name == "equilibrium_planar") {
    sc.sim.model = Model::Viscous;
    sc.sim.geometry = GeometryKind::Planar;
    sc.sim.material.mu_A = 0.02;
    sc.sim.material.mu_B = 0.01;
    sc.sim.material.lambda_B = 0.01;
    sc.sim.cells_b = 128;
    sc.sim.dt = 0.0;
    sc.sim.t_end = 0.05;
    sc.sim.domain_length = 3.0;
    sc.sim.slug_left = 1.0;
    sc.sim.slug_right = 2.0;
    sc.rho_b = ProfileSpec::constant(1.0);
    sc.vel_b = ProfileSpec::constant(0.0);
    sc.checks.set("mass_law", 1e-12);
    sc.checks.set("energy_law", 1e-10);
    sc.checks.set("interface_balance", 1e-10);
    return sc;
  }
  if (name == "shell_acoustic") {
    sc.sim.model = Model::Viscous;
    sc.sim.geometry = GeometryKind::Spherical;
    sc.sim.material.mu_A = 0.01;
    sc.sim.material.mu_B = 5e-3;
    sc.sim.material.lambda_B = 5e-3;
    sc.sim.cells_b = 400;
    sc.sim.dt = 1e-4;
    sc.sim.t_end = 0.02;
    sc.sim.interface_radius = 1.0;
    sc.sim.outer_radius = 2.0;
    sc.rho_b = ProfileSpec::constant(1.0);
    sc.vel_b = ProfileSpec::gaussian(0.0, 0.05, 1.5, 0.12);
    sc.checks.set("mass_law", 1e-8);
    // The balance residual of this run sits at its grid's spatial floor
    // (~1e-5); the refinement ladder in the simulator suite is what drives
    // it down.
    sc.checks.set("energy_law", 2e-5);
    sc.checks.set("interface_balance", 1e-10);
    sc.checks.set("primitive_order_floor", 1.0);
    sc.checks.set("energy_refinement_ratio", 0.5);
    sc.checks.set("classical_difference", 1e-10);
    return sc;
  }
  if (name == "sphere_mms") {
    sc.sim.model = Model::Viscous;
    sc.sim.geometry = GeometryKind::Spherical;
    sc.sim.material.mu_A = 0.02;
    sc.sim.material.mu_B = 0.01;
    sc.sim.material.lambda_B = 0.01;
    sc.sim.cells_b = 64;
    sc.sim.dt = 0.0;
    sc.sim.t_end = 0.01;
    sc.sim.interface_radius = 1.0;
    sc.sim.outer_radius = 2.0;
    sc.checks.set("equivalence", 1e-8);
    sc.checks.set("manufactured_residual", 1e-9);
    sc.checks.set("mass_law", 1e-10);
    sc.checks.set("interface_balance", 1e-10);
    return sc;
  }
  if (name == "sphere_variational") {
    sc.sim.model = Model::Viscous;
    sc.sim.geometry = GeometryKind::Spherical;
    sc.sim.material.mu_A = 0.3;
    sc.sim.material.mu_B = 0.2;
    sc.sim.material.lambda_B = 0.1;
    sc.sim.cells_b = 64;
    sc.sim.t_end = 0.001;
    sc.sim.interface_radius = 1.0;
    sc.sim.outer_radius = 2.0;
    sc.checks.set("variational_inviscid", 1e-5);
    sc.checks.set("variational_viscous", 1e-4);
    sc.checks.set("helmholtz_gradient", 1e-3);
    return sc;
  }
  throw ConfigError("unknown preset: '" + name + "'");
}

// ---------------------------------------------------------------------------
// Parse / serialize
// ---------------------------------------------------------------------------

namespace {

void parse_checks_object(const ordered_json& c, ScenarioChecks& out) {
  if (!c.is_object()) schema_error("checks must be an object");
  for (auto it = c.begin(); it != c.end(); ++it) {
    const auto& names = known_check_names();
    if (std::find(names.begin(), names.end(), it.key()) == names.end())
      schema_error("unknown key: checks." + it.key());
    if (!it.value().is_number())
      schema_error("key must be a number: checks." + it.key());
    out.set(it.key(), it.value().get<double>());
  }
}

}  // namespace

ScenarioChecks parse_checks_text(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  require_known_keys(j, "", {"checks"});
  ScenarioChecks out;
  if (j.contains("checks")) parse_checks_object(j.at("checks"), out);
  return out;
}

Scenario parse_scenario(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  require_known_keys(j, "",
                     {"preset", "name", "model", "geometry", "flux_mode",
                      "limiter", "material", "grid", "time", "domain",
                      "initial", "checks", "output_every"});

  Scenario sc;
  bool from_preset = false;
  if (j.contains("preset")) {
    sc = preset_scenario(get_string(j, "", "preset", true, ""));
    from_preset = true;
  }
  const bool need = !from_preset;

  if (j.contains("name")) sc.name = get_string(j, "", "name", false, sc.name);

  if (j.contains("model") || need)
    sc.sim.model = parse_model(
        get_string(j, "", "model", need, model_name(sc.sim.model)));
  if (j.contains("geometry") || need)
    sc.sim.geometry = parse_geometry(
        get_string(j, "", "geometry", need, geometry_name(sc.sim.geometry)));
  if (j.contains("flux_mode"))
    sc.sim.flux_mode =
        parse_flux_mode(get_string(j, "", "flux_mode", false, ""));
  if (j.contains("limiter"))
    sc.sim.limiter = parse_limiter(get_string(j, "", "limiter", false, ""));

  if (j.contains("material") || need) {
    if (!j.contains("material"))
      schema_error("missing required key: material");
    const auto& m = j.at("material");
    if (!m.is_object()) schema_error("material must be an object");
    require_known_keys(
        m, "material",
        {"mu_A", "mu_B", "lambda_B", "rho_0", "pi_0", "K", "gamma"});
    MaterialParams& mat = sc.sim.material;
    mat.rho_0 = get_number(m, "material", "rho_0", need, mat.rho_0);
    mat.pi_0 = get_number(m, "material", "pi_0", need, mat.pi_0);
    mat.K = get_number(m, "material", "K", need, mat.K);
    mat.gamma = get_number(m, "material", "gamma", need, mat.gamma);
    const bool need_visc = need && sc.sim.model == Model::Viscous;
    mat.mu_A = get_number(m, "material", "mu_A", need_visc, mat.mu_A);
    mat.mu_B = get_number(m, "material", "mu_B", need_visc, mat.mu_B);
    mat.lambda_B =
        get_number(m, "material", "lambda_B", need_visc, mat.lambda_B);
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) schema_error("grid must be an object");
    require_known_keys(g, "grid", {"cells_b", "cells_a"});
    sc.sim.cells_b = get_int(g, "grid", "cells_b", false, sc.sim.cells_b);
    sc.sim.cells_a = get_int(g, "grid", "cells_a", false, sc.sim.cells_a);
  }

  if (j.contains("time") || need) {
    if (!j.contains("time")) schema_error("missing required key: time");
    const auto& t = j.at("time");
    if (!t.is_object()) schema_error("time must be an object");
    require_known_keys(t, "time", {"dt", "cfl", "t_end"});
    sc.sim.t_end = get_number(t, "time", "t_end", need, sc.sim.t_end);
    sc.sim.dt = get_number(t, "time", "dt", false, sc.sim.dt);
    sc.sim.cfl = get_number(t, "time", "cfl", false, sc.sim.cfl);
  }

  if (j.contains("domain") || need) {
    if (!j.contains("domain")) schema_error("missing required key: domain");
    const auto& d = j.at("domain");
    if (!d.is_object()) schema_error("domain must be an object");
    if (sc.sim.geometry == GeometryKind::Planar) {
      require_known_keys(d, "domain", {"length", "slug_left", "slug_right"});
      sc.sim.domain_length =
          get_number(d, "domain", "length", need, sc.sim.domain_length);
      sc.sim.slug_left =
          get_number(d, "domain", "slug_left", need, sc.sim.slug_left);
      sc.sim.slug_right =
          get_number(d, "domain", "slug_right", need, sc.sim.slug_right);
    } else {
      require_known_keys(d, "domain", {"interface_radius", "outer_radius"});
      sc.sim.interface_radius = get_number(d, "domain", "interface_radius",
                                           need, sc.sim.interface_radius);
      sc.sim.outer_radius =
          get_number(d, "domain", "outer_radius", need, sc.sim.outer_radius);
    }
  }

  if (j.contains("initial")) {
    const auto& ini = j.at("initial");
    if (!ini.is_object()) schema_error("initial must be an object");
    require_known_keys(ini, "initial", {"rho_a", "vel_a", "rho_b", "vel_b"});
    sc.sim.rho_a0 = get_number(ini, "initial", "rho_a", false, sc.sim.rho_a0);
    sc.sim.vel_a0 = get_number(ini, "initial", "vel_a", false, sc.sim.vel_a0);
    if (ini.contains("rho_b"))
      sc.rho_b = parse_profile(ini.at("rho_b"), "initial.rho_b");
    if (ini.contains("vel_b"))
      sc.vel_b = parse_profile(ini.at("vel_b"), "initial.vel_b");
  }

  if (j.contains("checks")) parse_checks_object(j.at("checks"), sc.checks);

  sc.output_every = get_int(j, "", "output_every", false, sc.output_every);
  if (sc.output_every < 0)
    schema_error("output_every must be non-negative");

  sc.sim.validate();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
  ordered_json j;
  j["name"] = sc.name;
  j["model"] = model_name(sc.sim.model);
  j["geometry"] = geometry_name(sc.sim.geometry);
  j["flux_mode"] = flux_mode_name(sc.sim.flux_mode);
  j["limiter"] = limiter_name(sc.sim.limiter);
  ordered_json m;
  m["mu_A"] = sc.sim.material.mu_A;
  m["mu_B"] = sc.sim.material.mu_B;
  m["lambda_B"] = sc.sim.material.lambda_B;
  m["rho_0"] = sc.sim.material.rho_0;
  m["pi_0"] = sc.sim.material.pi_0;
  m["K"] = sc.sim.material.K;
  m["gamma"] = sc.sim.material.gamma;
  j["material"] = m;
  ordered_json g;
  g["cells_b"] = sc.sim.cells_b;
  g["cells_a"] = sc.sim.cells_a;
  j["grid"] = g;
  ordered_json t;
  t["dt"] = sc.sim.dt;
  t["cfl"] = sc.sim.cfl;
  t["t_end"] = sc.sim.t_end;
  j["time"] = t;
  ordered_json d;
  if (sc.sim.geometry == GeometryKind::Planar) {
    d["length"] = sc.sim.domain_length;
    d["slug_left"] = sc.sim.slug_left;
    d["slug_right"] = sc.sim.slug_right;
  } else {
    d["interface_radius"] = sc.sim.interface_radius;
    d["outer_radius"] = sc.sim.outer_radius;
  }
  j["domain"] = d;
  ordered_json ini;
  ini["rho_a"] = sc.sim.rho_a0;
  ini["vel_a"] = sc.sim.vel_a0;
  ini["rho_b"] = profile_to_json(sc.rho_b);
  ini["vel_b"] = profile_to_json(sc.vel_b);
  j["initial"] = ini;
  ordered_json c;
  for (const auto& kv : sc.checks.tol) c[kv.first] = kv.second;
  j["checks"] = c;
  j["output_every"] = sc.output_every;
  return j.dump(2) + "\n";
}

SimulatorConfig materialize(const Scenario& sc) {
  SimulatorConfig cfg = sc.sim;
  const ProfileSpec rho_b = sc.rho_b;
  const ProfileSpec vel_b = sc.vel_b;
  cfg.rho_b0 = [rho_b](double x) { return rho_b(x); };
  cfg.vel_b0 = [vel_b](double x) { return vel_b(x); };
  return cfg;
}

// ---------------------------------------------------------------------------
// Run + writers
// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_ledger_csv(const Ledger& ledger, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,M_A,M_B,surf_mass,KE_A,KE_B,dissipation,work_B,work_surf,src_A,"
         "src_B\n";
  for (const LedgerRow& r : ledger.rows()) {
    out << r.t << ',' << r.mass_a << ',' << r.mass_b << ',' << r.surf_mass
        << ',' << r.ke_a << ',' << r.ke_b << ',' << r.dissipation << ','
        << r.work_b << ',' << r.work_surf << ',' << r.src_a << ',' << r.src_b
        << '\n';
  }
}

void write_snapshot_csv(const std::vector<double>& times,
                        const std::vector<PhaseState>& phase_a,
                        const std::vector<PhaseState>& phase_b,
                        const std::string& path) {
  if (times.size() != phase_a.size() || times.size() != phase_b.size())
    throw ConfigError("snapshot series lengths disagree");
  std::ofstream out = open_out(path);
  out << "t,cell,x_or_r,rho,vel,pressure,phase\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const PhaseState& a = phase_a[k];
    for (std::size_t i = 0; i < a.x.size(); ++i)
      out << times[k] << ',' << i << ',' << a.x[i] << ',' << a.rho[i] << ','
          << a.vel[i] << ',' << a.pressure[i] << ",A\n";
    const PhaseState& b = phase_b[k];
    for (std::size_t i = 0; i < b.x.size(); ++i)
      out << times[k] << ',' << i << ',' << b.x[i] << ',' << b.rho[i] << ','
          << b.vel[i] << ',' << b.pressure[i] << ",B\n";
  }
}

Report run_scenario(const Scenario& sc, const RunOptions& opt) {
  const auto wall_start = std::chrono::steady_clock::now();
  const SimulatorConfig cfg = materialize(sc);
  Simulator1D sim(cfg);

  std::vector<double> snap_times;
  std::vector<PhaseState> snaps_a, snaps_b;
  const auto snap = [&] {
    snap_times.push_back(sim.time());
    snaps_a.push_back(sim.phase_a());
    snaps_b.push_back(sim.phase_b());
  };
  snap();
  const double eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
  if (sc.output_every > 0) {
    while (sim.time() < cfg.t_end - eps) {
      sim.step();
      if (sim.step_count() % sc.output_every == 0) snap();
    }
  } else {
    sim.advance(cfg.t_end);
  }
  if (snap_times.back() != sim.time()) snap();

  Report rep;
  rep.suite = sc.name;
  const double scale = opt.tol_scale;
  rep.add_upper("mass_law", check_mass_law(sim.ledger(), 0.0, sim.time()),
                scale * sc.checks.get("mass_law", 1e-8));
  const bool mu_zero = cfg.model == Model::Inviscid;
  rep.add_upper("energy_law",
                check_energy_law(sim.ledger(), 0.0, sim.time(), mu_zero),
                scale * sc.checks.get("energy_law", 1e-4));
  rep.add_upper("interface_balance", sim.interface_balance_residual(),
                scale * sc.checks.get("interface_balance", 1e-10));
  if (opt.compare_classical) {
    const int steps =
        static_cast<int>(std::min<long>(100, sim.step_count()));
    const ClassicalComparison comp = compare_with_classical(cfg, steps);
    rep.add_upper("classical_difference", comp.max_difference,
                  scale * sc.checks.get("classical_difference", 1e-10));
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - wall_start;
  rep.wall_time = opt.deterministic ? 0.0 : elapsed.count();

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    write_ledger_csv(sim.ledger(), opt.out_dir + "/ledger.csv");
    write_snapshot_csv(snap_times, snaps_a, snaps_b,
                       opt.out_dir + "/snapshot.csv");
    rep.write_json(opt.out_dir + "/summary.json");
  }
  return rep;
}

}  // namespace mfpt
