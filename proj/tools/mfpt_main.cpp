// Command-line entry point: verification suites and the 1D simulator with
// machine-readable reports.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 config/usage error,
// 3 runtime abort (CFL violation, negative density, ...). Every non-zero
// exit is accompanied by a single-line JSON record on stderr.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfpt/errors.hpp"
#include "mfpt/report.hpp"
#include "mfpt/scenario.hpp"
#include "mfpt/verification.hpp"

namespace {

using mfpt::Report;
using mfpt::ScenarioChecks;
using mfpt::SuiteOptions;
using ordered_json = nlohmann::ordered_json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool deterministic = false;
  double tol_scale = 1.0;
};

int emit_error(const std::string& kind, const std::string& message, int code) {
  ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << "\n";
  return code;
}

/// Prints the report to stdout and converts its verdict into an exit code,
/// emitting the one-line failure record when checks failed.
int finish(const Report& rep) {
  std::cout << rep.to_json();
  if (rep.all_pass()) return 0;
  ordered_json j;
  j["error"] = "check";
  j["message"] = "checks failed in suite '" + rep.suite + "'";
  auto failed = ordered_json::array();
  for (const auto& c : rep.cases)
    if (!c.pass) failed.push_back(c.name);
  j["cases"] = failed;
  std::cerr << j.dump() << "\n";
  return 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mfpt::ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw mfpt::ConfigError("cannot create output directory '" + out_dir +
                            "': " + ec.message());
}

int run_suite(Report (*suite)(const ScenarioChecks&, const SuiteOptions&),
              const CommonArgs& args) {
  ScenarioChecks checks;
  if (!args.config_path.empty())
    checks = mfpt::parse_checks_text(slurp(args.config_path));

  SuiteOptions opt;
  opt.seed = args.seed;
  opt.tol_scale = args.tol_scale;
  opt.deterministic = args.deterministic;

  const auto t0 = std::chrono::steady_clock::now();
  Report rep = suite(checks, opt);
  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_time =
      args.deterministic ? 0.0 : std::chrono::duration<double>(t1 - t0).count();

  if (!args.out_dir.empty()) {
    ensure_out_dir(args.out_dir);
    rep.write_json(args.out_dir + "/" + rep.suite + "_report.json");
  }
  return finish(rep);
}

int run_simulate(const CommonArgs& args, bool compare_classical) {
  const mfpt::Scenario sc = mfpt::load_scenario_file(args.config_path);
  ensure_out_dir(args.out_dir);

  mfpt::RunOptions ro;
  ro.out_dir = args.out_dir;
  ro.deterministic = args.deterministic;
  ro.tol_scale = args.tol_scale;
  ro.compare_classical = compare_classical;
  return finish(mfpt::run_scenario(sc, ro));
}

/// Aggregates every parseable report JSON under the output directory into a
/// single pass/fail summary on stdout.
int run_report(const std::string& out_dir) {
  if (out_dir.empty())
    throw mfpt::ConfigError("report requires --out with report files");
  if (!std::filesystem::is_directory(out_dir))
    throw mfpt::ConfigError("not a directory: " + out_dir);

  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  ordered_json agg;
  agg["reports"] = ordered_json::array();
  bool all_pass = true;
  int found = 0;
  for (const auto& file : files) {
    Report rep;
    try {
      rep = Report::from_json(slurp(file));
    } catch (const mfpt::ConfigError&) {
      continue;  // some other JSON artifact; not a report
    }
    ++found;
    int failed = 0;
    for (const auto& c : rep.cases)
      if (!c.pass) ++failed;
    all_pass = all_pass && rep.all_pass();
    ordered_json entry;
    entry["file"] = std::filesystem::path(file).filename().string();
    entry["suite"] = rep.suite;
    entry["cases"] = rep.cases.size();
    entry["failed"] = failed;
    agg["reports"].push_back(entry);
  }
  if (found == 0)
    throw mfpt::ConfigError("no report JSON files found in: " + out_dir);
  agg["all_pass"] = all_pass;
  std::cout << agg.dump(2) << "\n";
  if (!all_pass)
    return emit_error("check", "aggregated reports contain failures", 1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-phase flow with phase transition: verification suites and 1D "
      "simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  bool compare_classical = false;

  auto add_common = [&args](CLI::App* sub, bool config_required) {
    auto* cfg = sub->add_option("--config", args.config_path,
                                "JSON config file");
    if (config_required) cfg->required();
    sub->add_option("--out", args.out_dir, "output directory for reports");
    sub->add_option("--seed", args.seed, "RNG seed for randomized cases");
    sub->add_flag("--deterministic", args.deterministic,
                  "byte-stable outputs (zeroed wall times)");
    sub->add_option("--tol-scale", args.tol_scale,
                    "multiplies every tolerance (CI smoke runs)");
  };

  auto* cmd_simulate = app.add_subcommand(
      "simulate", "run a scenario and evaluate its conservation checks");
  add_common(cmd_simulate, true);
  cmd_simulate->add_flag(
      "--compare-classical", compare_classical,
      "also diff the run against the independent classical kernel");

  auto* cmd_surface = app.add_subcommand(
      "verify-surface", "tangential calculus and divergence theorem");
  auto* cmd_transport = app.add_subcommand(
      "verify-transport", "moving-domain transport identities");
  auto* cmd_variational = app.add_subcommand(
      "verify-variational", "energy variation forces and pressure potential");
  auto* cmd_mms = app.add_subcommand(
      "mms", "manufactured-state residual and equivalence checks");
  for (CLI::App* sub : {cmd_surface, cmd_transport, cmd_variational, cmd_mms})
    add_common(sub, false);

  auto* cmd_report =
      app.add_subcommand("report", "aggregate report JSONs from --out");
  cmd_report->add_option("--out", args.out_dir, "directory holding reports")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", e.what(), 2);
  }

  try {
    if (!(args.tol_scale > 0.0) || !std::isfinite(args.tol_scale))
      throw mfpt::ConfigError("--tol-scale must be a positive finite number");

    if (cmd_simulate->parsed()) return run_simulate(args, compare_classical);
    if (cmd_surface->parsed()) return run_suite(mfpt::suite_surface, args);
    if (cmd_transport->parsed()) return run_suite(mfpt::suite_transport, args);
    if (cmd_variational->parsed())
      return run_suite(mfpt::suite_variational, args);
    if (cmd_mms->parsed()) return run_suite(mfpt::suite_mms, args);
    if (cmd_report->parsed()) return run_report(args.out_dir);
    return emit_error("usage", "no subcommand selected", 2);
  } catch (const mfpt::ConfigError& e) {
    return emit_error("config", e.what(), 2);
  } catch (const mfpt::NumericalAbortError& e) {
    return emit_error("runtime", e.what(), 3);
  } catch (const mfpt::Error& e) {
    return emit_error("runtime", e.what(), 3);
  } catch (const std::exception& e) {
    return emit_error("runtime", e.what(), 3);
  }
}
