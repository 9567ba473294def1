#include "mfpt/report.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mfpt/errors.hpp"

namespace mfpt {

using ordered_json = nlohmann::ordered_json;

void Report::add_upper(const std::string& name, double value,
                       double tolerance) {
  cases.push_back({name, value, tolerance,
                   std::isfinite(value) && value <= tolerance});
}

void Report::add_lower(const std::string& name, double value, double floor) {
  cases.push_back({name, value, floor, std::isfinite(value) && value >= floor});
}

void Report::add_case(const std::string& name, double value, double tolerance,
                      bool pass) {
  cases.push_back({name, value, tolerance, pass});
}

bool Report::all_pass() const {
  for (const CaseResult& c : cases)
    if (!c.pass) return false;
  return true;
}

std::string Report::to_json() const {
  ordered_json j;
  j["suite"] = suite;
  j["cases"] = ordered_json::array();
  for (const CaseResult& c : cases) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    j["cases"].push_back(jc);
  }
  j["wall_time"] = wall_time;
  return j.dump(2) + "\n";
}

Report Report::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid report JSON: ") + e.what());
  }
  Report r;
  try {
    r.suite = j.at("suite").get<std::string>();
    for (const auto& jc : j.at("cases")) {
      CaseResult c;
      c.name = jc.at("name").get<std::string>();
      c.value = jc.at("value").get<double>();
      c.tolerance = jc.at("tolerance").get<double>();
      c.pass = jc.at("pass").get<bool>();
      r.cases.push_back(c);
    }
    r.wall_time = j.at("wall_time").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

void Report::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open report file for writing: " + path);
  out << to_json();
}

double observed_order(const std::vector<double>& h,
                      const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw ConfigError("observed_order needs matching vectors of length >= 2");
  const std::size_t n = h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0))
      throw ConfigError("observed_order needs positive resolutions");
    const double x = std::log(h[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw ConfigError("observed_order needs distinct resolutions");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace mfpt
