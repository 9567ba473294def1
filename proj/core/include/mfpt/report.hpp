#pragma once

#include <string>
#include <vector>

namespace mfpt {

/// One named check: `value` compared against `tolerance`. The comparison
/// direction is decided by whoever fills the case (upper bounds for
/// residuals, lower bounds for convergence orders); `pass` records the
/// verdict explicitly so serialized reports are self-contained.
struct CaseResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  std::vector<CaseResult> cases;
  double wall_time = 0.0;

  /// pass when value <= tolerance.
  void add_upper(const std::string& name, double value, double tolerance);
  /// pass when value >= floor (stored in the tolerance field).
  void add_lower(const std::string& name, double value, double floor);
  /// explicit verdict.
  void add_case(const std::string& name, double value, double tolerance,
                bool pass);

  bool all_pass() const;

  /// Canonical serialization: {"suite", "cases": [{name, value, tolerance,
  /// pass}...], "wall_time"} with stable key order.
  std::string to_json() const;
  static Report from_json(const std::string& text);
  void write_json(const std::string& path) const;
};

/// Observed convergence order: the least-squares slope of log(error)
/// against log(1/h) given matching resolutions h and errors (positive when
/// the error shrinks under refinement). Non-positive errors are clamped to
/// a tiny floor so an exactly-zero error reads as very high order.
double observed_order(const std::vector<double>& h,
                      const std::vector<double>& err);

}  // namespace mfpt
