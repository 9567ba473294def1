#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfpt/material.hpp"

namespace mfpt {

// ---------------------------------------------------------------------------
// 1D two-phase solver with a mass/energy ledger.
//
// Two reduced geometries:
//
//  * Planar: the domain [0, L] holds a B | A | B sandwich. The incompressible
//    A slug [s1, s2] has a spatially uniform velocity V(t) (the discrete
//    div v_A = 0), a uniform density rho_A(t), and a pressure that is linear
//    in x; both interfaces are flat (H = 0) and translate with V. The outer
//    walls are impermeable. The B gas columns are compressible barotropic
//    (pi = K rho^gamma) on meshes that stretch with the interfaces
//    (arbitrary Lagrangian-Eulerian mapping to fixed reference intervals).
//
//  * Spherical: phase A fills the ball r < R with v_A = 0 (the only bounded
//    solenoidal purely radial field), so the interface sphere is fixed and
//    rho_A is constant; its pressure is the spatially uniform value that
//    balances the interface stress jump. Phase B is a radial barotropic gas
//    in the shell R < r < R_out between two impermeable boundaries.
//
// Phase B advances the conservative-form fluxes (rho v + (rho_0/pi_0) T v,
// rho v x v - T) with a Rusanov scheme, MUSCL slopes, and SSP-RK2; viscous
// and phase-coupling gradient terms enter as central face differences. A
// primitive mode discretizes the non-conservative equations directly (for
// the mass-drift convergence comparison); it supports the spherical
// geometry.
// ---------------------------------------------------------------------------

enum class GeometryKind { Planar, Spherical };
enum class FluxMode { Conservative, Primitive };
enum class SlopeLimiter { FirstOrder, Central, Minmod };

struct SimulatorConfig {
  Model model = Model::Viscous;
  GeometryKind geometry = GeometryKind::Spherical;
  FluxMode flux_mode = FluxMode::Conservative;
  SlopeLimiter limiter = SlopeLimiter::Central;
  MaterialParams material;

  int cells_b = 400;  // cells per B subdomain
  int cells_a = 8;    // sampling cells for A-phase snapshots
  double cfl = 0.4;
  double dt = 0.0;  // fixed time step; 0 selects adaptively from cfl
  double t_end = 0.1;

  // Planar geometry: domain [0, L], A slug [slug_left, slug_right].
  double domain_length = 3.0;
  double slug_left = 1.0;
  double slug_right = 2.0;

  // Spherical geometry.
  double interface_radius = 1.0;
  double outer_radius = 2.0;

  // Initial data. B profiles are functions of x (planar) or r (spherical);
  // unset profiles default to rho = 1, v = 0. B pressure always follows the
  // barotropic closure.
  double rho_a0 = 1.0;
  double vel_a0 = 0.0;
  std::function<double(double)> rho_b0;
  std::function<double(double)> vel_b0;

  /// When set, every flux/update runs through a separate classical kernel
  /// with no phase-transition coupling anywhere (the rho_0 = 0 system,
  /// written as an independent code path for cross-checking).
  bool classical_kernel = false;

  void validate() const;
};

/// Per-cell snapshot of one phase on its current subdomain.
struct PhaseState {
  std::vector<double> x;  // cell centers (x or r)
  std::vector<double> rho;
  std::vector<double> vel;
  std::vector<double> pressure;
};

struct InterfaceState {
  double position = 0.0;      // x of the interface (planar) or R (spherical)
  double v_s_normal = 0.0;    // rate of the position
  double area = 1.0;          // |Gamma| carried by this interface
  double mean_curvature = 0.0;
};

/// One sampling instant of every conservation/energy integral the checks
/// consume. Dissipation carries no 1/2 (it enters the energy balance as
/// mu |D|^2 + lambda (div)^2), work and source entries are the right-hand
/// side rates of the energy balance.
struct LedgerRow {
  double t = 0.0;
  double mass_a = 0.0;
  double mass_b = 0.0;
  double surf_mass = 0.0;  // rho_0 |Gamma|
  double ke_a = 0.0;
  double ke_b = 0.0;
  double dissipation = 0.0;  // int mu_A |D(v_A)|^2 + int (mu_B |D|^2 + lambda_B div^2)
  double work_b = 0.0;       // int (div v_B) pi_B
  double work_surf = 0.0;    // pi_0 int div_S v_S
  double src_a = 0.0;        // int (c/2) div(T_A v_A) |v_A|^2
  double src_b = 0.0;        // int (c/2) div(T_B v_B) |v_B|^2
};

class Ledger {
 public:
  /// Appends a sample; times must strictly increase and every entry must be
  /// finite (NumericalAbortError otherwise).
  void append(const LedgerRow& row);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Row at the latest sample time <= t (ConfigError when empty or t
  /// precedes the first sample).
  const LedgerRow& at_or_before(double t) const;

 private:
  std::vector<LedgerRow> rows_;
};

/// Relative drift of the total mass M_A + M_B + rho_0 |Gamma| between the
/// ledger samples nearest t1 and t2, normalized by the total at t1.
double check_mass_law(const Ledger& ledger, double t1, double t2);

/// Residual of the energy balance between t1 and t2:
///   [KE(t2) - KE(t1)] + int dissipation dt
///     - int (work_B + work_surf + src_A + src_B) dt
/// with time integrals by trapezoid over the ledger samples, normalized by
/// the peak kinetic energy over the window (or 1 when the window is
/// quiescent). mu_zero selects the inviscid form: the dissipation entries
/// are required to be identically zero and are dropped.
double check_energy_law(const Ledger& ledger, double t1, double t2,
                        bool mu_zero);

class Simulator1D {
 public:
  explicit Simulator1D(const SimulatorConfig& cfg);

  /// One SSP-RK2 step. Fixed dt must respect the stable bound: the acoustic
  /// CFL limit (cfl * min width / max wave speed, wave speed
  /// |v| + sqrt(gamma pi/rho)) and, for viscous runs, the explicit diffusion
  /// limit cfl * h^2 rho / (2 (mu_B + lambda_B)). Adaptive stepping uses the
  /// same bound. Throws NumericalAbortError when a fixed dt exceeds it or on
  /// non-positive/non-finite density (with cell and time).
  void step();

  /// Steps until time() >= t_target, appending one ledger row per step.
  void advance(double t_target);

  double time() const { return t_; }
  double last_dt() const { return last_dt_; }
  long step_count() const { return step_count_; }

  /// Largest dt the current state admits (acoustic CFL plus, for viscous
  /// runs, the explicit diffusion limit). Adaptive stepping uses this.
  double suggested_dt() const { return stable_dt(state_); }

  const Ledger& ledger() const { return ledger_; }
  const SimulatorConfig& config() const { return cfg_; }

  PhaseState phase_a() const;
  PhaseState phase_b() const;
  std::vector<InterfaceState> interfaces() const;

  /// Residual of the interface stress balance recomputed from the current
  /// state: pi_0 H + Ttilde_A - Ttilde_B at each interface (the inviscid
  /// closure reduces it to pi_0 H - pi_A + pi_B). Near round-off by
  /// construction; exposed so runs can assert it.
  double interface_balance_residual() const;

 private:
  struct State {
    double s1 = 0.0, s2 = 0.0;  // planar interface positions
    double vel_a = 0.0;
    double rho_a = 0.0;
    // Phase-B storage, one vector per B subdomain (planar: 2, spherical: 1).
    // Conservative mode: cell totals (volume * density, volume * momentum);
    // primitive mode: point values (density, velocity).
    std::vector<std::vector<double>> b_rho;
    std::vector<std::vector<double>> b_mom;
  };

  State derivative(const State& s, double t) const;
  State axpy(const State& a, double c, const State& b) const;
  void do_step(double dt);
  void check_positivity(const State& s, double t) const;
  double hyperbolic_dt(const State& s) const;
  double stable_dt(const State& s) const;
  LedgerRow measure(const State& s, double t) const;

  // Geometry of B subdomain d in state s: edge positions.
  std::vector<double> b_edges(const State& s, int d) const;
  // Face pressures P (pi_B minus the viscous normal stress) at the
  // interface-adjacent faces, and the slug pressure slope.
  void interface_pressures(const State& s, double& p_left,
                           double& p_right) const;
  double pi_a_at(const State& s, double x) const;

  SimulatorConfig cfg_;
  double coupling_ = 0.0;  // rho_0 / pi_0, zero for the classical kernel
  State state_;
  double t_ = 0.0;
  double last_dt_ = 0.0;
  long step_count_ = 0;
  Ledger ledger_;
};

/// Runs the configured scenario twice, once as configured with rho_0 forced
/// to zero and once through the independent classical kernel, advancing both
/// with the same fixed dt, and returns the maximum over steps and cells of
/// the state difference (density, velocity, and slug variables).
struct ClassicalComparison {
  double max_difference = 0.0;
  int steps = 0;
};
ClassicalComparison compare_with_classical(SimulatorConfig cfg, int steps);

}  // namespace mfpt
