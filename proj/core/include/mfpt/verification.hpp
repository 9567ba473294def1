#pragma once

#include <cstdint>

#include "mfpt/report.hpp"
#include "mfpt/scenario.hpp"

namespace mfpt {

/// Options shared by the built-in verification suites. Every tolerance is
/// looked up in `checks` by name (documented defaults apply when absent) and
/// residual-type tolerances are multiplied by tol_scale; convergence-order
/// floors and refinement ratios are never scaled.
struct SuiteOptions {
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  bool deterministic = false;
};

/// Tangential calculus: the unit-sphere integral of div_Gamma(x) against its
/// closed form 8*pi, and the convergence order of the closed-surface
/// divergence-theorem residual on refined triangulated ellipsoids.
/// Tolerances: divergence_theorem (1e-8), surface_order_floor (1.0).
Report suite_surface(const ScenarioChecks& checks, const SuiteOptions& opt);

/// Moving-domain transport identities: centered-difference residual order on
/// a growing ball and a growing sphere over step halvings.
/// Tolerance: transport_order_window (0.3, as |order - 2|).
Report suite_transport(const ScenarioChecks& checks, const SuiteOptions& opt);

/// Energy variation: Gateaux derivative against the closed-form force inner
/// product for seeded random states and admissible perturbations of both
/// constraint sets, plus pressure-potential recovery (gradient input) and
/// rejection (pure-curl input).
/// Tolerances: variational_inviscid (1e-5), variational_viscous (1e-4),
/// helmholtz_gradient (1e-3).
Report suite_variational(const ScenarioChecks& checks, const SuiteOptions& opt);

/// Manufactured states: pointwise equivalence of the system and conservative
/// residual forms at seeded probes, exactness of the manufactured mass
/// solutions, and the classical (rho_0 = 0) reduction.
/// Tolerances: equivalence (1e-8), manufactured_residual (1e-9).
Report suite_mms(const ScenarioChecks& checks, const SuiteOptions& opt);

/// Simulator conservation: planar equilibrium fixed point, spherical mass
/// law (conservative long run and primitive convergence under coupled
/// dt/grid refinement), viscous energy balance with dt refinement, the
/// inviscid energy form, and classical-kernel agreement at rho_0 = 0.
/// Tolerances: mass_law (1e-8), primitive_order_floor (1.0), energy_law
/// (1e-5), energy_refinement_ratio (1.0), energy_law_inviscid (5e-3),
/// classical_difference (1e-10), plus the equilibrium preset's own checks.
Report suite_simulator(const ScenarioChecks& checks, const SuiteOptions& opt);

}  // namespace mfpt
