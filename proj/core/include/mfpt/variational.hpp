#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"
#include "mfpt/quadrature.hpp"
#include "mfpt/surface.hpp"
#include "mfpt/tensor_ops.hpp"

namespace mfpt {

/// Sphere-in-shell two-phase geometry: phase A fills the ball
/// |x - center| < radius, phase B the shell radius < |x - center| <
/// outer_radius, the interface is the shared sphere and the outer sphere is
/// the fixed container wall.
struct SphereGeometry {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  double outer_radius = 2.0;

  /// Mean curvature of the interface sphere under the project-wide
  /// orientation convention (outward normal, -2/R on a sphere).
  double mean_curvature() const {
    return kCurvatureOrientation * 2.0 / radius;
  }
  void validate() const;
};

struct VariationalQuadrature {
  int radial = 16;
  int theta = 16;
  int phi = 32;
};

/// The two energy functionals whose constrained first variation produces the
/// phase forces, plus their sum:
///
///   Work        =  int_B (div v_B) pi_B  +  pi_0 int_Gamma div_S v_S
///   Dissipation = -1/2 int_A mu_A |D(v_A)|^2
///                 - int_B { mu_B/2 |D(v_B)|^2 + lambda_B/2 (div v_B)^2 }
///   Total       =  Dissipation + Work
enum class EnergyKind { Work, Dissipation, Total };

/// Velocity/pressure snapshot the functionals are evaluated on. pressure_a
/// only enters the closed-form forces (as the incompressible-phase
/// multiplier), pressure_b enters the Work functional.
struct VariationalState {
  VectorField vel_a = VectorField::zero();
  VectorField vel_b = VectorField::zero();
  VectorField vel_s = VectorField::zero();
  ScalarField pressure_a = ScalarField::constant(0.0);
  ScalarField pressure_b = ScalarField::constant(0.0);
};

double energy_eval(EnergyKind kind, const VariationalState& state,
                   const MaterialParams& mat, const SphereGeometry& geom,
                   double t, const VariationalQuadrature& quad = {});

/// Constraint set the perturbation triple satisfies. Both require
/// div phi_A = 0 in the A phase and the kinematic matching
/// phi_A.n = phi_S.n = phi_B.n on the interface. The viscous set adds
/// phi_B = 0 on the outer wall and vanishing tangential traces
/// P phi_A = P phi_B = 0 on the interface; the inviscid set only requires
/// phi_B . n = 0 on the outer wall and leaves the tangential parts free.
enum class ConstraintSet { Viscous, Inviscid };

struct AdmissiblePerturbation {
  ConstraintSet constraint_set = ConstraintSet::Viscous;
  VectorField phi_a = VectorField::zero();
  VectorField phi_b = VectorField::zero();
  VectorField phi_s = VectorField::zero();
  std::string label;  // human-readable generator description
};

/// Checks every constraint line at `probes` deterministic points; throws
/// RestrictionError naming the violated line.
void verify_admissible(const AdmissiblePerturbation& pert,
                       const SphereGeometry& geom, int probes = 200,
                       double tol = 1e-8);

/// Draws a random admissible perturbation. phi_A is a divergence-free
/// polynomial built from a solid harmonic: the poloidal field
/// curl curl( P_l(x) (1 + a|x|^2) x ) with a chosen so the tangential trace
/// vanishes on the interface sphere (plus, for the inviscid set, a toroidal
/// part curl(Q x), which is tangent to every sphere). phi_S reuses phi_A —
/// only its interface trace matters, and only through the normal component.
/// phi_B extends the normal trace into the shell under a cubic Hermite
/// radial window that shuts it off at the outer wall. The result is probed
/// by verify_admissible before being returned.
AdmissiblePerturbation make_admissible(std::uint64_t seed, ConstraintSet set,
                                       const SphereGeometry& geom);

/// Centered-difference first variation of an energy functional in the
/// direction of a perturbation, over a schedule of step sizes.
///
/// Both functionals are polynomial (degree <= 2) in the state, so the
/// centered difference is exact in eps up to round-off; eps_independent
/// records that all steps agreed to ~1e-10 relative. Otherwise the observed
/// order of the eps -> 0 convergence is estimated, the value is Richardson
/// extrapolated, and orders below 1.5 are flagged suspicious.
struct GateauxResult {
  double value = 0.0;
  double observed_order = 0.0;
  bool eps_independent = false;
  bool suspicious = false;
  std::vector<double> per_eps;
};

GateauxResult gateaux_derivative(EnergyKind kind, const VariationalState& state,
                                 const AdmissiblePerturbation& pert,
                                 const MaterialParams& mat,
                                 const SphereGeometry& geom, double t,
                                 const std::vector<double>& eps_list =
                                     {1e-2, 1e-3, 1e-4},
                                 const VariationalQuadrature& quad = {});

/// The closed-form force triple the first variation must reproduce:
/// bulk forces div T on each phase (which the inviscid stress closure turns
/// into -grad pi), and the interface force (-pi_0 H - Ttilde_A + Ttilde_B) n.
struct ForceTriple {
  VectorField bulk_a;
  VectorField bulk_b;
  std::function<Vec3(const Vec3& x, const Vec3& n, double t)> interface;
};

ForceTriple closed_form_forces(Model model, const VariationalState& state,
                               const MaterialParams& mat,
                               const SphereGeometry& geom);

/// | d/d eps E[v + eps phi] - ( int_A F_A.phi_A + int_B F_B.phi_B
///   + int_Gamma F_S.phi_S ) |, the numerical content of the variational
/// force lemmas. The functional is Total for the viscous model and Work for
/// the inviscid one (which has no dissipation).
struct VariationalCheck {
  double derivative = 0.0;
  double force_inner_product = 0.0;
  double residual = 0.0;
  double relative_residual = 0.0;
  GateauxResult gateaux;
};

VariationalCheck variational_identity_residual(
    Model model, const VariationalState& state, const MaterialParams& mat,
    const SphereGeometry& geom, const AdmissiblePerturbation& pert, double t,
    const std::vector<double>& eps_list = {1e-2, 1e-3, 1e-4},
    const VariationalQuadrature& quad = {});

}  // namespace mfpt
