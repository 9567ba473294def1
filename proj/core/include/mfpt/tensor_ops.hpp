#pragma once

#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"

namespace mfpt {

enum class Phase { A, B };

/// Analytic bulk fields of one phase: density, velocity, pressure. Phase B
/// pressure may be supplied independently of the EOS (the residual operators
/// evaluate whatever closure the caller manufactured).
struct PhaseFields {
  ScalarField rho;
  VectorField vel;
  ScalarField pressure;
};

/// Symmetric rate-of-strain D(v) = (grad v + grad v^T) / 2.
Mat3 rate_of_strain(const Mat3& grad_v);
Mat3 rate_of_strain(const VectorField& v, const Vec3& x, double t);

/// Bulk stress tensor of a phase:
///   inviscid:      T = -pi I
///   viscous, A:    T = mu_A D(v) - pi I
///   viscous, B:    T = mu_B D(v) + lambda_B (div v) I - pi I
Mat3 stress_bulk(Model model, Phase phase, const MaterialParams& mat,
                 const VectorField& v, const ScalarField& pi, const Vec3& x,
                 double t);

/// Scalar interface stress of a phase trace:
///   inviscid:      T~ = -pi
///   viscous, A:    T~ = mu_A n.((n.grad) v) - pi
///   viscous, B:    T~ = mu_B n.((n.grad) v) + lambda_B div v - pi
/// n must be unit length (tol 1e-8).
double stress_interface(Model model, Phase phase, const MaterialParams& mat,
                        const VectorField& v, const ScalarField& pi,
                        const Vec3& x, const Vec3& n, double t);

/// div T (row/column divergence of the symmetric bulk stress).
Vec3 stress_divergence(Model model, Phase phase, const MaterialParams& mat,
                       const VectorField& v, const ScalarField& pi,
                       const Vec3& x, double t);

/// div(T v), the stress power divergence appearing in every
/// phase-transition source.
double stress_power_divergence(Model model, Phase phase,
                               const MaterialParams& mat, const VectorField& v,
                               const ScalarField& pi, const Vec3& x, double t);

/// Phase-transition mass source of a phase:
///   inviscid:  Psi = +(rho_0/pi_0) div(pi v)
///   viscous:   Phi = -(rho_0/pi_0) div(T v)
/// Identically zero when rho_0 = 0 or v = 0.
double transition_source(Model model, Phase phase, const MaterialParams& mat,
                         const VectorField& v, const ScalarField& pi,
                         const Vec3& x, double t);

/// Pointwise residual of the mass equation of one phase,
///   A: D_t rho - source,   B: D_t rho + (div v) rho - source,
/// with the model's transition source on the right-hand side.
double residual_mass(Model model, Phase phase, const MaterialParams& mat,
                     const PhaseFields& f, const Vec3& x, double t);

/// Pointwise residual of the momentum equation of one phase:
///   inviscid: rho D_t v + grad pi + (rho_0/pi_0) div(pi v) v
///   viscous:  rho D_t v - div T - (rho_0/pi_0) div(T v) v
Vec3 residual_momentum(Model model, Phase phase, const MaterialParams& mat,
                       const PhaseFields& f, const Vec3& x, double t);

/// Pointwise residuals of the conservative (divergence) form:
///   mass:      d_t rho + div(rho v + (rho_0/pi_0) T v)
///   momentum:  d_t(rho v) + div(rho v x v - T)
/// For phase B these agree with the system residuals identically; for phase A
/// they agree when div v_A = 0 (mass) and additionally the phase-A mass
/// equation holds (momentum).
double conservative_residual_mass(Model model, Phase phase,
                                  const MaterialParams& mat,
                                  const PhaseFields& f, const Vec3& x, double t);
Vec3 conservative_residual_momentum(Model model, Phase phase,
                                    const MaterialParams& mat,
                                    const PhaseFields& f, const Vec3& x,
                                    double t);

/// Scalar residual of the interface stress balance along the normal:
///   inviscid: pi_0 H - pi_A + pi_B
///   viscous:  pi_0 H + T~_A - T~_B
double residual_interface(Model model, const MaterialParams& mat,
                          const PhaseFields& A, const PhaseFields& B,
                          const Vec3& x, const Vec3& n, double H, double t);

/// Interface velocity from the normal stress balance:
///   inviscid: v_S = { pi_A (v_A.n) - pi_B (v_B.n) } / (pi_0 H) n
///   viscous:  v_S = { -T~_A (v_A.n) + T~_B (v_B.n) } / (pi_0 H) n
/// Throws FlatInterfaceError when |H| <= 1e-10 (use the kinematic condition
/// there instead).
Vec3 interface_velocity(Model model, const MaterialParams& mat,
                        const PhaseFields& A, const PhaseFields& B,
                        const Vec3& x, const Vec3& n, double H, double t);

}  // namespace mfpt
