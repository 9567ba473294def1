#pragma once

#include "mfpt/material.hpp"

namespace mfpt::radial {

// Closed-form reductions of the bulk differential operators to spherically
// symmetric states v = u(r) e_r with scalar pressure pi(r). The spherical
// simulator builds its pointwise closures from these; unit tests pin every
// formula against the full 3D Cartesian evaluation of the tensors module.

/// div v = u' + 2u/r.
inline double divergence(double u, double dudr, double r) {
  return dudr + 2.0 * u / r;
}

/// |D(v)|^2 for D(v) = diag(u', u/r, u/r) in the spherical frame.
inline double strain_norm_sq(double u, double dudr, double r) {
  return dudr * dudr + 2.0 * (u / r) * (u / r);
}

/// Radial normal stress T_rr: mu u' + lambda div v - pi (viscous), -pi
/// (inviscid).
inline double stress_rr(Model model, const MaterialParams& mat, double u,
                        double dudr, double r, double pi) {
  if (model == Model::Inviscid) return -pi;
  return mat.mu_B * dudr + mat.lambda_B * divergence(u, dudr, r) - pi;
}

/// Sum of the angular normal stresses T_theta,theta + T_phi,phi:
/// 2 (mu u/r + lambda div v - pi) (viscous), -2 pi (inviscid).
inline double stress_perp(Model model, const MaterialParams& mat, double u,
                          double dudr, double r, double pi) {
  if (model == Model::Inviscid) return -2.0 * pi;
  return 2.0 *
         (mat.mu_B * u / r + mat.lambda_B * divergence(u, dudr, r) - pi);
}

/// Radial component of div T for the diagonal radial stress:
/// (r^2 T_rr)'/r^2 - (T_theta,theta + T_phi,phi)/r.
inline double stress_divergence_r(double trr, double dtrr_dr, double t_perp,
                                  double r) {
  return dtrr_dr + (2.0 * trr - t_perp) / r;
}

/// div(T v) = (r^2 T_rr u)'/r^2 = T_rr' u + T_rr (u' + 2u/r).
inline double stress_power_divergence(double trr, double dtrr_dr, double u,
                                      double dudr, double r) {
  return dtrr_dr * u + trr * divergence(u, dudr, r);
}

/// Viscous entropy production density T:grad v + pi div v
/// = mu |D(v)|^2 + lambda (div v)^2.
inline double dissipation_density(const MaterialParams& mat, double u,
                                  double dudr, double r) {
  const double delta = divergence(u, dudr, r);
  return mat.mu_B * strain_norm_sq(u, dudr, r) +
         mat.lambda_B * delta * delta;
}

}  // namespace mfpt::radial
