#pragma once

#include <cmath>

#include "mfpt/errors.hpp"

namespace mfpt {

/// Which flow model the operators evaluate: the inviscid system closes the
/// bulk stresses with pressures only, the viscous system adds Newtonian
/// stress in phase A and compressible Newtonian stress in phase B.
enum class Model { Inviscid, Viscous };

/// Material and interface parameters shared by all modules.
///
/// Phase A is the incompressible phase enclosed by the interface, phase B the
/// compressible phase outside of it. `rho_0` is the (constant) interface mass
/// density and `pi_0` the (constant, positive) interface pressure; their
/// ratio scales every phase-transition source term, and `rho_0 = 0` switches
/// the equations back to the classical two-phase Euler/Navier-Stokes system.
/// Phase B pressure is closed barotropically as pi_B = K * rho_B^gamma.
struct MaterialParams {
  double mu_A = 0.0;      // phase A shear viscosity
  double mu_B = 0.0;      // phase B shear viscosity
  double lambda_B = 0.0;  // phase B dilatational viscosity
  double rho_0 = 1.0;     // interface mass density (>= 0)
  double pi_0 = 1.0;      // interface pressure (> 0)
  double K = 1.0;         // EOS coefficient (> 0)
  double gamma = 1.4;     // EOS exponent (> 1)

  /// rho_0 / pi_0, the factor in front of every phase-transition source.
  double coupling() const { return rho_0 / pi_0; }

  double eos_pressure(double rho_B) const { return K * std::pow(rho_B, gamma); }
  double eos_dp_drho(double rho_B) const {
    return K * gamma * std::pow(rho_B, gamma - 1.0);
  }
  double eos_sound_speed(double rho_B) const {
    return std::sqrt(eos_dp_drho(rho_B));
  }

  void validate(Model model) const {
    if (!(pi_0 > 0.0)) throw ConfigError("material: pi_0 must be > 0");
    if (rho_0 < 0.0) throw ConfigError("material: rho_0 must be >= 0");
    if (!(K > 0.0)) throw ConfigError("material: K must be > 0");
    if (!(gamma > 1.0)) throw ConfigError("material: gamma must be > 1");
    if (model == Model::Viscous) {
      if (mu_A < 0.0 || mu_B < 0.0 || lambda_B < 0.0)
        throw ConfigError("material: viscosities must be >= 0");
    }
  }
};

}  // namespace mfpt
