#include "mfpt/tensor_ops.hpp"

#include <cmath>

namespace mfpt {

namespace {

double check_unit(const Vec3& n, const char* who) {
  const double len = n.norm();
  if (std::abs(len - 1.0) > 1e-8)
    throw GeometryError(std::string(who) + ": normal is not unit length");
  return len;
}

double mu_of(Phase phase, const MaterialParams& mat) {
  return phase == Phase::A ? mat.mu_A : mat.mu_B;
}

}  // namespace

Mat3 rate_of_strain(const Mat3& grad_v) {
  return 0.5 * (grad_v + grad_v.transpose());
}

Mat3 rate_of_strain(const VectorField& v, const Vec3& x, double t) {
  return rate_of_strain(v.jacobian(x, t));
}

Mat3 stress_bulk(Model model, Phase phase, const MaterialParams& mat,
                 const VectorField& v, const ScalarField& pi, const Vec3& x,
                 double t) {
  const double p = pi.value(x, t);
  if (model == Model::Inviscid) return (-p * Mat3::Identity()).eval();
  const Mat3 jac = v.jacobian(x, t);
  Mat3 T = mu_of(phase, mat) * rate_of_strain(jac);
  if (phase == Phase::B) T += mat.lambda_B * jac.trace() * Mat3::Identity();
  T -= p * Mat3::Identity();
  return T;
}

double stress_interface(Model model, Phase phase, const MaterialParams& mat,
                        const VectorField& v, const ScalarField& pi,
                        const Vec3& x, const Vec3& n, double t) {
  check_unit(n, "stress_interface");
  const double p = pi.value(x, t);
  if (model == Model::Inviscid) return -p;
  const Mat3 jac = v.jacobian(x, t);
  double s = mu_of(phase, mat) * n.dot(jac * n);  // mu n.((n.grad) v)
  if (phase == Phase::B) s += mat.lambda_B * jac.trace();
  return s - p;
}

Vec3 stress_divergence(Model model, Phase phase, const MaterialParams& mat,
                       const VectorField& v, const ScalarField& pi,
                       const Vec3& x, double t) {
  Vec3 d = -pi.grad(x, t);
  if (model == Model::Viscous) {
    // div(mu D(v)) = mu (lap v + grad div v) / 2 for constant mu.
    d += 0.5 * mu_of(phase, mat) *
         (v.laplacian(x, t) + v.grad_divergence(x, t));
    if (phase == Phase::B) d += mat.lambda_B * v.grad_divergence(x, t);
  }
  return d;
}

double stress_power_divergence(Model model, Phase phase,
                               const MaterialParams& mat, const VectorField& v,
                               const ScalarField& pi, const Vec3& x, double t) {
  // div(T v) = (div T) . v + T : grad v.
  const Vec3 val = v.value(x, t);
  const Mat3 jac = v.jacobian(x, t);
  const Mat3 T = stress_bulk(model, phase, mat, v, pi, x, t);
  const Vec3 divT = stress_divergence(model, phase, mat, v, pi, x, t);
  return divT.dot(val) + (T * jac).trace();
}

double transition_source(Model model, Phase phase, const MaterialParams& mat,
                         const VectorField& v, const ScalarField& pi,
                         const Vec3& x, double t) {
  const double c = mat.coupling();
  if (c == 0.0) return 0.0;
  if (model == Model::Inviscid) {
    // Psi = + c div(pi v) = c (grad pi . v + pi div v)
    return c * (pi.grad(x, t).dot(v.value(x, t)) +
                pi.value(x, t) * v.divergence(x, t));
  }
  return -c * stress_power_divergence(model, phase, mat, v, pi, x, t);
}

double residual_mass(Model model, Phase phase, const MaterialParams& mat,
                     const PhaseFields& f, const Vec3& x, double t) {
  const Vec3 vel = f.vel.value(x, t);
  double lhs = f.rho.dt(x, t) + f.rho.grad(x, t).dot(vel);
  if (phase == Phase::B) lhs += f.vel.divergence(x, t) * f.rho.value(x, t);
  return lhs - transition_source(model, phase, mat, f.vel, f.pressure, x, t);
}

Vec3 residual_momentum(Model model, Phase phase, const MaterialParams& mat,
                       const PhaseFields& f, const Vec3& x, double t) {
  const Vec3 vel = f.vel.value(x, t);
  const Mat3 jac = f.vel.jacobian(x, t);
  const double rho = f.rho.value(x, t);
  const Vec3 material_accel = f.vel.dt(x, t) + jac * vel;
  const double c = mat.coupling();
  if (model == Model::Inviscid) {
    const double div_piv = f.pressure.grad(x, t).dot(vel) +
                           f.pressure.value(x, t) * jac.trace();
    return rho * material_accel + f.pressure.grad(x, t) + c * div_piv * vel;
  }
  const Vec3 divT =
      stress_divergence(model, phase, mat, f.vel, f.pressure, x, t);
  const double divTv =
      stress_power_divergence(model, phase, mat, f.vel, f.pressure, x, t);
  return rho * material_accel - divT - c * divTv * vel;
}

double conservative_residual_mass(Model model, Phase phase,
                                  const MaterialParams& mat,
                                  const PhaseFields& f, const Vec3& x,
                                  double t) {
  const Vec3 vel = f.vel.value(x, t);
  const double div_v = f.vel.divergence(x, t);
  if (phase == Phase::A && std::abs(div_v) > 1e-8)
    throw RestrictionError(
        "conservative_residual_mass: phase A velocity must be solenoidal at "
        "the probe");
  const double div_rhov = f.rho.grad(x, t).dot(vel) + f.rho.value(x, t) * div_v;
  // (rho_0/pi_0) div(T v); for the inviscid closure T = -pi I.
  const double tv = (model == Model::Inviscid)
                        ? -(f.pressure.grad(x, t).dot(vel) +
                            f.pressure.value(x, t) * div_v)
                        : stress_power_divergence(model, phase, mat, f.vel,
                                                  f.pressure, x, t);
  return f.rho.dt(x, t) + div_rhov + mat.coupling() * tv;
}

Vec3 conservative_residual_momentum(Model model, Phase phase,
                                    const MaterialParams& mat,
                                    const PhaseFields& f, const Vec3& x,
                                    double t) {
  const Vec3 vel = f.vel.value(x, t);
  const Mat3 jac = f.vel.jacobian(x, t);
  if (phase == Phase::A && std::abs(jac.trace()) > 1e-8)
    throw RestrictionError(
        "conservative_residual_momentum: phase A velocity must be solenoidal "
        "at the probe");
  const double rho = f.rho.value(x, t);
  const double div_rhov = f.rho.grad(x, t).dot(vel) + rho * jac.trace();
  // d_t(rho v) + div(rho v x v) expands to
  //   d_t rho v + rho d_t v + div(rho v) v + rho (v.grad) v.
  const Vec3 divT =
      stress_divergence(model, phase, mat, f.vel, f.pressure, x, t);
  return f.rho.dt(x, t) * vel + rho * f.vel.dt(x, t) + div_rhov * vel +
         rho * (jac * vel) - divT;
}

double residual_interface(Model model, const MaterialParams& mat,
                          const PhaseFields& A, const PhaseFields& B,
                          const Vec3& x, const Vec3& n, double H, double t) {
  check_unit(n, "residual_interface");
  const double sA =
      stress_interface(model, Phase::A, mat, A.vel, A.pressure, x, n, t);
  const double sB =
      stress_interface(model, Phase::B, mat, B.vel, B.pressure, x, n, t);
  // Both models reduce to pi_0 H + T~_A - T~_B; with the inviscid closure
  // T~ = -pi this is pi_0 H - pi_A + pi_B.
  return mat.pi_0 * H + sA - sB;
}

Vec3 interface_velocity(Model model, const MaterialParams& mat,
                        const PhaseFields& A, const PhaseFields& B,
                        const Vec3& x, const Vec3& n, double H, double t) {
  check_unit(n, "interface_velocity");
  if (std::abs(H) <= 1e-10)
    throw FlatInterfaceError(
        "interface_velocity: |H| <= 1e-10 (flat interface); the normal "
        "balance cannot be inverted, use the kinematic condition");
  const double van = A.vel.value(x, t).dot(n);
  const double vbn = B.vel.value(x, t).dot(n);
  double num;
  if (model == Model::Inviscid) {
    num = A.pressure.value(x, t) * van - B.pressure.value(x, t) * vbn;
  } else {
    const double sA =
        stress_interface(model, Phase::A, mat, A.vel, A.pressure, x, n, t);
    const double sB =
        stress_interface(model, Phase::B, mat, B.vel, B.pressure, x, n, t);
    num = -sA * van + sB * vbn;
  }
  return (num / (mat.pi_0 * H)) * n;
}

}  // namespace mfpt
