#pragma once

#include <functional>
#include <optional>

#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"
#include "mfpt/quadrature.hpp"
#include "mfpt/tensor_ops.hpp"

namespace mfpt {

/// Scalar function of time carrying its exact derivative, used for moving
/// boundaries (interval endpoints, sphere radii).
struct TimeFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  static TimeFunction constant(double c);
  /// a + b*t
  static TimeFunction linear(double a, double b);
  /// a + b*sin(w*t)
  static TimeFunction sinusoid(double a, double b, double w);
};

/// Quadrature resolution for the moving-domain integrals.
struct TransportQuadrature {
  int radial = 16;
  int theta = 16;
  int phi = 32;
  int line = 32;
};

/// Two-sided breakdown of a transport identity: the finite-difference time
/// derivative of the integral, the instantaneous (integrand) side, and their
/// absolute difference.
struct TransportResidual {
  double time_derivative = 0.0;
  double instantaneous = 0.0;
  double residual = 0.0;
};

/// A bulk region transported by a prescribed velocity field. Three shapes:
///
///  - interval [a(t), b(t)] on the x axis; fields are sampled at (x, 0, 0)
///    and only the x component / x derivative of the velocity are used,
///  - ball |x - center| <= R(t),
///  - spherical shell R(t) <= |x - center| <= r_outer with a fixed outer
///    wall.
///
/// The velocity field must move the boundary: d/dt of each boundary radius /
/// endpoint has to match the normal velocity there (checked by
/// validate_boundary_motion and, at the evaluation time, by the residual
/// routines).
class MovingDomain {
 public:
  enum class Shape { Interval, Ball, SphericalShell };

  static MovingDomain interval(TimeFunction a, TimeFunction b,
                               VectorField velocity);
  static MovingDomain ball(TimeFunction radius, VectorField velocity,
                           const Vec3& center = Vec3::Zero());
  static MovingDomain spherical_shell(TimeFunction inner_radius,
                                      double outer_radius,
                                      VectorField velocity,
                                      const Vec3& center = Vec3::Zero());

  Shape shape() const { return shape_; }
  const VectorField& velocity() const { return velocity_; }
  const Vec3& center() const { return center_; }

  /// Integral of f over the region at time t, optionally restricted to a
  /// half-space. Cuts are supported for intervals and balls; a cut plane
  /// must not cross the moving boundary data used by the transport identity
  /// checks (see bulk_transport_residual).
  double integrate(const ScalarField& f, double t,
                   const std::optional<HalfSpaceCut>& cut = {},
                   const TransportQuadrature& quad = {}) const;

  /// Region volume (or interval length) at time t.
  double measure(double t) const;

  /// Samples the boundary at `samples` equispaced times in [t0, t1] and
  /// checks that the prescribed boundary rate matches the normal velocity
  /// of the field to tolerance `tol`. Throws RestrictionError otherwise.
  void validate_boundary_motion(double t0, double t1, int samples = 20,
                                double tol = 1e-8) const;

 private:
  MovingDomain() = default;

  void check_motion_at(double t, double tol) const;
  double integrate_callable(const std::function<double(const Vec3&)>& g,
                            double t, const std::optional<HalfSpaceCut>& cut,
                            const TransportQuadrature& quad) const;
  friend TransportResidual bulk_transport_residual(
      const MovingDomain&, const ScalarField&, double, double,
      const std::optional<HalfSpaceCut>&, const TransportQuadrature&);

  Shape shape_ = Shape::Ball;
  TimeFunction lo_;           // interval left endpoint / inner or ball radius
  TimeFunction hi_;           // interval right endpoint
  double outer_radius_ = 0.0; // shell outer wall
  Vec3 center_ = Vec3::Zero();
  VectorField velocity_ = VectorField::zero();
};

/// A sphere |x - center| = R(t) transported by a velocity field v_S whose
/// normal component realizes the radial motion.
class MovingSurface {
 public:
  MovingSurface(TimeFunction radius, VectorField velocity,
                const Vec3& center = Vec3::Zero());

  const VectorField& velocity() const { return velocity_; }
  double radius(double t) const { return radius_.value(t); }

  /// Surface integral of f at time t, optionally restricted to the cap
  /// x[axis] <= bound.
  double integrate(const ScalarField& f, double t,
                   const std::optional<HalfSpaceCut>& cut = {},
                   const TransportQuadrature& quad = {}) const;

  /// Surface area at time t (of the full sphere).
  double area(double t) const;

  void validate_boundary_motion(double t0, double t1, int samples = 20,
                                double tol = 1e-8) const;

 private:
  void check_motion_at(double t, double tol) const;
  double integrate_callable(
      const std::function<double(const Vec3&, const Vec3&)>& g, double t,
      const std::optional<HalfSpaceCut>& cut,
      const TransportQuadrature& quad) const;
  friend TransportResidual surface_transport_residual(
      const MovingSurface&, const ScalarField&, double, double,
      const std::optional<HalfSpaceCut>&, const TransportQuadrature&);

  TimeFunction radius_;
  Vec3 center_ = Vec3::Zero();
  VectorField velocity_ = VectorField::zero();
};

/// Residual of the bulk transport identity
///
///   d/dt int_D f  =  int_D { d_t f + (v . grad) f + (div v) f }
///
/// with the left side approximated by a centered difference at step dt.
/// With a half-space cut the identity only holds when the cut plane is
/// flux-free (v . plane-normal = 0 on the cut disk, e.g. radial fields cut
/// through the center); this is probed and a RestrictionError is thrown when
/// it fails, rather than returning a silently meaningless number.
TransportResidual bulk_transport_residual(
    const MovingDomain& domain, const ScalarField& f, double t, double dt,
    const std::optional<HalfSpaceCut>& cut = {},
    const TransportQuadrature& quad = {});

/// Residual of the surface transport identity
///
///   d/dt int_S f  =  int_S { d_t f + (v_S . grad) f + (div_S v_S) f }
///
/// on the moving sphere, with the same centered differencing. Cap cuts are
/// checked to be flux-free along the cap boundary circle.
TransportResidual surface_transport_residual(
    const MovingSurface& surface, const ScalarField& f, double t, double dt,
    const std::optional<HalfSpaceCut>& cut = {},
    const TransportQuadrature& quad = {});

/// Full two-phase mass bookkeeping over the sphere-in-shell geometry:
/// phase A fills the ball |x - c| < R(t), phase B the shell R(t) < |x - c| <
/// r_outer, and the interface is the shared sphere. The check assembles
///
///   int_A D_t rho_A  +  int_B { D_t rho_B + (div v_B) rho_B }
///   + rho_0 int_Gamma div_S v_S
///
/// which vanishes for states satisfying the phase-transition mass balance,
/// the boundary restrictions, and the interface velocity relation. The
/// restrictions themselves (divergence-free A phase, outer wall condition,
/// kinematic matching at the interface, and for the viscous model the no-slip
/// tangential conditions) are probed first; a violation throws
/// RestrictionError naming the failed condition.
struct MassIdentitySetup {
  Model model = Model::Inviscid;
  MaterialParams material;
  PhaseFields phase_a;
  PhaseFields phase_b;
  VectorField interface_velocity = VectorField::zero();
  TimeFunction radius;
  double outer_radius = 2.0;
  Vec3 center = Vec3::Zero();
};

struct MassIdentityBreakdown {
  double bulk_a = 0.0;       // int_A D_t rho_A
  double bulk_b = 0.0;       // int_B D_t rho_B + (div v_B) rho_B
  double interface = 0.0;    // rho_0 int_Gamma div_S v_S
  double residual = 0.0;     // |sum|
};

MassIdentityBreakdown mass_identity_check(const MassIdentitySetup& setup,
                                          double t,
                                          const TransportQuadrature& quad = {},
                                          double restriction_tol = 1e-8);

}  // namespace mfpt
