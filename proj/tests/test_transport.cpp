#include <doctest/doctest.h>

#include <cmath>
#include <cstdio>
#include <optional>

#include "mfpt/errors.hpp"
#include "mfpt/fields.hpp"
#include "mfpt/quadrature.hpp"
#include "mfpt/report.hpp"
#include "mfpt/transport.hpp"

using namespace mfpt;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Sinusoidally breathing radius R(t) = 1 + 0.2 sin(0.9 t), together with the
// linear velocity v = (Rdot/R) x that realizes it. The sinusoid keeps every
// transported integral genuinely non-polynomial in t, so the centered
// difference carries a real O(dt^2) error instead of being exact by accident.
double breathing_radius(double t) { return 1.0 + 0.2 * std::sin(0.9 * t); }
double breathing_rate(double t) { return 0.18 * std::cos(0.9 * t); }
double breathing_accel(double t) { return -0.162 * std::sin(0.9 * t); }

VectorField breathing_velocity() {
  auto g = [](double t) { return breathing_rate(t) / breathing_radius(t); };
  auto gp = [](double t) {
    const double r = breathing_radius(t), rd = breathing_rate(t);
    return (breathing_accel(t) * r - rd * rd) / (r * r);
  };
  return VectorField(
      [g](const Vec3& x, double t) -> Vec3 { return g(t) * x; },
      [g](const Vec3&, double t) -> Mat3 { return g(t) * Mat3::Identity(); },
      [gp](const Vec3& x, double t) -> Vec3 { return gp(t) * x; });
}

TimeFunction breathing_time_function() {
  return TimeFunction::sinusoid(1.0, 0.2, 0.9);
}

// Radial bump u(r) = 0.3 (r - 1)(2 - r), vanishing at both shell walls,
// expressed as the linear-in-x field phi(r) x with phi = u/r.
VectorField shell_bump_velocity() {
  auto phi = [](double r) { return 0.3 * (r - 1.0) * (2.0 - r) / r; };
  auto dphi = [](double r) { return 0.3 * (-1.0 + 2.0 / (r * r)); };
  return VectorField(
      [phi](const Vec3& x, double) -> Vec3 { return phi(x.norm()) * x; },
      [phi, dphi](const Vec3& x, double) -> Mat3 {
        const double r = x.norm();
        return phi(r) * Mat3::Identity() + dphi(r) / r * x * x.transpose();
      },
      [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); });
}

}  // namespace

TEST_CASE("time functions expose exact values and derivatives") {
  const TimeFunction c = TimeFunction::constant(2.0);
  CHECK(std::abs(c.value(5.0) - 2.0) < 1e-15);
  CHECK(std::abs(c.deriv(5.0)) < 1e-15);
  const TimeFunction lin = TimeFunction::linear(1.0, 3.0);
  CHECK(std::abs(lin.value(2.0) - 7.0) < 1e-15);
  CHECK(std::abs(lin.deriv(9.0) - 3.0) < 1e-15);
  const TimeFunction s = TimeFunction::sinusoid(1.0, 0.5, 2.0);
  CHECK(std::abs(s.value(0.3) - (1.0 + 0.5 * std::sin(0.6))) < 1e-15);
  CHECK(std::abs(s.deriv(0.3) - std::cos(0.6)) < 1e-15);
}

TEST_CASE("domain measures match the closed-form volumes") {
  const VectorField v = breathing_velocity();
  const MovingDomain ball = MovingDomain::ball(breathing_time_function(), v);
  const MovingDomain shell =
      MovingDomain::spherical_shell(TimeFunction::constant(1.0), 2.0,
                                    VectorField::zero());
  const MovingDomain seg = MovingDomain::interval(
      TimeFunction::linear(-1.0, 0.05), TimeFunction::linear(1.0, 0.2),
      VectorField::zero());
  const double t = 0.7;
  const double r = breathing_radius(t);
  CHECK(std::abs(ball.measure(t) - 4.0 * kPi / 3.0 * r * r * r) < 1e-12);
  CHECK(std::abs(shell.measure(t) - 4.0 * kPi / 3.0 * 7.0) < 1e-12);
  CHECK(std::abs(seg.measure(t) - (2.0 + 0.15 * t)) < 1e-14);
  const MovingSurface sphere(breathing_time_function(), v);
  CHECK(std::abs(sphere.area(t) - 4.0 * kPi * r * r) < 1e-12);
}

TEST_CASE("boundary motion validation accepts matched fields and rejects others") {
  const MovingDomain good =
      MovingDomain::ball(breathing_time_function(), breathing_velocity());
  CHECK_NOTHROW(good.validate_boundary_motion(0.0, 1.0, 20));

  const MovingDomain frozen =
      MovingDomain::ball(TimeFunction::linear(1.0, 0.1), VectorField::zero());
  CHECK_THROWS_AS(frozen.validate_boundary_motion(0.0, 1.0, 20),
                  RestrictionError);

  const MovingSurface sphere(breathing_time_function(), breathing_velocity());
  CHECK_NOTHROW(sphere.validate_boundary_motion(0.0, 1.0, 20));
  const MovingSurface bad(TimeFunction::linear(1.0, 0.1), VectorField::zero());
  CHECK_THROWS_AS(bad.validate_boundary_motion(0.0, 1.0, 20), RestrictionError);
}

TEST_CASE("interval endpoints move with the interpolated velocity") {
  const TimeFunction a = TimeFunction::linear(-1.0, 0.05);
  const TimeFunction b = TimeFunction::linear(1.0, 0.2);
  const VectorField v([](const Vec3& x, double t) -> Vec3 {
    const double lo = -1.0 + 0.05 * t, hi = 1.0 + 0.2 * t;
    const double c1 = 0.15 / (hi - lo);
    return Vec3(0.05 + c1 * (x.x() - lo), 0.0, 0.0);
  });
  const MovingDomain seg = MovingDomain::interval(a, b, v);
  CHECK_NOTHROW(seg.validate_boundary_motion(0.0, 2.0, 20));

  // f = x^2: the transported integral is (b^3 - a^3)/3.
  const ScalarField f = ScalarField::from_poly(Poly4::var(0) * Poly4::var(0));
  const double t = 0.4, dt = 5e-4;
  const TransportResidual r = bulk_transport_residual(seg, f, t, dt);
  const double lo = a.value(t), hi = b.value(t);
  const double exact = hi * hi * b.deriv(t) - lo * lo * a.deriv(t);
  CHECK(std::abs(r.instantaneous - exact) < 1e-8);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("unit density transport on the breathing ball matches the area rule") {
  const MovingDomain ball =
      MovingDomain::ball(breathing_time_function(), breathing_velocity());
  const double t = 0.3, dt = 5e-5;
  const TransportResidual r =
      bulk_transport_residual(ball, scalar_preset("one"), t, dt);
  const double rad = breathing_radius(t);
  // d/dt Vol = 4 pi R^2 Rdot.
  const double exact = 4.0 * kPi * rad * rad * breathing_rate(t);
  CHECK(std::abs(r.instantaneous - exact) < 1e-8);
  CHECK(std::abs(r.time_derivative - exact) < 1e-8);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("unit density transport on the breathing sphere matches the area rule") {
  const MovingSurface sphere(breathing_time_function(), breathing_velocity());
  const double t = 0.3, dt = 5e-5;
  const TransportResidual r =
      surface_transport_residual(sphere, scalar_preset("one"), t, dt);
  const double rad = breathing_radius(t);
  // d/dt Area = 8 pi R Rdot.
  const double exact = 8.0 * kPi * rad * breathing_rate(t);
  CHECK(std::abs(r.instantaneous - exact) < 1e-8);
  CHECK(std::abs(r.time_derivative - exact) < 1e-8);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("transport residuals converge at second order in the time step") {
  const ScalarField f = scalar_preset("radial_quadratic");
  const MovingDomain ball =
      MovingDomain::ball(breathing_time_function(), breathing_velocity());
  const MovingSurface sphere(breathing_time_function(), breathing_velocity());
  const std::vector<double> dts = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> ball_err, sphere_err;
  for (const double dt : dts) {
    ball_err.push_back(bulk_transport_residual(ball, f, 0.4, dt).residual);
    sphere_err.push_back(
        surface_transport_residual(sphere, f, 0.4, dt).residual);
  }
  const double ball_order = observed_order(dts, ball_err);
  const double sphere_order = observed_order(dts, sphere_err);
  std::printf("[transport] ball residual order %.3f, sphere %.3f: %s\n",
              ball_order, sphere_order,
              (std::abs(ball_order - 2.0) <= 0.3 &&
               std::abs(sphere_order - 2.0) <= 0.3)
                  ? "pass"
                  : "FAIL");
  CHECK(std::abs(ball_order - 2.0) <= 0.3);
  CHECK(std::abs(sphere_order - 2.0) <= 0.3);
}

TEST_CASE("half-space cuts integrate over the exact region slices") {
  const MovingDomain ball =
      MovingDomain::ball(TimeFunction::constant(1.0), VectorField::zero());
  const HalfSpaceCut cut{2, 0.3};
  // Ball slice z <= b: pi (R^2 b - b^3/3 + 2 R^3 / 3).
  const double exact = kPi * (0.3 - 0.027 / 3.0 + 2.0 / 3.0);
  CHECK(std::abs(ball.integrate(scalar_preset("one"), 0.0, cut) - exact) <
        1e-10);

  const MovingSurface sphere(TimeFunction::constant(1.0), VectorField::zero());
  // Sphere cap z <= b has area 2 pi R (R + b).
  CHECK(std::abs(sphere.integrate(scalar_preset("one"), 0.0, cut) -
                 2.0 * kPi * 1.3) < 1e-10);
}

TEST_CASE("transport through a centered cut halves the breathing-ball rule") {
  const MovingDomain ball =
      MovingDomain::ball(breathing_time_function(), breathing_velocity());
  const HalfSpaceCut centered{2, 0.0};
  const double t = 0.3, dt = 5e-5;
  const TransportResidual r =
      bulk_transport_residual(ball, scalar_preset("one"), t, dt, centered);
  const double rad = breathing_radius(t);
  CHECK(std::abs(r.instantaneous - 2.0 * kPi * rad * rad * breathing_rate(t)) <
        1e-8);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("flux-crossing cuts are rejected rather than silently evaluated") {
  const MovingDomain ball =
      MovingDomain::ball(breathing_time_function(), breathing_velocity());
  // The radial field has v_z != 0 everywhere off the equatorial plane.
  CHECK_THROWS_AS((void)bulk_transport_residual(ball, scalar_preset("one"), 0.3,
                                                1e-3, HalfSpaceCut{2, 0.5}),
                  RestrictionError);
  const MovingDomain shell = MovingDomain::spherical_shell(
      TimeFunction::constant(1.0), 2.0, VectorField::zero());
  CHECK_THROWS_AS(
      (void)shell.integrate(scalar_preset("one"), 0.0, HalfSpaceCut{2, 0.0}),
      GeometryError);
  const MovingDomain seg = MovingDomain::interval(TimeFunction::constant(-1.0),
                                                  TimeFunction::constant(1.0),
                                                  VectorField::zero());
  CHECK_THROWS_AS(
      (void)seg.integrate(scalar_preset("one"), 0.0, HalfSpaceCut{1, 0.0}),
      GeometryError);
}

TEST_CASE("degenerate domain shapes are rejected at construction") {
  CHECK_THROWS_AS((void)MovingDomain::ball(TimeFunction::constant(-1.0),
                                           VectorField::zero()),
                  GeometryError);
  CHECK_THROWS_AS(
      (void)MovingDomain::spherical_shell(TimeFunction::constant(1.5), 1.0,
                                          VectorField::zero()),
      GeometryError);
  CHECK_THROWS_AS((void)MovingSurface(TimeFunction::constant(0.0),
                                      VectorField::zero()),
                  GeometryError);
}

TEST_CASE("classical steady states satisfy the mass identity exactly") {
  MassIdentitySetup setup;
  setup.model = Model::Inviscid;
  setup.material.rho_0 = 0.0;
  setup.radius = TimeFunction::constant(1.0);
  setup.outer_radius = 2.0;
  // Steady rotation in A transports the radial density without change;
  // phase B is at rest.
  setup.phase_a.rho = scalar_preset("radial_quadratic");
  setup.phase_a.vel = vector_preset("rotation_z");
  setup.phase_a.pressure = ScalarField::constant(1.0);
  setup.phase_b.rho = ScalarField::from_poly(
      Poly4(2.0) + Poly4::var(2) * Poly4::var(2) * 0.1);
  setup.phase_b.vel = VectorField::zero();
  setup.phase_b.pressure = ScalarField::constant(1.0);
  setup.interface_velocity = VectorField::zero();

  const MassIdentityBreakdown out = mass_identity_check(setup, 0.5);
  CHECK(std::abs(out.bulk_a) < 1e-8);
  CHECK(std::abs(out.bulk_b) < 1e-8);
  CHECK(std::abs(out.interface) < 1e-12);
  CHECK(out.residual < 1e-8);
}

TEST_CASE("the mass identity assembly matches independent quadrature") {
  MassIdentitySetup setup;
  setup.model = Model::Inviscid;
  setup.material.rho_0 = 0.7;
  setup.material.pi_0 = 2.0;
  setup.radius = TimeFunction::constant(1.0);
  setup.outer_radius = 2.0;
  setup.phase_a.rho = ScalarField::from_poly(
      Poly4(1.0) + poly_r2() * 0.2 + Poly4::var(0) * Poly4::var(3) * 0.3);
  setup.phase_a.vel = vector_preset("rotation_z");
  setup.phase_a.pressure = ScalarField::constant(1.0);
  const auto rho_b_value = [](const Vec3& x, double t) {
    return (2.0 + 0.1 * x.z() * x.z()) * std::exp(-0.5 * t);
  };
  setup.phase_b.rho = ScalarField(
      rho_b_value,
      [](const Vec3& x, double t) -> Vec3 {
        return Vec3(0.0, 0.0, 0.2 * x.z()) * std::exp(-0.5 * t);
      },
      [rho_b_value](const Vec3& x, double t) {
        return -0.5 * rho_b_value(x, t);
      });
  setup.phase_b.vel = shell_bump_velocity();
  setup.phase_b.pressure = ScalarField::constant(1.0);
  setup.interface_velocity = VectorField::zero();

  const double t = 0.3;
  const MassIdentityBreakdown out = mass_identity_check(setup, t);

  // Re-assemble each term with a finer independent quadrature.
  const double bulk_a = integrate_ball(
      Vec3::Zero(), 1.0, 24, 24, 48, [&](const Vec3& x) {
        return setup.phase_a.rho.dt(x, t) +
               setup.phase_a.vel.value(x, t).dot(setup.phase_a.rho.grad(x, t));
      });
  const double bulk_b = integrate_shell(
      Vec3::Zero(), 1.0, 2.0, 24, 24, 48, [&](const Vec3& x) {
        return setup.phase_b.rho.dt(x, t) +
               setup.phase_b.vel.value(x, t).dot(setup.phase_b.rho.grad(x, t)) +
               setup.phase_b.vel.divergence(x, t) *
                   setup.phase_b.rho.value(x, t);
      });
  CHECK(std::abs(out.bulk_a - bulk_a) < 1e-8);
  CHECK(std::abs(out.bulk_b - bulk_b) < 1e-8);
  CHECK(std::abs(out.interface) < 1e-10);  // tangential interface velocity
  CHECK(std::abs(out.residual - std::abs(out.bulk_a + out.bulk_b +
                                         out.interface)) < 1e-14);
}

TEST_CASE("mass identity restrictions name the violated condition") {
  MassIdentitySetup base;
  base.model = Model::Inviscid;
  base.material.rho_0 = 0.7;
  base.radius = TimeFunction::constant(1.0);
  base.outer_radius = 2.0;
  base.phase_a.rho = ScalarField::constant(1.0);
  base.phase_a.vel = VectorField::zero();
  base.phase_a.pressure = ScalarField::constant(1.0);
  base.phase_b.rho = ScalarField::constant(1.0);
  base.phase_b.vel = VectorField::zero();
  base.phase_b.pressure = ScalarField::constant(1.0);
  base.interface_velocity = VectorField::zero();
  CHECK_NOTHROW((void)mass_identity_check(base, 0.0));

  // Compressible A phase.
  MassIdentitySetup bad = base;
  bad.phase_a.vel = vector_preset("identity");
  bad.interface_velocity = vector_preset("identity");
  CHECK_THROWS_AS((void)mass_identity_check(bad, 0.0), RestrictionError);

  // Tangential slip on the interface is rejected by the viscous model only.
  MassIdentitySetup slip = base;
  slip.phase_a.vel = vector_preset("rotation_z");
  CHECK_NOTHROW((void)mass_identity_check(slip, 0.0));
  slip.model = Model::Viscous;
  slip.material.mu_A = 0.1;
  slip.material.mu_B = 0.1;
  CHECK_THROWS_AS((void)mass_identity_check(slip, 0.0), RestrictionError);

  // B-phase flux through the fixed outer wall.
  MassIdentitySetup leak = base;
  leak.phase_b.vel = VectorField(
      [](const Vec3& x, double) -> Vec3 { return (x.norm() - 1.0) * x; });
  CHECK_THROWS_AS((void)mass_identity_check(leak, 0.0), RestrictionError);

  // Interface velocity that does not move the interface.
  MassIdentitySetup stuck = base;
  stuck.radius = TimeFunction::linear(1.0, 0.05);
  try {
    (void)mass_identity_check(stuck, 0.0);
    CHECK(false);
  } catch (const RestrictionError& e) {
    CHECK(std::string(e.what()).find("does not move the interface") !=
          std::string::npos);
  }
}
