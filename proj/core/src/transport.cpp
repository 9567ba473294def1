#include "mfpt/transport.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfpt/errors.hpp"

namespace mfpt {

namespace {

/// Deterministic probe directions: coordinate axes plus the cube diagonals.
const std::vector<Vec3>& probe_directions() {
  static const std::vector<Vec3> dirs = [] {
    std::vector<Vec3> d;
    for (int a = 0; a < 3; ++a) {
      Vec3 e = Vec3::Zero();
      e[a] = 1.0;
      d.push_back(e);
      d.push_back(-e);
    }
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1}) d.push_back(Vec3(sx, sy, sz).normalized());
    return d;
  }();
  return dirs;
}

[[noreturn]] void restriction_failure(const std::string& what, double value,
                                      const Vec3& x, double t) {
  std::ostringstream os;
  os << "restriction violated: " << what << " (value " << value << " at ["
     << x.x() << ", " << x.y() << ", " << x.z() << "], t = " << t << ")";
  throw RestrictionError(os.str());
}

void require_small(double value, double tol, const std::string& what,
                   const Vec3& x, double t) {
  if (!(std::abs(value) <= tol)) restriction_failure(what, value, x, t);
}

Vec3 on_axis(double x) { return Vec3(x, 0.0, 0.0); }

}  // namespace

TimeFunction TimeFunction::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

TimeFunction TimeFunction::linear(double a, double b) {
  return {[a, b](double t) { return a + b * t; }, [b](double) { return b; }};
}

TimeFunction TimeFunction::sinusoid(double a, double b, double w) {
  return {[a, b, w](double t) { return a + b * std::sin(w * t); },
          [b, w](double t) { return b * w * std::cos(w * t); }};
}

MovingDomain MovingDomain::interval(TimeFunction a, TimeFunction b,
                                    VectorField velocity) {
  MovingDomain d;
  d.shape_ = Shape::Interval;
  d.lo_ = std::move(a);
  d.hi_ = std::move(b);
  d.velocity_ = std::move(velocity);
  return d;
}

MovingDomain MovingDomain::ball(TimeFunction radius, VectorField velocity,
                                const Vec3& center) {
  if (radius.value(0.0) <= 0.0)
    throw GeometryError("ball domain needs a positive initial radius");
  MovingDomain d;
  d.shape_ = Shape::Ball;
  d.lo_ = std::move(radius);
  d.center_ = center;
  d.velocity_ = std::move(velocity);
  return d;
}

MovingDomain MovingDomain::spherical_shell(TimeFunction inner_radius,
                                           double outer_radius,
                                           VectorField velocity,
                                           const Vec3& center) {
  if (inner_radius.value(0.0) <= 0.0 ||
      outer_radius <= inner_radius.value(0.0))
    throw GeometryError(
        "shell domain needs 0 < inner radius < outer radius at t = 0");
  MovingDomain d;
  d.shape_ = Shape::SphericalShell;
  d.lo_ = std::move(inner_radius);
  d.outer_radius_ = outer_radius;
  d.center_ = center;
  d.velocity_ = std::move(velocity);
  return d;
}

double MovingDomain::integrate_callable(
    const std::function<double(const Vec3&)>& g, double t,
    const std::optional<HalfSpaceCut>& cut,
    const TransportQuadrature& quad) const {
  switch (shape_) {
    case Shape::Interval: {
      double a = lo_.value(t), b = hi_.value(t);
      if (cut) {
        if (cut->axis != 0)
          throw GeometryError(
              "interval domains only support half-space cuts along x");
        b = std::min(b, cut->bound);
      }
      return integrate_interval(a, b, quad.line,
                                [&](double x) { return g(on_axis(x)); });
    }
    case Shape::Ball: {
      const double R = lo_.value(t);
      if (cut)
        return integrate_ball_cut(center_, R, *cut, quad.radial, quad.radial,
                                  quad.phi, g);
      return integrate_ball(center_, R, quad.radial, quad.theta, quad.phi, g);
    }
    case Shape::SphericalShell: {
      if (cut)
        throw GeometryError(
            "half-space cuts are not supported for shell domains");
      return integrate_shell(center_, lo_.value(t), outer_radius_, quad.radial,
                             quad.theta, quad.phi, g);
    }
  }
  return 0.0;
}

double MovingDomain::integrate(const ScalarField& f, double t,
                               const std::optional<HalfSpaceCut>& cut,
                               const TransportQuadrature& quad) const {
  return integrate_callable([&](const Vec3& x) { return f.value(x, t); }, t,
                            cut, quad);
}

double MovingDomain::measure(double t) const {
  constexpr double four_thirds_pi = 4.0 * std::numbers::pi / 3.0;
  switch (shape_) {
    case Shape::Interval:
      return hi_.value(t) - lo_.value(t);
    case Shape::Ball:
      return four_thirds_pi * std::pow(lo_.value(t), 3);
    case Shape::SphericalShell:
      return four_thirds_pi *
             (std::pow(outer_radius_, 3) - std::pow(lo_.value(t), 3));
  }
  return 0.0;
}

void MovingDomain::check_motion_at(double t, double tol) const {
  switch (shape_) {
    case Shape::Interval: {
      const double a = lo_.value(t), b = hi_.value(t);
      require_small(velocity_.value(on_axis(a), t).x() - lo_.deriv(t), tol,
                    "left endpoint rate does not match the velocity",
                    on_axis(a), t);
      require_small(velocity_.value(on_axis(b), t).x() - hi_.deriv(t), tol,
                    "right endpoint rate does not match the velocity",
                    on_axis(b), t);
      return;
    }
    case Shape::Ball:
    case Shape::SphericalShell: {
      const double R = lo_.value(t), Rdot = lo_.deriv(t);
      for (const Vec3& n : probe_directions()) {
        const Vec3 x = center_ + R * n;
        require_small(velocity_.value(x, t).dot(n) - Rdot, tol,
                      "boundary rate does not match the normal velocity", x,
                      t);
      }
      if (shape_ == Shape::SphericalShell) {
        for (const Vec3& n : probe_directions()) {
          const Vec3 x = center_ + outer_radius_ * n;
          require_small(velocity_.value(x, t).dot(n), tol,
                        "velocity is not tangent to the fixed outer wall", x,
                        t);
        }
      }
      return;
    }
  }
}

void MovingDomain::validate_boundary_motion(double t0, double t1, int samples,
                                            double tol) const {
  for (int i = 0; i < samples; ++i) {
    const double t =
        (samples == 1) ? t0 : t0 + (t1 - t0) * i / double(samples - 1);
    check_motion_at(t, tol);
  }
}

MovingSurface::MovingSurface(TimeFunction radius, VectorField velocity,
                             const Vec3& center)
    : radius_(std::move(radius)),
      center_(center),
      velocity_(std::move(velocity)) {
  if (radius_.value(0.0) <= 0.0)
    throw GeometryError("moving sphere needs a positive initial radius");
}

double MovingSurface::integrate_callable(
    const std::function<double(const Vec3&, const Vec3&)>& g, double t,
    const std::optional<HalfSpaceCut>& cut,
    const TransportQuadrature& quad) const {
  return integrate_sphere_surface(center_, radius_.value(t), quad.theta,
                                  quad.phi, g, cut);
}

double MovingSurface::integrate(const ScalarField& f, double t,
                                const std::optional<HalfSpaceCut>& cut,
                                const TransportQuadrature& quad) const {
  return integrate_callable(
      [&](const Vec3& x, const Vec3&) { return f.value(x, t); }, t, cut, quad);
}

double MovingSurface::area(double t) const {
  const double R = radius_.value(t);
  return 4.0 * std::numbers::pi * R * R;
}

void MovingSurface::check_motion_at(double t, double tol) const {
  const double R = radius_.value(t), Rdot = radius_.deriv(t);
  for (const Vec3& n : probe_directions()) {
    const Vec3 x = center_ + R * n;
    require_small(velocity_.value(x, t).dot(n) - Rdot, tol,
                  "surface rate does not match the normal velocity", x, t);
  }
}

void MovingSurface::validate_boundary_motion(double t0, double t1, int samples,
                                             double tol) const {
  for (int i = 0; i < samples; ++i) {
    const double t =
        (samples == 1) ? t0 : t0 + (t1 - t0) * i / double(samples - 1);
    check_motion_at(t, tol);
  }
}

TransportResidual bulk_transport_residual(
    const MovingDomain& domain, const ScalarField& f, double t, double dt,
    const std::optional<HalfSpaceCut>& cut, const TransportQuadrature& quad) {
  if (dt <= 0.0) throw ConfigError("transport residual needs dt > 0");
  domain.check_motion_at(t, 1e-8);
  if (cut) {
    const double tol = 1e-8;
    if (domain.shape_ == MovingDomain::Shape::Interval) {
      if (cut->axis != 0)
        throw GeometryError(
            "interval domains only support half-space cuts along x");
      const double a = domain.lo_.value(t), b = domain.hi_.value(t);
      if (cut->bound > a && cut->bound < b) {
        const Vec3 x = on_axis(cut->bound);
        require_small(domain.velocity_.value(x, t).x(), tol,
                      "half-space cut plane is not flux-free", x, t);
      }
    } else if (domain.shape_ == MovingDomain::Shape::Ball) {
      const int a = cut->axis, b1 = (a + 1) % 3, b2 = (a + 2) % 3;
      const double R = domain.lo_.value(t);
      const double h = cut->bound - domain.center_[a];
      if (std::abs(h) < R) {
        const double disk_r = std::sqrt(R * R - h * h);
        for (double s : {0.0, 0.35, 0.7, 0.95}) {
          for (int k = 0; k < 8; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / 8.0;
            Vec3 x = domain.center_;
            x[a] += h;
            x[b1] += s * disk_r * std::cos(phi);
            x[b2] += s * disk_r * std::sin(phi);
            require_small(domain.velocity_.value(x, t)[a], tol,
                          "half-space cut plane is not flux-free", x, t);
          }
        }
      }
    } else {
      throw GeometryError(
          "half-space cuts are not supported for shell domains");
    }
  }

  TransportResidual out;
  out.time_derivative = (domain.integrate(f, t + dt, cut, quad) -
                         domain.integrate(f, t - dt, cut, quad)) /
                        (2.0 * dt);
  const bool line = domain.shape_ == MovingDomain::Shape::Interval;
  const auto integrand = [&](const Vec3& x) {
    const Vec3 v = domain.velocity_.value(x, t);
    const Mat3 J = domain.velocity_.jacobian(x, t);
    const Vec3 g = f.grad(x, t);
    const double div_v = line ? J(0, 0) : J.trace();
    const double advect = line ? v.x() * g.x() : v.dot(g);
    return f.dt(x, t) + advect + div_v * f.value(x, t);
  };
  out.instantaneous = domain.integrate_callable(integrand, t, cut, quad);
  out.residual = std::abs(out.time_derivative - out.instantaneous);
  return out;
}

TransportResidual surface_transport_residual(
    const MovingSurface& surface, const ScalarField& f, double t, double dt,
    const std::optional<HalfSpaceCut>& cut, const TransportQuadrature& quad) {
  if (dt <= 0.0) throw ConfigError("transport residual needs dt > 0");
  surface.check_motion_at(t, 1e-8);
  if (cut) {
    // The cap boundary circle must be flux-free: no surface velocity across
    // the rim, otherwise d/dt of the cap integral picks up a line term.
    const double tol = 1e-8;
    const int a = cut->axis, b1 = (a + 1) % 3, b2 = (a + 2) % 3;
    const double R = surface.radius_.value(t);
    const double h = cut->bound - surface.center_[a];
    if (std::abs(h) < R) {
      const double rim_r = std::sqrt(R * R - h * h);
      for (int k = 0; k < 12; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / 12.0;
        Vec3 x = surface.center_;
        x[a] += h;
        x[b1] += rim_r * std::cos(phi);
        x[b2] += rim_r * std::sin(phi);
        const Vec3 n = (x - surface.center_).normalized();
        Vec3 ea = Vec3::Zero();
        ea[a] = 1.0;
        const Vec3 conormal = (ea - n.dot(ea) * n).normalized();
        require_small(surface.velocity_.value(x, t).dot(conormal), tol,
                      "cap boundary circle is not flux-free", x, t);
      }
    }
  }

  TransportResidual out;
  out.time_derivative = (surface.integrate(f, t + dt, cut, quad) -
                         surface.integrate(f, t - dt, cut, quad)) /
                        (2.0 * dt);
  const auto integrand = [&](const Vec3& x, const Vec3& n) {
    const Vec3 v = surface.velocity_.value(x, t);
    const Mat3 J = surface.velocity_.jacobian(x, t);
    const double div_s = J.trace() - n.dot(J * n);
    return f.dt(x, t) + v.dot(f.grad(x, t)) + div_s * f.value(x, t);
  };
  out.instantaneous = surface.integrate_callable(integrand, t, cut, quad);
  out.residual = std::abs(out.time_derivative - out.instantaneous);
  return out;
}

MassIdentityBreakdown mass_identity_check(const MassIdentitySetup& setup,
                                          double t,
                                          const TransportQuadrature& quad,
                                          double restriction_tol) {
  setup.material.validate(setup.model);
  const double R = setup.radius.value(t);
  const double Rdot = setup.radius.deriv(t);
  if (R <= 0.0 || setup.outer_radius <= R)
    throw GeometryError(
        "mass identity needs 0 < interface radius < outer radius");
  const Vec3& c = setup.center;
  const double tol = restriction_tol;

  // Interior of the A phase: divergence-free velocity.
  for (double frac : {0.2, 0.5, 0.8}) {
    for (const Vec3& n : probe_directions()) {
      const Vec3 x = c + frac * R * n;
      require_small(setup.phase_a.vel.divergence(x, t), tol,
                    "the A-phase velocity is not divergence-free", x, t);
    }
  }
  // Interface: kinematic matching, interface motion, and (viscous) no slip.
  for (const Vec3& n : probe_directions()) {
    const Vec3 x = c + R * n;
    const Vec3 va = setup.phase_a.vel.value(x, t);
    const Vec3 vb = setup.phase_b.vel.value(x, t);
    const Vec3 vs = setup.interface_velocity.value(x, t);
    require_small(va.dot(n) - vs.dot(n), tol,
                  "kinematic mismatch: v_A . n != v_S . n on the interface", x,
                  t);
    require_small(vb.dot(n) - vs.dot(n), tol,
                  "kinematic mismatch: v_B . n != v_S . n on the interface", x,
                  t);
    require_small(vs.dot(n) - Rdot, tol,
                  "the interface velocity does not move the interface", x, t);
    if (setup.model == Model::Viscous) {
      require_small((va - va.dot(n) * n).norm(), tol,
                    "tangential slip of v_A on the interface (viscous model)",
                    x, t);
      require_small((vb - vb.dot(n) * n).norm(), tol,
                    "tangential slip of v_B on the interface (viscous model)",
                    x, t);
    }
  }
  // Outer wall.
  for (const Vec3& n : probe_directions()) {
    const Vec3 x = c + setup.outer_radius * n;
    const Vec3 vb = setup.phase_b.vel.value(x, t);
    if (setup.model == Model::Viscous) {
      require_small(vb.norm(), tol,
                    "the B-phase velocity does not vanish on the outer wall",
                    x, t);
    } else {
      require_small(vb.dot(n), tol,
                    "the B-phase velocity is not tangent to the outer wall", x,
                    t);
    }
  }

  MassIdentityBreakdown out;
  out.bulk_a = integrate_ball(c, R, quad.radial, quad.theta, quad.phi,
                              [&](const Vec3& x) {
                                return setup.phase_a.rho.dt(x, t) +
                                       setup.phase_a.vel.value(x, t).dot(
                                           setup.phase_a.rho.grad(x, t));
                              });
  out.bulk_b = integrate_shell(
      c, R, setup.outer_radius, quad.radial, quad.theta, quad.phi,
      [&](const Vec3& x) {
        return setup.phase_b.rho.dt(x, t) +
               setup.phase_b.vel.value(x, t).dot(setup.phase_b.rho.grad(x, t)) +
               setup.phase_b.vel.divergence(x, t) *
                   setup.phase_b.rho.value(x, t);
      });
  out.interface =
      setup.material.rho_0 *
      integrate_sphere_surface(c, R, quad.theta, quad.phi,
                               [&](const Vec3& x, const Vec3& n) {
                                 const Mat3 J =
                                     setup.interface_velocity.jacobian(x, t);
                                 return J.trace() - n.dot(J * n);
                               });
  out.residual = std::abs(out.bulk_a + out.bulk_b + out.interface);
  return out;
}

}  // namespace mfpt
