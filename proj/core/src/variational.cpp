#include "mfpt/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mfpt/errors.hpp"

namespace mfpt {

namespace {

/// Fibonacci-lattice direction i of n: deterministic, roughly uniform probe
/// coverage of the unit sphere.
Vec3 fibonacci_direction(int i, int n) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - 2.0 * (i + 0.5) / n;
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * i;
  return Vec3(s * std::cos(phi), s * std::sin(phi), z);
}

[[noreturn]] void constraint_failure(const std::string& line, double value,
                                     const Vec3& x) {
  std::ostringstream os;
  os << "admissible perturbation violates: " << line << " (value " << value
     << " at [" << x.x() << ", " << x.y() << ", " << x.z() << "])";
  throw RestrictionError(os.str());
}

void require_constraint(double value, double tol, const std::string& line,
                        const Vec3& x) {
  if (!(std::abs(value) <= tol)) constraint_failure(line, value, x);
}

double surface_div(const VectorField& v, const Vec3& x, const Vec3& n,
                   double t) {
  const Mat3 J = v.jacobian(x, t);
  return J.trace() - n.dot(J * n);
}

/// Real solid harmonics used as perturbation seeds, by degree.
struct Harmonic {
  const char* name;
  Poly4 poly;
};

const std::vector<Harmonic>& harmonics(int l) {
  const Poly4 x = Poly4::var(0), y = Poly4::var(1), z = Poly4::var(2);
  static const std::vector<Harmonic> deg1 = {
      {"x", x}, {"y", y}, {"z", z}};
  static const std::vector<Harmonic> deg2 = {
      {"xy", x * y},
      {"xz", x * z},
      {"yz", y * z},
      {"x^2-y^2", x * x - y * y},
      {"2z^2-x^2-y^2", z * z * 2.0 - x * x - y * y}};
  static const std::vector<Harmonic> deg3 = {
      {"xyz", x * y * z},
      {"z(x^2-y^2)", z * (x * x - y * y)},
      {"x(x^2-3y^2)", x * (x * x - y * y * 3.0)},
      {"y(3x^2-y^2)", y * (x * x * 3.0 - y * y)},
      {"z(2z^2-3x^2-3y^2)", z * (z * z * 2.0 - x * x * 3.0 - y * y * 3.0)}};
  switch (l) {
    case 1:
      return deg1;
    case 2:
      return deg2;
    default:
      return deg3;
  }
}

PolyVec3 scale_by(const Poly4& s) {
  return {s * Poly4::var(0), s * Poly4::var(1), s * Poly4::var(2)};
}

}  // namespace

void SphereGeometry::validate() const {
  if (!(radius > 0.0) || !(outer_radius > radius))
    throw GeometryError(
        "sphere geometry needs 0 < interface radius < outer radius");
}

double energy_eval(EnergyKind kind, const VariationalState& state,
                   const MaterialParams& mat, const SphereGeometry& geom,
                   double t, const VariationalQuadrature& quad) {
  geom.validate();
  double total = 0.0;
  if (kind == EnergyKind::Work || kind == EnergyKind::Total) {
    total += integrate_shell(geom.center, geom.radius, geom.outer_radius,
                             quad.radial, quad.theta, quad.phi,
                             [&](const Vec3& x) {
                               return state.vel_b.divergence(x, t) *
                                      state.pressure_b.value(x, t);
                             });
    total += mat.pi_0 *
             integrate_sphere_surface(geom.center, geom.radius, quad.theta,
                                      quad.phi, [&](const Vec3& x, const Vec3& n) {
                                        return surface_div(state.vel_s, x, n, t);
                                      });
  }
  if (kind == EnergyKind::Dissipation || kind == EnergyKind::Total) {
    total -= 0.5 * mat.mu_A *
             integrate_ball(geom.center, geom.radius, quad.radial, quad.theta,
                            quad.phi, [&](const Vec3& x) {
                              return rate_of_strain(state.vel_a, x, t)
                                  .squaredNorm();
                            });
    total -= integrate_shell(
        geom.center, geom.radius, geom.outer_radius, quad.radial, quad.theta,
        quad.phi, [&](const Vec3& x) {
          const Mat3 J = state.vel_b.jacobian(x, t);
          const double div = J.trace();
          return 0.5 * mat.mu_B * rate_of_strain(J).squaredNorm() +
                 0.5 * mat.lambda_B * div * div;
        });
  }
  return total;
}

void verify_admissible(const AdmissiblePerturbation& pert,
                       const SphereGeometry& geom, int probes, double tol) {
  geom.validate();
  const bool viscous = pert.constraint_set == ConstraintSet::Viscous;
  const double t = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Vec3 n = fibonacci_direction(i, probes);

    // Interface sphere: kinematic matching (and, viscous, no tangential
    // trace).
    const Vec3 xi = geom.center + geom.radius * n;
    const Vec3 pa = pert.phi_a.value(xi, t);
    const Vec3 pb = pert.phi_b.value(xi, t);
    const Vec3 ps = pert.phi_s.value(xi, t);
    require_constraint(pa.dot(n) - ps.dot(n), tol,
                       "phi_A . n != phi_S . n on the interface", xi);
    require_constraint(pb.dot(n) - ps.dot(n), tol,
                       "phi_B . n != phi_S . n on the interface", xi);
    if (viscous) {
      require_constraint((pa - pa.dot(n) * n).norm(), tol,
                         "tangential trace of phi_A on the interface", xi);
      require_constraint((pb - pb.dot(n) * n).norm(), tol,
                         "tangential trace of phi_B on the interface", xi);
    }

    // A-phase bulk: incompressibility, probed on a radius ladder.
    const double frac = std::cbrt((i + 0.5) / probes);
    const Vec3 xa = geom.center + (0.98 * geom.radius * frac) * n;
    require_constraint(pert.phi_a.divergence(xa, t), tol,
                       "div phi_A != 0 in the A phase", xa);

    // Outer wall.
    const Vec3 xw = geom.center + geom.outer_radius * n;
    const Vec3 pw = pert.phi_b.value(xw, t);
    if (viscous) {
      require_constraint(pw.norm(), tol, "phi_B != 0 on the outer wall", xw);
    } else {
      require_constraint(pw.dot(n), tol, "phi_B . n != 0 on the outer wall",
                         xw);
    }
  }
}

AdmissiblePerturbation make_admissible(std::uint64_t seed, ConstraintSet set,
                                       const SphereGeometry& geom) {
  geom.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_l(1, 3);
  std::uniform_real_distribution<double> pick_amp(0.5, 1.5);
  std::bernoulli_distribution pick_sign(0.5);

  const double R = geom.radius;
  const int l = pick_l(rng);
  const auto& table = harmonics(l);
  const auto& h =
      table[std::uniform_int_distribution<std::size_t>(0, table.size() - 1)(
          rng)];
  const double amp = (pick_sign(rng) ? 1.0 : -1.0) * pick_amp(rng);

  // Poloidal part: curl curl( P_l(x) (1 + a |x|^2) x ) is divergence-free
  // (a double curl) and, with a = -(l+1) / ((l+3) R^2), purely radial on the
  // sphere r = R.
  const double a = -double(l + 1) / (double(l + 3) * R * R);
  const Poly4 s = (h.poly * amp) * (Poly4(1.0) + poly_r2() * a);
  PolyVec3 field = poly_curl(poly_curl(scale_by(s)));

  std::ostringstream label;
  label << "poloidal l=" << l << " [" << h.name << "] amp " << amp;

  if (set == ConstraintSet::Inviscid) {
    // The inviscid constraint set leaves tangential traces free, so mix in a
    // toroidal part curl(Q x), tangent to every sphere about the origin.
    const int l2 = pick_l(rng);
    const auto& table2 = harmonics(l2);
    const auto& h2 =
        table2[std::uniform_int_distribution<std::size_t>(
            0, table2.size() - 1)(rng)];
    const double amp2 = (pick_sign(rng) ? 1.0 : -1.0) * pick_amp(rng);
    field = poly_add(field, poly_curl(scale_by(h2.poly * amp2)));
    label << " + toroidal l=" << l2 << " [" << h2.name << "] amp " << amp2;
  }

  AdmissiblePerturbation pert;
  pert.constraint_set = set;
  pert.phi_a = VectorField::from_poly(field, geom.center);
  // Only the interface trace of phi_S matters, and only its normal part:
  // reuse the ambient A-phase field.
  pert.phi_s = pert.phi_a;

  // B-phase extension: Hermite radial window w with w(R) = 1, w'(R) = 0,
  // w(R_out) = 0, w'(R_out) = 0. Viscous: radial component only (zero
  // tangential trace everywhere); inviscid: window the full vector.
  const Vec3 center = geom.center;
  const double R_out = geom.outer_radius;
  const VectorField ambient = pert.phi_a;
  const bool radial_only = (set == ConstraintSet::Viscous);
  pert.phi_b = VectorField([center, R, R_out, ambient, radial_only](
                               const Vec3& x, double t) -> Vec3 {
    const Vec3 y = x - center;
    const double r = y.norm();
    if (r < 1e-14) return Vec3::Zero();
    const double u = std::clamp((r - R) / (R_out - R), 0.0, 1.0);
    const double w = (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u);
    const Vec3 n = y / r;
    const Vec3 value = ambient.value(x, t);
    return radial_only ? Vec3(w * value.dot(n) * n) : Vec3(w * value);
  });

  pert.label = label.str();
  verify_admissible(pert, geom);
  return pert;
}

GateauxResult gateaux_derivative(EnergyKind kind,
                                 const VariationalState& state,
                                 const AdmissiblePerturbation& pert,
                                 const MaterialParams& mat,
                                 const SphereGeometry& geom, double t,
                                 const std::vector<double>& eps_list,
                                 const VariationalQuadrature& quad) {
  if (eps_list.size() < 3)
    throw ConfigError("gateaux derivative needs at least 3 step sizes");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ConfigError("gateaux step sizes must be positive");

  GateauxResult out;
  for (double eps : eps_list) {
    VariationalState plus = state;
    VariationalState minus = state;
    plus.vel_a = combine(1.0, state.vel_a, eps, pert.phi_a);
    plus.vel_b = combine(1.0, state.vel_b, eps, pert.phi_b);
    plus.vel_s = combine(1.0, state.vel_s, eps, pert.phi_s);
    minus.vel_a = combine(1.0, state.vel_a, -eps, pert.phi_a);
    minus.vel_b = combine(1.0, state.vel_b, -eps, pert.phi_b);
    minus.vel_s = combine(1.0, state.vel_s, -eps, pert.phi_s);
    const double e_plus = energy_eval(kind, plus, mat, geom, t, quad);
    const double e_minus = energy_eval(kind, minus, mat, geom, t, quad);
    out.per_eps.push_back((e_plus - e_minus) / (2.0 * eps));
  }

  double scale = 0.0, max_diff = 0.0;
  for (double d : out.per_eps) scale = std::max(scale, std::abs(d));
  for (std::size_t i = 0; i < out.per_eps.size(); ++i)
    for (std::size_t j = i + 1; j < out.per_eps.size(); ++j)
      max_diff = std::max(max_diff,
                          std::abs(out.per_eps[i] - out.per_eps[j]));

  if (max_diff <= 1e-10 * std::max(1.0, scale)) {
    // Both functionals are at most quadratic in the state, so the centered
    // difference has no eps dependence beyond round-off.
    out.eps_independent = true;
    out.value = out.per_eps.back();
    out.observed_order = std::numeric_limits<double>::infinity();
    return out;
  }

  // Sort (eps, derivative) by decreasing eps and estimate the order from the
  // last three entries, then Richardson-extrapolate the finest pair.
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    pairs.emplace_back(eps_list[i], out.per_eps[i]);
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t m = pairs.size();
  const double e1 = pairs[m - 3].first, e2 = pairs[m - 2].first,
               e3 = pairs[m - 1].first;
  const double d1 = pairs[m - 3].second, d2 = pairs[m - 2].second,
               d3 = pairs[m - 1].second;
  const double num = std::abs(d1 - d2), den = std::abs(d2 - d3);
  if (den > 0.0 && num > 0.0) {
    out.observed_order = std::log(num / den) / std::log(e1 / e2);
  } else {
    out.observed_order = std::numeric_limits<double>::infinity();
  }
  const double ratio = std::pow(e2 / e3, std::max(out.observed_order, 1.0));
  out.value = (std::isfinite(ratio) && ratio > 1.0)
                  ? d3 + (d3 - d2) / (ratio - 1.0)
                  : d3;
  out.suspicious = std::isfinite(out.observed_order) &&
                   out.observed_order < 1.5;
  return out;
}

ForceTriple closed_form_forces(Model model, const VariationalState& state,
                               const MaterialParams& mat,
                               const SphereGeometry& geom) {
  geom.validate();
  const VectorField va = state.vel_a, vb = state.vel_b;
  const ScalarField pa = state.pressure_a, pb = state.pressure_b;

  ForceTriple out;
  out.bulk_a = VectorField([model, mat, va, pa](const Vec3& x, double t) {
    return stress_divergence(model, Phase::A, mat, va, pa, x, t);
  });
  out.bulk_b = VectorField([model, mat, vb, pb](const Vec3& x, double t) {
    return stress_divergence(model, Phase::B, mat, vb, pb, x, t);
  });
  const double H = geom.mean_curvature();
  out.interface = [model, mat, va, pa, vb, pb, H](const Vec3& x, const Vec3& n,
                                                  double t) -> Vec3 {
    const double ta = stress_interface(model, Phase::A, mat, va, pa, x, n, t);
    const double tb = stress_interface(model, Phase::B, mat, vb, pb, x, n, t);
    return (-mat.pi_0 * H - ta + tb) * n;
  };
  return out;
}

VariationalCheck variational_identity_residual(
    Model model, const VariationalState& state, const MaterialParams& mat,
    const SphereGeometry& geom, const AdmissiblePerturbation& pert, double t,
    const std::vector<double>& eps_list, const VariationalQuadrature& quad) {
  geom.validate();
  const EnergyKind kind =
      (model == Model::Viscous) ? EnergyKind::Total : EnergyKind::Work;

  VariationalCheck out;
  out.gateaux =
      gateaux_derivative(kind, state, pert, mat, geom, t, eps_list, quad);
  out.derivative = out.gateaux.value;

  const ForceTriple forces = closed_form_forces(model, state, mat, geom);
  double ip = 0.0;
  ip += integrate_ball(geom.center, geom.radius, quad.radial, quad.theta,
                       quad.phi, [&](const Vec3& x) {
                         return forces.bulk_a.value(x, t).dot(
                             pert.phi_a.value(x, t));
                       });
  ip += integrate_shell(geom.center, geom.radius, geom.outer_radius,
                        quad.radial, quad.theta, quad.phi, [&](const Vec3& x) {
                          return forces.bulk_b.value(x, t).dot(
                              pert.phi_b.value(x, t));
                        });
  ip += integrate_sphere_surface(geom.center, geom.radius, quad.theta,
                                 quad.phi, [&](const Vec3& x, const Vec3& n) {
                                   return forces.interface(x, n, t).dot(
                                       pert.phi_s.value(x, t));
                                 });
  out.force_inner_product = ip;
  out.residual = std::abs(out.derivative - ip);
  out.relative_residual = out.residual / std::max(std::abs(ip), 1e-14);
  return out;
}

}  // namespace mfpt
