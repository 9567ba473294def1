#include <doctest/doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "mfpt/errors.hpp"
#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"
#include "mfpt/tensor_ops.hpp"

using namespace mfpt;

namespace {

MaterialParams test_material() {
  MaterialParams mat;
  mat.mu_A = 0.3;
  mat.mu_B = 0.2;
  mat.lambda_B = 0.15;
  mat.rho_0 = 0.7;
  mat.pi_0 = 2.0;
  return mat;
}

using PolyMat3 = std::array<std::array<Poly4, 3>, 3>;

// Independent expansion of the bulk stress in exact polynomial algebra:
//   T = mu (J + J^T)/2 + lambda (div v) I - pi I
// with mu = 0 for the inviscid model, lambda only for viscous phase B.
PolyMat3 symbolic_stress(Model model, Phase phase, const MaterialParams& mat,
                         const PolyVec3& v, const Poly4& pi) {
  double mu = 0.0, lambda = 0.0;
  if (model == Model::Viscous) {
    mu = phase == Phase::A ? mat.mu_A : mat.mu_B;
    lambda = phase == Phase::B ? mat.lambda_B : 0.0;
  }
  const Poly4 div = poly_divergence(v);
  PolyMat3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      t[i][j] = (v[i].derivative(j) + v[j].derivative(i)) * (0.5 * mu);
      if (i == j) t[i][j] += div * lambda - pi;
    }
  }
  return t;
}

PolyVec3 symbolic_stress_divergence(const PolyMat3& t) {
  PolyVec3 d;
  for (int i = 0; i < 3; ++i) {
    d[i] = Poly4();
    for (int j = 0; j < 3; ++j) d[i] += t[i][j].derivative(j);
  }
  return d;
}

Poly4 symbolic_stress_power_divergence(const PolyMat3& t, const PolyVec3& v) {
  Poly4 div;
  for (int i = 0; i < 3; ++i) {
    Poly4 row;
    for (int j = 0; j < 3; ++j) row += t[i][j] * v[j];
    div += row.derivative(i);
  }
  return div;
}

Poly4 symbolic_source(Model model, Phase phase, const MaterialParams& mat,
                      const PolyVec3& v, const Poly4& pi) {
  const double c = mat.coupling();
  if (model == Model::Inviscid) {
    return poly_divergence(poly_scale(pi, v)) * c;
  }
  const PolyMat3 t = symbolic_stress(model, phase, mat, v, pi);
  return symbolic_stress_power_divergence(t, v) * (-c);
}

Poly4 symbolic_residual_mass(Model model, Phase phase, const MaterialParams& mat,
                             const Poly4& rho, const PolyVec3& v,
                             const Poly4& pi) {
  Poly4 r = rho.derivative(3) + poly_dot(v, poly_grad(rho));
  if (phase == Phase::B) r += poly_divergence(v) * rho;
  return r - symbolic_source(model, phase, mat, v, pi);
}

PolyVec3 symbolic_residual_momentum(Model model, Phase phase,
                                    const MaterialParams& mat, const Poly4& rho,
                                    const PolyVec3& v, const Poly4& pi) {
  const PolyMat3 t = symbolic_stress(model, phase, mat, v, pi);
  const PolyVec3 div_t = symbolic_stress_divergence(t);
  const Poly4 source = symbolic_source(model, phase, mat, v, pi);
  // The source enters the momentum balance with a plus: expanding the
  // conservative form d_t(rho v) + div(rho v x v - T) with the mass law
  // d_t rho + div(rho v) = source leaves rho D_t v - div T + source v.
  PolyVec3 r;
  for (int i = 0; i < 3; ++i) {
    Poly4 material_deriv = v[i].derivative(3);
    for (int j = 0; j < 3; ++j) material_deriv += v[j] * v[i].derivative(j);
    r[i] = rho * material_deriv - div_t[i] + source * v[i];
  }
  return r;
}

PolyVec3 random_velocity(std::uint64_t seed) {
  return PolyVec3{random_poly(seed, 2, true), random_poly(seed + 31, 2, true),
                  random_poly(seed + 62, 2, true)};
}

Vec3 probe_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  return Vec3(dist(rng), dist(rng), dist(rng));
}

}  // namespace

TEST_CASE("rate of strain symmetrizes the shear gradient to half entries") {
  const VectorField shear = vector_preset("shear_xy");
  const Vec3 x(0.3, -0.8, 1.4);
  const Mat3 d = rate_of_strain(shear, x, 0.0);
  CHECK(std::abs(d(0, 1) - 0.5) < 1e-14);
  CHECK(std::abs(d(1, 0) - 0.5) < 1e-14);
  CHECK(std::abs(d(0, 0)) < 1e-14);
  CHECK(std::abs(d(1, 1)) < 1e-14);
  CHECK(std::abs(d(2, 2)) < 1e-14);
  CHECK(std::abs(d(0, 2)) < 1e-14);
  // The matrix overload agrees with the field overload.
  CHECK((rate_of_strain(shear.jacobian(x, 0.0)) - d).norm() < 1e-14);
}

TEST_CASE("rate of strain trace equals the velocity divergence") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 7; seed < 10; ++seed) {
    const VectorField v = VectorField::from_poly(random_velocity(seed));
    const Vec3 x = probe_point(rng);
    const Mat3 d = rate_of_strain(v, x, 0.4);
    CHECK((d - d.transpose()).norm() < 1e-13);
    CHECK(std::abs(d.trace() - v.divergence(x, 0.4)) < 1e-12);
  }
}

TEST_CASE("bulk stress matches its symbolic expansion on random polynomials") {
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 100; seed < 103; ++seed) {
    const PolyVec3 vp = random_velocity(seed);
    const Poly4 pp = random_poly(seed + 200, 2, true);
    const VectorField v = VectorField::from_poly(vp);
    const ScalarField pi = ScalarField::from_poly(pp);
    for (Model model : {Model::Inviscid, Model::Viscous}) {
      for (Phase phase : {Phase::A, Phase::B}) {
        const PolyMat3 ts = symbolic_stress(model, phase, mat, vp, pp);
        for (int k = 0; k < 5; ++k) {
          const Vec3 x = probe_point(rng);
          const double t = 0.2 * k;
          const Mat3 stress = stress_bulk(model, phase, mat, v, pi, x, t);
          CHECK((stress - stress.transpose()).norm() < 1e-12);
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
              CHECK(std::abs(stress(i, j) - ts[i][j](x, t)) < 1e-8);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("stress divergence and stress power divergence match symbolic forms") {
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(13);
  for (std::uint64_t seed = 300; seed < 303; ++seed) {
    const PolyVec3 vp = random_velocity(seed);
    const Poly4 pp = random_poly(seed + 200, 2, true);
    const VectorField v = VectorField::from_poly(vp);
    const ScalarField pi = ScalarField::from_poly(pp);
    for (Model model : {Model::Inviscid, Model::Viscous}) {
      for (Phase phase : {Phase::A, Phase::B}) {
        const PolyMat3 ts = symbolic_stress(model, phase, mat, vp, pp);
        const PolyVec3 div_ts = symbolic_stress_divergence(ts);
        const Poly4 power = symbolic_stress_power_divergence(ts, vp);
        for (int k = 0; k < 5; ++k) {
          const Vec3 x = probe_point(rng);
          const double t = 0.15 * k;
          const Vec3 div_t = stress_divergence(model, phase, mat, v, pi, x, t);
          for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(div_t[i] - div_ts[i](x, t)) < 1e-8);
          }
          CHECK(std::abs(stress_power_divergence(model, phase, mat, v, pi, x, t) -
                         power(x, t)) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("interface stress requires a unit normal") {
  const MaterialParams mat = test_material();
  const VectorField v = vector_preset("identity");
  const ScalarField pi = ScalarField::constant(1.0);
  const Vec3 x(0.5, 0.5, 0.0);
  CHECK_THROWS_AS((void)stress_interface(Model::Viscous, Phase::A, mat, v, pi, x,
                                         Vec3(1.0, 1.0, 0.0), 0.0),
                  GeometryError);
  CHECK_THROWS_AS((void)stress_interface(Model::Viscous, Phase::A, mat, v, pi, x,
                                         Vec3(1.0 + 1e-6, 0.0, 0.0), 0.0),
                  GeometryError);
  // Deviations within 1e-8 are accepted.
  CHECK_NOTHROW((void)stress_interface(Model::Viscous, Phase::A, mat, v, pi, x,
                                       Vec3(1.0 + 1e-9, 0.0, 0.0), 0.0));
}

TEST_CASE("normal stress flux reduces to the scalar interface stress") {
  // For a purely normal velocity v = phi(x) n with constant unit n, the
  // tensor flux (T v).n equals T~ (v.n) for every model and phase.
  const MaterialParams mat = test_material();
  const Vec3 n = Vec3(0.3, -0.6, 0.74).normalized();
  const Poly4 phi = random_poly(42, 2, true, 0.8);
  const PolyVec3 vp{phi * n[0], phi * n[1], phi * n[2]};
  const Poly4 pp = random_poly(77, 2, true);
  const VectorField v = VectorField::from_poly(vp);
  const ScalarField pi = ScalarField::from_poly(pp);
  std::mt19937_64 rng(17);
  for (Model model : {Model::Inviscid, Model::Viscous}) {
    for (Phase phase : {Phase::A, Phase::B}) {
      for (int k = 0; k < 10; ++k) {
        const Vec3 x = probe_point(rng);
        const double t = 0.1 * k;
        const Mat3 stress = stress_bulk(model, phase, mat, v, pi, x, t);
        const double tensor_flux = (stress * v.value(x, t)).dot(n);
        const double scalar_flux =
            stress_interface(model, phase, mat, v, pi, x, n, t) *
            v.value(x, t).dot(n);
        CHECK(std::abs(tensor_flux - scalar_flux) < 1e-8);
      }
    }
  }
}

TEST_CASE("system residuals match their symbolic expansions") {
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(19);
  for (std::uint64_t seed = 500; seed < 502; ++seed) {
    const PolyVec3 vp = random_velocity(seed);
    const Poly4 pp = random_poly(seed + 200, 2, true);
    const Poly4 rp = random_poly(seed + 400, 2, true) + Poly4(3.0);
    const PhaseFields f{ScalarField::from_poly(rp), VectorField::from_poly(vp),
                        ScalarField::from_poly(pp)};
    for (Model model : {Model::Inviscid, Model::Viscous}) {
      for (Phase phase : {Phase::A, Phase::B}) {
        const Poly4 rm = symbolic_residual_mass(model, phase, mat, rp, vp, pp);
        const PolyVec3 rmom =
            symbolic_residual_momentum(model, phase, mat, rp, vp, pp);
        for (int k = 0; k < 5; ++k) {
          const Vec3 x = probe_point(rng);
          const double t = 0.12 * k;
          CHECK(std::abs(residual_mass(model, phase, mat, f, x, t) - rm(x, t)) <
                1e-8);
          const Vec3 mom = residual_momentum(model, phase, mat, f, x, t);
          for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(mom[i] - rmom[i](x, t)) < 1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("transition sources vanish when the coupling density is zero") {
  MaterialParams mat = test_material();
  mat.rho_0 = 0.0;
  const VectorField v = VectorField::from_poly(random_velocity(91));
  const ScalarField pi = ScalarField::from_poly(random_poly(291, 2, true));
  std::mt19937_64 rng(23);
  for (int k = 0; k < 5; ++k) {
    const Vec3 x = probe_point(rng);
    CHECK(std::abs(transition_source(Model::Viscous, Phase::B, mat, v, pi, x,
                                     0.3)) < 1e-14);
    CHECK(std::abs(transition_source(Model::Inviscid, Phase::B, mat, v, pi, x,
                                     0.3)) < 1e-14);
  }
}

TEST_CASE("manufactured shear state solves the viscous mass equation") {
  // v = (0.4 + 0.3 x2, 0, 0) is solenoidal; with pi = 1 + 0.2 x1 the
  // transition source is c (0.08 + 0.06 x2 - 0.045 mu_A), and
  // rho = 2 + source * t solves D_t rho = source exactly.
  const MaterialParams mat = test_material();
  const double c = mat.coupling();
  const Poly4 x1 = Poly4::var(0);
  const Poly4 x2 = Poly4::var(1);
  const Poly4 t = Poly4::var(3);
  const PolyVec3 vp{Poly4(0.4) + x2 * 0.3, Poly4(), Poly4()};
  const Poly4 pp = Poly4(1.0) + x1 * 0.2;
  const Poly4 source =
      (Poly4(0.08 - 0.045 * mat.mu_A) + x2 * 0.06) * c;
  const Poly4 rho_good = Poly4(2.0) + source * t;
  const Poly4 rho_flipped = Poly4(2.0) - source * t;

  const PhaseFields good{ScalarField::from_poly(rho_good),
                         VectorField::from_poly(vp),
                         ScalarField::from_poly(pp)};
  const PhaseFields flipped{ScalarField::from_poly(rho_flipped),
                            VectorField::from_poly(vp),
                            ScalarField::from_poly(pp)};
  std::mt19937_64 rng(29);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x = probe_point(rng);
    const double tt = 0.2 * k;
    CHECK(std::abs(residual_mass(Model::Viscous, Phase::A, mat, good, x, tt)) <
          1e-12);
    // A wrong-sign source leaves exactly twice the source as residual,
    // pinning the sign convention of the right-hand side.
    const double s = transition_source(Model::Viscous, Phase::A, mat, good.vel,
                                       good.pressure, x, tt);
    CHECK(std::abs(s - source(x, tt)) < 1e-12);
    const double r = residual_mass(Model::Viscous, Phase::A, mat, flipped, x, tt);
    CHECK(std::abs(r + 2.0 * s) < 1e-12);
  }
}

TEST_CASE("manufactured expansion state solves the inviscid mass equation") {
  // v = (0.3 x1, 0, 0), constant pi = 2: the source is 0.6 c, and
  // rho = 2 c + 0.5 exp(-0.3 t) solves the phase-B equation exactly.
  const MaterialParams mat = test_material();
  const double c = mat.coupling();
  const PolyVec3 vp{Poly4::var(0) * 0.3, Poly4(), Poly4()};
  const ScalarField rho(
      [c](const Vec3&, double t) { return 2.0 * c + 0.5 * std::exp(-0.3 * t); },
      [](const Vec3&, double) { return Vec3::Zero(); },
      [](const Vec3&, double t) { return -0.15 * std::exp(-0.3 * t); },
      [](const Vec3&, double) { return Mat3::Zero(); });
  const PhaseFields f{rho, VectorField::from_poly(vp), ScalarField::constant(2.0)};
  std::mt19937_64 rng(31);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x = probe_point(rng);
    const double tt = 0.15 * k;
    CHECK(std::abs(residual_mass(Model::Inviscid, Phase::B, mat, f, x, tt)) <
          1e-12);
    CHECK(std::abs(transition_source(Model::Inviscid, Phase::B, mat, f.vel,
                                     f.pressure, x, tt) -
                   0.6 * c) < 1e-13);
  }
}

TEST_CASE("conservative and system mass residuals agree for phase B") {
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(37);
  for (std::uint64_t seed = 700; seed < 702; ++seed) {
    const PhaseFields f{
        ScalarField::from_poly(random_poly(seed + 400, 2, true) + Poly4(3.0)),
        VectorField::from_poly(random_velocity(seed)),
        ScalarField::from_poly(random_poly(seed + 200, 2, true))};
    for (Model model : {Model::Inviscid, Model::Viscous}) {
      for (int k = 0; k < 10; ++k) {
        const Vec3 x = probe_point(rng);
        const double t = 0.1 * k;
        CHECK(std::abs(conservative_residual_mass(model, Phase::B, mat, f, x, t) -
                       residual_mass(model, Phase::B, mat, f, x, t)) < 1e-8);
      }
    }
  }
}

TEST_CASE("conservative and system residuals agree for solenoidal phase A") {
  const MaterialParams mat = test_material();
  const double c = mat.coupling();
  // The manufactured shear state from above: solenoidal velocity and a
  // density that satisfies the mass equation, which is exactly the regime
  // where the momentum forms must also coincide.
  const Poly4 x1 = Poly4::var(0);
  const Poly4 x2 = Poly4::var(1);
  const Poly4 t = Poly4::var(3);
  const PolyVec3 vp{Poly4(0.4) + x2 * 0.3, Poly4(), Poly4()};
  const Poly4 pp = Poly4(1.0) + x1 * 0.2;
  const Poly4 source = (Poly4(0.08 - 0.045 * mat.mu_A) + x2 * 0.06) * c;
  const PhaseFields f{ScalarField::from_poly(Poly4(2.0) + source * t),
                      VectorField::from_poly(vp), ScalarField::from_poly(pp)};
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x = probe_point(rng);
    const double tt = 0.1 * k;
    CHECK(std::abs(
              conservative_residual_mass(Model::Viscous, Phase::A, mat, f, x, tt) -
              residual_mass(Model::Viscous, Phase::A, mat, f, x, tt)) < 1e-8);
    const Vec3 diff =
        conservative_residual_momentum(Model::Viscous, Phase::A, mat, f, x, tt) -
        residual_momentum(Model::Viscous, Phase::A, mat, f, x, tt);
    CHECK(diff.norm() < 1e-8);
  }
}

TEST_CASE("conservative phase-A residuals reject compressible velocities") {
  const MaterialParams mat = test_material();
  const PhaseFields f{ScalarField::constant(2.0), vector_preset("identity"),
                      ScalarField::constant(1.0)};
  const Vec3 x(0.4, 0.1, -0.2);
  CHECK_THROWS_AS((void)conservative_residual_mass(Model::Viscous, Phase::A, mat,
                                                   f, x, 0.0),
                  RestrictionError);
  CHECK_THROWS_AS((void)conservative_residual_momentum(Model::Viscous, Phase::A,
                                                       mat, f, x, 0.0),
                  RestrictionError);
  // Phase B carries no such restriction.
  CHECK_NOTHROW(
      (void)conservative_residual_mass(Model::Viscous, Phase::B, mat, f, x, 0.0));
}

TEST_CASE("interface residual vanishes exactly at the stress balance") {
  MaterialParams mat = test_material();
  const double h = -2.0;  // unit sphere curvature under the sign convention
  const Vec3 n(0.0, 0.0, 1.0);
  const Vec3 x(0.0, 0.0, 1.0);
  const PhaseFields still_a{ScalarField::constant(1.0), VectorField::zero(),
                            ScalarField::constant(3.0 + mat.pi_0 * h)};
  const PhaseFields still_b{ScalarField::constant(1.0), VectorField::zero(),
                            ScalarField::constant(3.0)};
  CHECK(std::abs(residual_interface(Model::Inviscid, mat, still_a, still_b, x, n,
                                    h, 0.0)) < 1e-12);
  CHECK(std::abs(residual_interface(Model::Viscous, mat, still_a, still_b, x, n,
                                    h, 0.0)) < 1e-12);
  // Off balance by delta shifts the residual by exactly -delta via pi_A.
  const PhaseFields off_a{ScalarField::constant(1.0), VectorField::zero(),
                          ScalarField::constant(3.0 + mat.pi_0 * h + 0.25)};
  CHECK(std::abs(residual_interface(Model::Inviscid, mat, off_a, still_b, x, n, h,
                                    0.0) +
                 0.25) < 1e-12);
}

TEST_CASE("interface velocity reproduces the scalar stress balance") {
  const MaterialParams mat = test_material();
  const PhaseFields a{ScalarField::constant(2.0),
                      VectorField::from_poly(random_velocity(811)),
                      ScalarField::from_poly(random_poly(911, 2, true))};
  const PhaseFields b{ScalarField::constant(1.0),
                      VectorField::from_poly(random_velocity(823)),
                      ScalarField::from_poly(random_poly(923, 2, true))};
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double h = -2.0;
  for (int k = 0; k < 10; ++k) {
    const Vec3 n = Vec3(dist(rng), dist(rng), dist(rng)).normalized();
    const Vec3 x = n;  // probe on the unit sphere
    const double t = 0.1 * k;
    for (Model model : {Model::Inviscid, Model::Viscous}) {
      const Vec3 vs = interface_velocity(model, mat, a, b, x, n, h, t);
      const double ta =
          stress_interface(model, Phase::A, mat, a.vel, a.pressure, x, n, t);
      const double tb =
          stress_interface(model, Phase::B, mat, b.vel, b.pressure, x, n, t);
      const double flux =
          -ta * a.vel.value(x, t).dot(n) + tb * b.vel.value(x, t).dot(n);
      // Independent evaluation of the defining balance.
      CHECK((vs - flux / (mat.pi_0 * h) * n).norm() < 1e-8);
      // Back-substitution into the balance itself.
      CHECK(std::abs(mat.pi_0 * h * vs.dot(n) - flux) < 1e-10);
      if (model == Model::Inviscid) {
        // For the inviscid closure the scalar stress is minus the pressure.
        const double flux_pi = a.pressure.value(x, t) * a.vel.value(x, t).dot(n) -
                               b.pressure.value(x, t) * b.vel.value(x, t).dot(n);
        CHECK((vs - flux_pi / (mat.pi_0 * h) * n).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("flat interfaces cannot define a stress-balance velocity") {
  const MaterialParams mat = test_material();
  const PhaseFields a{ScalarField::constant(1.0), vector_preset("identity"),
                      ScalarField::constant(2.0)};
  const PhaseFields b{ScalarField::constant(1.0), vector_preset("identity"),
                      ScalarField::constant(1.0)};
  CHECK_THROWS_AS((void)interface_velocity(Model::Inviscid, mat, a, b,
                                           Vec3(0.0, 0.0, 1.0),
                                           Vec3(0.0, 0.0, 1.0), 1e-12, 0.0),
                  FlatInterfaceError);
}
