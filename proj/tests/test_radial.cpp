#include <doctest/doctest.h>

#include <cmath>
#include <random>

#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"
#include "mfpt/radial.hpp"
#include "mfpt/tensor_ops.hpp"

using namespace mfpt;

namespace {

// Spherically symmetric probe state v = u(r) e_r with u(r) = r^2 + 2r,
// i.e. v(x) = (|x| + 2) x, and pi(r) = 1 + 0.3 r^2. The velocity carries
// closed-form Jacobian and component Hessians:
//   J = (r + 2) I + x x^T / r,
//   H_i(j,k) = (d_ij x_k + d_ik x_j + d_jk x_i)/r - x_i x_j x_k / r^3.
VectorField radial_velocity() {
  auto value = [](const Vec3& x, double) -> Vec3 {
    return (x.norm() + 2.0) * x;
  };
  auto jac = [](const Vec3& x, double) -> Mat3 {
    const double r = x.norm();
    return (r + 2.0) * Mat3::Identity() + x * x.transpose() / r;
  };
  auto dt = [](const Vec3&, double) -> Vec3 { return Vec3::Zero(); };
  auto hess = [](int i, const Vec3& x, double) -> Mat3 {
    const double r = x.norm();
    Mat3 h;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        double v = -x[i] * x[j] * x[k] / (r * r * r);
        if (i == j) v += x[k] / r;
        if (i == k) v += x[j] / r;
        if (j == k) v += x[i] / r;
        h(j, k) = v;
      }
    }
    return h;
  };
  return VectorField(value, jac, dt, hess);
}

ScalarField radial_pressure() {
  return ScalarField::from_poly(Poly4(1.0) + poly_r2() * 0.3);
}

double u_of(double r) { return r * r + 2.0 * r; }
double dudr_of(double r) { return 2.0 * r + 2.0; }
double pi_of(double r) { return 1.0 + 0.3 * r * r; }
double dpi_of(double r) { return 0.6 * r; }

// d/dr of T_rr along the probe state: for the viscous closure
// T_rr = mu u' + lambda (u' + 2u/r) - pi with u'' = 2, the derivative is
// 2 mu + 4 lambda - pi'; the inviscid closure leaves -pi'.
double dtrr_of(Model model, const MaterialParams& mat, double r) {
  if (model == Model::Inviscid) return -dpi_of(r);
  const double u = u_of(r), dudr = dudr_of(r), d2u = 2.0;
  return mat.mu_B * d2u +
         mat.lambda_B * (d2u + 2.0 * dudr / r - 2.0 * u / (r * r)) - dpi_of(r);
}

MaterialParams test_material() {
  MaterialParams mat;
  mat.mu_A = 0.3;
  mat.mu_B = 0.2;
  mat.lambda_B = 0.15;
  mat.rho_0 = 0.7;
  mat.pi_0 = 2.0;
  return mat;
}

Vec3 random_probe(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  std::uniform_real_distribution<double> rad(0.8, 2.5);
  Vec3 e(dir(rng), dir(rng), dir(rng));
  while (e.norm() < 1e-3) e = Vec3(dir(rng), dir(rng), dir(rng));
  return rad(rng) * e.normalized();
}

}  // namespace

TEST_CASE("the radial probe state carries correct closed-form derivatives") {
  const VectorField v = radial_velocity();
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    const Vec3 x = random_probe(rng);
    for (int j = 0; j < 3; ++j) {
      Vec3 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec3 fd_col = (v.value(xp, 0.0) - v.value(xm, 0.0)) / (2.0 * h);
      const Mat3 fd_jac_p = v.jacobian(xp, 0.0);
      const Mat3 fd_jac_m = v.jacobian(xm, 0.0);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(v.jacobian(x, 0.0)(i, j) - fd_col[i]) < 1e-6);
        for (int c = 0; c < 3; ++c) {
          const double fd_hess = (fd_jac_p(i, c) - fd_jac_m(i, c)) / (2.0 * h);
          CHECK(std::abs(v.hessian(i, x, 0.0)(c, j) - fd_hess) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("radial divergence matches the cartesian divergence") {
  const VectorField v = radial_velocity();
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = random_probe(rng);
    const double r = x.norm();
    CHECK(std::abs(radial::divergence(u_of(r), dudr_of(r), r) -
                   v.divergence(x, 0.0)) < 1e-8);
  }
}

TEST_CASE("radial strain norm matches the cartesian rate of strain") {
  const VectorField v = radial_velocity();
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = random_probe(rng);
    const double r = x.norm();
    const Mat3 d = rate_of_strain(v, x, 0.0);
    CHECK(std::abs(radial::strain_norm_sq(u_of(r), dudr_of(r), r) -
                   d.squaredNorm()) < 1e-8);
  }
}

TEST_CASE("radial normal stresses match the cartesian stress tensor") {
  const VectorField v = radial_velocity();
  const ScalarField pi = radial_pressure();
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(13);
  for (Model model : {Model::Inviscid, Model::Viscous}) {
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = random_probe(rng);
      const double r = x.norm();
      const Vec3 e = x / r;
      const Mat3 stress = stress_bulk(model, Phase::B, mat, v, pi, x, 0.0);
      const double trr = e.dot(stress * e);
      CHECK(std::abs(radial::stress_rr(model, mat, u_of(r), dudr_of(r), r,
                                       pi_of(r)) -
                     trr) < 1e-8);
      CHECK(std::abs(radial::stress_perp(model, mat, u_of(r), dudr_of(r), r,
                                         pi_of(r)) -
                     (stress.trace() - trr)) < 1e-8);
    }
  }
}

TEST_CASE("radial stress divergence matches the cartesian stress divergence") {
  const VectorField v = radial_velocity();
  const ScalarField pi = radial_pressure();
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(17);
  for (Model model : {Model::Inviscid, Model::Viscous}) {
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = random_probe(rng);
      const double r = x.norm();
      const Vec3 e = x / r;
      const double trr =
          radial::stress_rr(model, mat, u_of(r), dudr_of(r), r, pi_of(r));
      const double t_perp =
          radial::stress_perp(model, mat, u_of(r), dudr_of(r), r, pi_of(r));
      const Vec3 div_t = stress_divergence(model, Phase::B, mat, v, pi, x, 0.0);
      CHECK(std::abs(radial::stress_divergence_r(trr, dtrr_of(model, mat, r),
                                                 t_perp, r) -
                     div_t.dot(e)) < 1e-8);
      // A spherically symmetric stress has no tangential divergence.
      CHECK((div_t - div_t.dot(e) * e).norm() < 1e-8);
    }
  }
}

TEST_CASE("radial stress power divergence matches the cartesian form") {
  const VectorField v = radial_velocity();
  const ScalarField pi = radial_pressure();
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(19);
  for (Model model : {Model::Inviscid, Model::Viscous}) {
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = random_probe(rng);
      const double r = x.norm();
      const double trr =
          radial::stress_rr(model, mat, u_of(r), dudr_of(r), r, pi_of(r));
      CHECK(std::abs(radial::stress_power_divergence(trr, dtrr_of(model, mat, r),
                                                     u_of(r), dudr_of(r), r) -
                     stress_power_divergence(model, Phase::B, mat, v, pi, x,
                                             0.0)) < 1e-8);
    }
  }
}

TEST_CASE("radial dissipation density matches both cartesian evaluations") {
  const VectorField v = radial_velocity();
  const ScalarField pi = radial_pressure();
  const MaterialParams mat = test_material();
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = random_probe(rng);
    const double r = x.norm();
    const double density =
        radial::dissipation_density(mat, u_of(r), dudr_of(r), r);

    // Direct form: mu |D(v)|^2 + lambda (div v)^2.
    const Mat3 d = rate_of_strain(v, x, 0.0);
    const double delta = v.divergence(x, 0.0);
    CHECK(std::abs(density - (mat.mu_B * d.squaredNorm() +
                              mat.lambda_B * delta * delta)) < 1e-8);

    // Entropy-production form: T : grad v + pi div v.
    const Mat3 stress =
        stress_bulk(Model::Viscous, Phase::B, mat, v, pi, x, 0.0);
    const Mat3 jac = v.jacobian(x, 0.0);
    const double contraction = stress.cwiseProduct(jac).sum();
    CHECK(std::abs(density - (contraction + pi.value(x, 0.0) * delta)) < 1e-8);
  }
}
