// Microbenchmarks for the hot paths: surface quadrature, pointwise residual
// evaluation, moving-domain transport checks, and the simulator step.

#include <benchmark/benchmark.h>

#include <cmath>

#include "mfpt/fields.hpp"
#include "mfpt/material.hpp"
#include "mfpt/simulator.hpp"
#include "mfpt/surface.hpp"
#include "mfpt/surface_calc.hpp"
#include "mfpt/tensor_ops.hpp"
#include "mfpt/transport.hpp"

namespace {

using namespace mfpt;

MaterialParams bench_material() {
  MaterialParams mat;
  mat.mu_A = 0.3;
  mat.mu_B = 0.2;
  mat.lambda_B = 0.15;
  mat.rho_0 = 0.7;
  mat.pi_0 = 2.0;
  return mat;
}

PhaseFields bench_fields() {
  return PhaseFields{
      ScalarField::from_poly(random_poly(31, 2, true, 0.5) + Poly4(2.0)),
      VectorField::from_poly(PolyVec3{random_poly(32, 2, false, 0.5),
                                      random_poly(33, 2, false, 0.5),
                                      random_poly(34, 2, false, 0.5)}),
      ScalarField::from_poly(random_poly(35, 2, false, 0.5) + Poly4(1.0))};
}

void BM_sphere_divergence_integral(benchmark::State& state) {
  const ClosedSurface sphere = ClosedSurface::sphere(1.0, 64, 128);
  const VectorField identity = vector_preset("identity");
  for (auto _ : state) {
    const double integral =
        sphere.integrate(surface_divergence(sphere, identity, 0.0));
    benchmark::DoNotOptimize(integral);
  }
}
BENCHMARK(BM_sphere_divergence_integral);

void BM_tri_mesh_divergence_residual(benchmark::State& state) {
  const ClosedSurface surf = ClosedSurface::tri_ellipsoid(1.2, 1.0, 0.8, 3);
  const VectorField probe = VectorField::from_poly(
      PolyVec3{random_poly(11, 2, false, 0.7), random_poly(12, 2, false, 0.7),
               random_poly(13, 2, false, 0.7)});
  for (auto _ : state) {
    const double residual = divergence_theorem_residual(surf, probe, 0.0);
    benchmark::DoNotOptimize(residual);
  }
}
BENCHMARK(BM_tri_mesh_divergence_residual);

void BM_stress_divergence(benchmark::State& state) {
  const MaterialParams mat = bench_material();
  const PhaseFields f = bench_fields();
  const Vec3 p(0.3, -0.4, 0.5);
  for (auto _ : state) {
    const Vec3 div = stress_divergence(Model::Viscous, Phase::B, mat, f.vel,
                                       f.pressure, p, 0.25);
    benchmark::DoNotOptimize(div);
  }
}
BENCHMARK(BM_stress_divergence);

void BM_residual_momentum(benchmark::State& state) {
  const MaterialParams mat = bench_material();
  const PhaseFields f = bench_fields();
  const Vec3 p(0.3, -0.4, 0.5);
  for (auto _ : state) {
    const Vec3 r = residual_momentum(Model::Viscous, Phase::B, mat, f, p, 0.25);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_residual_momentum);

void BM_bulk_transport_residual(benchmark::State& state) {
  const double rate = 0.2;
  const TimeFunction radius = TimeFunction::linear(1.0, rate);
  const VectorField growth(
      [rate](const Vec3& x, double t) -> Vec3 {
        return x * (rate / (1.0 + rate * t));
      },
      [rate](const Vec3&, double t) -> Mat3 {
        return Mat3::Identity() * (rate / (1.0 + rate * t));
      },
      [rate](const Vec3& x, double t) -> Vec3 {
        const double r = 1.0 + rate * t;
        return x * (-rate * rate / (r * r));
      },
      [](int, const Vec3&, double) -> Mat3 { return Mat3::Zero(); });
  const MovingDomain ball = MovingDomain::ball(radius, growth);
  const ScalarField f = ScalarField::from_poly(
      Poly4(1.0) + 0.3 * Poly4::var(0) + 0.1 * Poly4::var(2) * Poly4::var(2));
  for (auto _ : state) {
    const TransportResidual r = bulk_transport_residual(ball, f, 0.5, 1e-2);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_bulk_transport_residual);

void BM_simulator_step(benchmark::State& state) {
  SimulatorConfig cfg;
  cfg.model = Model::Viscous;
  cfg.geometry = GeometryKind::Spherical;
  cfg.material.mu_A = 0.01;
  cfg.material.mu_B = 5e-3;
  cfg.material.lambda_B = 5e-3;
  cfg.cells_b = static_cast<int>(state.range(0));
  cfg.dt = 1e-4;
  cfg.t_end = 1e6;  // never reached; the loop owns the step count
  cfg.vel_b0 = [](double r) {
    const double arg = (r - 1.5) / 0.12;
    return 0.05 * std::exp(-arg * arg);
  };
  Simulator1D sim(cfg);
  for (auto _ : state) {
    sim.step();
    benchmark::DoNotOptimize(sim.time());
  }
  state.SetItemsProcessed(state.iterations() * cfg.cells_b);
}
BENCHMARK(BM_simulator_step)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
