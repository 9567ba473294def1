#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "mfpt/fields.hpp"
#include "mfpt/surface.hpp"

namespace mfpt {

/// Axis-aligned half-space restriction x[axis] <= bound.
struct HalfSpaceCut {
  int axis = 2;
  double bound = 0.0;
};

/// Gauss-Legendre rule mapped onto [a, b].
inline void gauss_legendre_on(int n, double a, double b,
                              std::vector<double>& x, std::vector<double>& w) {
  gauss_legendre(n, x, w);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
}

/// Integral over the interval [a, b] (1D measure).
template <class F>
double integrate_interval(double a, double b, int n, F&& f) {
  if (b <= a) return 0.0;
  std::vector<double> x, w;
  gauss_legendre_on(n, a, b, x, w);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w[i] * f(x[i]);
  return acc;
}

/// Integral of f(x) over the spherical shell r_in <= |x - c| <= r_out
/// (r_in = 0 gives the ball). Gauss-Legendre in radius and polar angle,
/// trapezoid in azimuth.
template <class F>
double integrate_shell(const Vec3& c, double r_in, double r_out, int nr,
                       int nt, int np, F&& f) {
  std::vector<double> rx, rw, tx, tw;
  gauss_legendre_on(nr, r_in, r_out, rx, rw);
  gauss_legendre_on(nt, 0.0, std::numbers::pi, tx, tw);
  const double dphi = 2.0 * std::numbers::pi / np;
  double acc = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = rx[i];
    for (int j = 0; j < nt; ++j) {
      const double st = std::sin(tx[j]), ct = std::cos(tx[j]);
      double ring = 0.0;
      for (int k = 0; k < np; ++k) {
        const double phi = dphi * k;
        const Vec3 x = c + r * Vec3(st * std::cos(phi), st * std::sin(phi), ct);
        ring += f(x);
      }
      acc += rw[i] * tw[j] * r * r * st * dphi * ring;
    }
  }
  return acc;
}

template <class F>
double integrate_ball(const Vec3& c, double radius, int nr, int nt, int np,
                      F&& f) {
  return integrate_shell(c, 0.0, radius, nr, nt, np, std::forward<F>(f));
}

/// Ball integral restricted to the half-space x[axis] <= bound. Slices along
/// the cut axis (disk cross-sections are analytic in the slice coordinate,
/// so Gauss-Legendre keeps its accuracy).
template <class F>
double integrate_ball_cut(const Vec3& c, double radius, const HalfSpaceCut& cut,
                          int nz, int ns, int np, F&& f) {
  const double zc = cut.bound - c[cut.axis];
  const double zhi = std::min(zc, radius);
  if (zhi <= -radius) return 0.0;
  const int a = cut.axis, b1 = (cut.axis + 1) % 3, b2 = (cut.axis + 2) % 3;
  std::vector<double> zx, zw;
  gauss_legendre_on(nz, -radius, zhi, zx, zw);
  const double dphi = 2.0 * std::numbers::pi / np;
  double acc = 0.0;
  for (int i = 0; i < nz; ++i) {
    const double z = zx[i];
    const double disk_r = std::sqrt(std::max(0.0, radius * radius - z * z));
    std::vector<double> sx, sw;
    gauss_legendre_on(ns, 0.0, disk_r, sx, sw);
    double disk = 0.0;
    for (int j = 0; j < ns; ++j) {
      const double s = sx[j];
      double ring = 0.0;
      for (int k = 0; k < np; ++k) {
        const double phi = dphi * k;
        Vec3 x = c;
        x[a] += z;
        x[b1] += s * std::cos(phi);
        x[b2] += s * std::sin(phi);
        ring += f(x);
      }
      disk += sw[j] * s * dphi * ring;
    }
    acc += zw[i] * disk;
  }
  return acc;
}

/// Sphere-surface integral of f(x, outward n) over |x - c| = R, optionally
/// restricted to the cap x[axis] <= bound.
template <class F>
double integrate_sphere_surface(const Vec3& c, double R, int nt, int np, F&& f,
                                const std::optional<HalfSpaceCut>& cut = {}) {
  double t_lo = 0.0;
  int a = 2, b1 = 0, b2 = 1;
  if (cut) {
    a = cut->axis;
    b1 = (a + 1) % 3;
    b2 = (a + 2) % 3;
    const double zc = (cut->bound - c[a]) / R;
    if (zc <= -1.0) return 0.0;
    t_lo = (zc >= 1.0) ? 0.0 : std::acos(zc);  // theta in [t_lo, pi]
  }
  std::vector<double> tx, tw;
  gauss_legendre_on(nt, t_lo, std::numbers::pi, tx, tw);
  const double dphi = 2.0 * std::numbers::pi / np;
  double acc = 0.0;
  for (int j = 0; j < nt; ++j) {
    const double st = std::sin(tx[j]), ct = std::cos(tx[j]);
    double ring = 0.0;
    for (int k = 0; k < np; ++k) {
      const double phi = dphi * k;
      Vec3 n = Vec3::Zero();
      n[a] = ct;
      n[b1] = st * std::cos(phi);
      n[b2] = st * std::sin(phi);
      ring += f((c + R * n).eval(), n);
    }
    acc += tw[j] * R * R * st * dphi * ring;
  }
  return acc;
}

}  // namespace mfpt
