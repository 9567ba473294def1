#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfpt/errors.hpp"

namespace mfpt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// Exact polynomials in (x1, x2, x3, t).
//
// These back the manufactured-field presets and give fields with exact
// derivatives of any order, which is what the tight residual tolerances of
// the verification suites rely on.
// ---------------------------------------------------------------------------

class Poly4 {
 public:
  struct Term {
    double coeff = 0.0;
    std::array<int, 4> exp{0, 0, 0, 0};  // powers of x1, x2, x3, t
  };

  Poly4() = default;
  explicit Poly4(double c);
  explicit Poly4(std::vector<Term> terms);

  /// Monomial x_i (i in 0..2) or t (i == 3).
  static Poly4 var(int i);

  double operator()(const Vec3& x, double t) const;

  /// Exact partial derivative with respect to x_i (i in 0..2) or t (i == 3).
  Poly4 derivative(int i) const;

  Poly4 operator+(const Poly4& o) const;
  Poly4 operator-(const Poly4& o) const;
  Poly4 operator*(const Poly4& o) const;
  Poly4 operator*(double s) const;
  Poly4 operator-() const;
  Poly4& operator+=(const Poly4& o);

  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

inline Poly4 operator*(double s, const Poly4& p) { return p * s; }

/// Polynomial 3-vector field with exact component-wise algebra.
using PolyVec3 = std::array<Poly4, 3>;

PolyVec3 poly_grad(const Poly4& p);
Poly4 poly_divergence(const PolyVec3& v);
PolyVec3 poly_curl(const PolyVec3& v);
Poly4 poly_dot(const PolyVec3& a, const PolyVec3& b);
PolyVec3 poly_scale(const Poly4& s, const PolyVec3& v);
PolyVec3 poly_add(const PolyVec3& a, const PolyVec3& b);
/// |x|^2 as a polynomial (helper for radially structured fields).
Poly4 poly_r2();

/// Uniformly random polynomial of total spatial degree <= deg (plus optional
/// linear time dependence), with coefficients in [-scale, scale].
Poly4 random_poly(std::uint64_t seed, int deg, bool with_time, double scale = 1.0);

// ---------------------------------------------------------------------------
// Finite-difference fallback configuration.
//
// First derivatives use 4th-order central stencils with `step_first`
// (relative to `length_scale`). Second derivatives use 4th-order stencils
// with the larger `step_second`: with a 1e-6 step the round-off term
// eps/h^2 would reach 1e-4, far above the residual tolerances, so the
// second-derivative step sits near the 4th-order optimum (eps^(1/6)).
// ---------------------------------------------------------------------------

struct FdConfig {
  double step_first = 1e-6;
  double step_second = 2e-3;
  double length_scale = 1.0;
  double time_scale = 1.0;
};

// ---------------------------------------------------------------------------
// Analytic scalar field: a value callback over (x, t) with optional
// closed-form first/second derivatives. Missing derivatives fall back to
// finite differences of the value callback.
// ---------------------------------------------------------------------------

class ScalarField {
 public:
  using ValueFn = std::function<double(const Vec3&, double)>;
  using GradFn = std::function<Vec3(const Vec3&, double)>;
  using ScalFn = std::function<double(const Vec3&, double)>;
  using HessFn = std::function<Mat3(const Vec3&, double)>;

  ScalarField() = default;
  explicit ScalarField(ValueFn value);
  ScalarField(ValueFn value, GradFn grad, ScalFn dt, HessFn hess = nullptr);

  static ScalarField constant(double c);
  /// Polynomial field evaluated at x - origin (time is never shifted), with
  /// all derivatives exact.
  static ScalarField from_poly(const Poly4& p,
                               const Vec3& origin = Vec3::Zero());

  double value(const Vec3& x, double t) const;
  Vec3 grad(const Vec3& x, double t) const;
  double dt(const Vec3& x, double t) const;
  Mat3 hessian(const Vec3& x, double t) const;
  double laplacian(const Vec3& x, double t) const;

  bool has_closed_form() const { return static_cast<bool>(grad_); }
  void set_fd_config(const FdConfig& fd) { fd_ = fd; }
  const FdConfig& fd_config() const { return fd_; }

  /// Compares closed-form derivatives against internal finite differences at
  /// `n` seeded probe points in [-1,1]^3 x [0,1]; throws FieldError beyond
  /// `rel_tol`. Runs automatically at construction in debug builds.
  void validate_derivatives(std::uint64_t seed = 20240901, int n = 10,
                            double rel_tol = 1e-6) const;

 private:
  ValueFn value_;
  GradFn grad_;
  ScalFn dt_;
  HessFn hess_;
  FdConfig fd_;
};

// ---------------------------------------------------------------------------
// Analytic vector field with the derivative data the flow operators need:
// Jacobian, time derivative, and per-component Hessians (for stress
// divergences). Same closed-form-else-finite-difference policy.
// ---------------------------------------------------------------------------

class VectorField {
 public:
  using ValueFn = std::function<Vec3(const Vec3&, double)>;
  using JacFn = std::function<Mat3(const Vec3&, double)>;   // J(i,j) = d v_i / d x_j
  using VecFn = std::function<Vec3(const Vec3&, double)>;
  using CompHessFn = std::function<Mat3(int, const Vec3&, double)>;

  VectorField() = default;
  explicit VectorField(ValueFn value);
  VectorField(ValueFn value, JacFn jac, VecFn dt, CompHessFn hess = nullptr);

  static VectorField constant(const Vec3& c);
  static VectorField zero();
  /// Polynomial field evaluated at x - origin (time is never shifted), with
  /// all derivatives exact.
  static VectorField from_poly(const PolyVec3& p,
                               const Vec3& origin = Vec3::Zero());

  Vec3 value(const Vec3& x, double t) const;
  Mat3 jacobian(const Vec3& x, double t) const;
  Vec3 dt(const Vec3& x, double t) const;
  /// Hessian of component i.
  Mat3 hessian(int i, const Vec3& x, double t) const;

  double divergence(const Vec3& x, double t) const;
  Vec3 laplacian(const Vec3& x, double t) const;
  /// Gradient of the divergence (needs second derivatives).
  Vec3 grad_divergence(const Vec3& x, double t) const;
  Vec3 curl(const Vec3& x, double t) const;

  bool has_closed_form() const { return static_cast<bool>(jac_); }
  void set_fd_config(const FdConfig& fd) { fd_ = fd; }
  const FdConfig& fd_config() const { return fd_; }

  void validate_derivatives(std::uint64_t seed = 20240902, int n = 10,
                            double rel_tol = 1e-6) const;

 private:
  ValueFn value_;
  JacFn jac_;
  VecFn dt_;
  CompHessFn hess_;
  FdConfig fd_;
};

// ---------------------------------------------------------------------------
// Named presets and the JSON field catalog.
//
// JSON grammar (scalar):
//   {"kind":"polynomial","terms":[{"coeff":1.0,"exp":[2,0,0,0]}, ...]}
//   {"kind":"constant","value":2.5}
//   {"kind":"preset","name":"<scalar preset>"}
// Vector fields take {"kind":"components","components":[s,s,s]} with scalar
// specs, or {"kind":"preset","name":"<vector preset>"}.
// Unknown keys and unknown preset names are ConfigErrors.
// ---------------------------------------------------------------------------

ScalarField scalar_field_from_json_text(const std::string& json_text);
VectorField vector_field_from_json_text(const std::string& json_text);

/// Vector presets: "zero", "identity" (v = x), "rotation_z" (e3 x x),
/// "shear_xy" (v = (y,0,0)), "trig_wave".
VectorField vector_preset(const std::string& name);
/// Scalar presets: "one", "x3_squared", "radial_quadratic" (|x|^2),
/// "trig_bump".
ScalarField scalar_preset(const std::string& name);

/// Random solenoidal polynomial field, built as curl of a random polynomial
/// potential (exactly divergence-free).
PolyVec3 random_solenoidal_poly(std::uint64_t seed, int deg, double scale = 1.0);

/// Pointwise linear combination a*u + b*w. Derivatives delegate to the
/// operands, so closed forms are preserved where both sides have them.
VectorField combine(double a, const VectorField& u, double b,
                    const VectorField& w);

}  // namespace mfpt
