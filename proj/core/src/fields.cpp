#include "mfpt/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mfpt {

namespace {

double int_pow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// 4th-order central first-derivative stencil: offsets and weights, to be
// divided by 12 h.
constexpr std::array<double, 4> kD1Off{2.0, 1.0, -1.0, -2.0};
constexpr std::array<double, 4> kD1W{-1.0, 8.0, -8.0, 1.0};

// 4th-order central second-derivative stencil, to be divided by 12 h^2.
constexpr std::array<double, 5> kD2Off{2.0, 1.0, 0.0, -1.0, -2.0};
constexpr std::array<double, 5> kD2W{-1.0, 16.0, -30.0, 16.0, -1.0};

template <typename F>
double fd_d1(const F& f, double h) {
  double acc = 0.0;
  for (std::size_t k = 0; k < kD1Off.size(); ++k) acc += kD1W[k] * f(kD1Off[k] * h);
  return acc / (12.0 * h);
}

template <typename F>
double fd_d2(const F& f, double h) {
  double acc = 0.0;
  for (std::size_t k = 0; k < kD2Off.size(); ++k) acc += kD2W[k] * f(kD2Off[k] * h);
  return acc / (12.0 * h * h);
}

template <typename F>
double fd_d1d1(const F& f, double h) {  // mixed second derivative
  double acc = 0.0;
  for (std::size_t a = 0; a < kD1Off.size(); ++a)
    for (std::size_t b = 0; b < kD1Off.size(); ++b)
      acc += kD1W[a] * kD1W[b] * f(kD1Off[a] * h, kD1Off[b] * h);
  return acc / (144.0 * h * h);
}

}  // namespace

// ---------------------------------------------------------------------------
// Poly4
// ---------------------------------------------------------------------------

Poly4::Poly4(double c) {
  if (c != 0.0) terms_.push_back({c, {0, 0, 0, 0}});
}

Poly4::Poly4(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

Poly4 Poly4::var(int i) {
  Term t;
  t.coeff = 1.0;
  t.exp[i] = 1;
  return Poly4({t});
}

void Poly4::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.exp < b.exp; });
  std::vector<Term> merged;
  for (const Term& t : terms_) {
    if (!merged.empty() && merged.back().exp == t.exp)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return t.coeff == 0.0; }),
               merged.end());
  terms_ = std::move(merged);
}

double Poly4::operator()(const Vec3& x, double t) const {
  double acc = 0.0;
  for (const Term& m : terms_) {
    acc += m.coeff * int_pow(x[0], m.exp[0]) * int_pow(x[1], m.exp[1]) *
           int_pow(x[2], m.exp[2]) * int_pow(t, m.exp[3]);
  }
  return acc;
}

Poly4 Poly4::derivative(int i) const {
  std::vector<Term> out;
  for (const Term& m : terms_) {
    if (m.exp[i] == 0) continue;
    Term d = m;
    d.coeff *= m.exp[i];
    d.exp[i] -= 1;
    out.push_back(d);
  }
  return Poly4(std::move(out));
}

Poly4 Poly4::operator+(const Poly4& o) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return Poly4(std::move(out));
}

Poly4 Poly4::operator-(const Poly4& o) const { return *this + (-o); }

Poly4 Poly4::operator-() const {
  std::vector<Term> out = terms_;
  for (Term& m : out) m.coeff = -m.coeff;
  return Poly4(std::move(out));
}

Poly4 Poly4::operator*(const Poly4& o) const {
  std::vector<Term> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const Term& a : terms_)
    for (const Term& b : o.terms_) {
      Term m;
      m.coeff = a.coeff * b.coeff;
      for (int i = 0; i < 4; ++i) m.exp[i] = a.exp[i] + b.exp[i];
      out.push_back(m);
    }
  return Poly4(std::move(out));
}

Poly4 Poly4::operator*(double s) const {
  std::vector<Term> out = terms_;
  for (Term& m : out) m.coeff *= s;
  return Poly4(std::move(out));
}

Poly4& Poly4::operator+=(const Poly4& o) {
  *this = *this + o;
  return *this;
}

int Poly4::degree() const {
  int d = 0;
  for (const Term& m : terms_)
    d = std::max(d, m.exp[0] + m.exp[1] + m.exp[2] + m.exp[3]);
  return d;
}

PolyVec3 poly_grad(const Poly4& p) {
  return {p.derivative(0), p.derivative(1), p.derivative(2)};
}

Poly4 poly_divergence(const PolyVec3& v) {
  return v[0].derivative(0) + v[1].derivative(1) + v[2].derivative(2);
}

PolyVec3 poly_curl(const PolyVec3& v) {
  return {v[2].derivative(1) - v[1].derivative(2),
          v[0].derivative(2) - v[2].derivative(0),
          v[1].derivative(0) - v[0].derivative(1)};
}

Poly4 poly_dot(const PolyVec3& a, const PolyVec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

PolyVec3 poly_scale(const Poly4& s, const PolyVec3& v) {
  return {s * v[0], s * v[1], s * v[2]};
}

PolyVec3 poly_add(const PolyVec3& a, const PolyVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

Poly4 poly_r2() {
  Poly4 x = Poly4::var(0), y = Poly4::var(1), z = Poly4::var(2);
  return x * x + y * y + z * z;
}

Poly4 random_poly(std::uint64_t seed, int deg, bool with_time, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-scale, scale);
  std::vector<Poly4::Term> terms;
  for (int i = 0; i <= deg; ++i)
    for (int j = 0; j + i <= deg; ++j)
      for (int k = 0; k + j + i <= deg; ++k)
        for (int l = 0; l <= (with_time ? 1 : 0); ++l) {
          Poly4::Term t;
          t.coeff = coeff(rng);
          t.exp = {i, j, k, l};
          terms.push_back(t);
        }
  return Poly4(std::move(terms));
}

PolyVec3 random_solenoidal_poly(std::uint64_t seed, int deg, double scale) {
  PolyVec3 potential{random_poly(seed * 3 + 0, deg + 1, false, scale),
                     random_poly(seed * 3 + 1, deg + 1, false, scale),
                     random_poly(seed * 3 + 2, deg + 1, false, scale)};
  return poly_curl(potential);
}

// ---------------------------------------------------------------------------
// ScalarField
// ---------------------------------------------------------------------------

ScalarField::ScalarField(ValueFn value) : value_(std::move(value)) {}

ScalarField::ScalarField(ValueFn value, GradFn grad, ScalFn dt, HessFn hess)
    : value_(std::move(value)),
      grad_(std::move(grad)),
      dt_(std::move(dt)),
      hess_(std::move(hess)) {
#ifndef NDEBUG
  validate_derivatives();
#endif
}

ScalarField ScalarField::constant(double c) {
  return ScalarField([c](const Vec3&, double) { return c; },
                     [](const Vec3&, double) { return Vec3::Zero().eval(); },
                     [](const Vec3&, double) { return 0.0; },
                     [](const Vec3&, double) { return Mat3::Zero().eval(); });
}

ScalarField ScalarField::from_poly(const Poly4& p, const Vec3& origin) {
  auto gx = p.derivative(0), gy = p.derivative(1), gz = p.derivative(2);
  auto pt = p.derivative(3);
  std::array<std::array<Poly4, 3>, 3> h;
  const std::array<Poly4, 3> g{gx, gy, gz};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = g[i].derivative(j);
  const Vec3 o = origin;
  return ScalarField(
      [p, o](const Vec3& x, double t) { return p(x - o, t); },
      [gx, gy, gz, o](const Vec3& x, double t) {
        const Vec3 y = x - o;
        return Vec3(gx(y, t), gy(y, t), gz(y, t));
      },
      [pt, o](const Vec3& x, double t) { return pt(x - o, t); },
      [h, o](const Vec3& x, double t) {
        const Vec3 y = x - o;
        Mat3 m;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m(i, j) = h[i][j](y, t);
        return m;
      });
}

double ScalarField::value(const Vec3& x, double t) const {
  if (!value_) throw FieldError("scalar field: missing value callback");
  return value_(x, t);
}

Vec3 ScalarField::grad(const Vec3& x, double t) const {
  if (grad_) return grad_(x, t);
  const double h = fd_.step_first * fd_.length_scale;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    g[a] = fd_d1(
        [&](double s) {
          Vec3 xs = x;
          xs[a] += s;
          return value_(xs, t);
        },
        h);
  }
  return g;
}

double ScalarField::dt(const Vec3& x, double t) const {
  if (dt_) return dt_(x, t);
  const double h = fd_.step_first * fd_.time_scale;
  return fd_d1([&](double s) { return value_(x, t + s); }, h);
}

Mat3 ScalarField::hessian(const Vec3& x, double t) const {
  if (hess_) return hess_(x, t);
  Mat3 m;
  if (grad_) {
    // Differentiate the closed-form gradient: one finite difference, small step.
    const double h = fd_.step_first * fd_.length_scale;
    for (int j = 0; j < 3; ++j) {
      Vec3 col = Vec3::Zero();
      for (std::size_t k = 0; k < kD1Off.size(); ++k) {
        Vec3 xs = x;
        xs[j] += kD1Off[k] * h;
        col += kD1W[k] * grad_(xs, t);
      }
      col /= 12.0 * h;
      for (int i = 0; i < 3; ++i) m(i, j) = col[i];
    }
    return 0.5 * (m + m.transpose());
  }
  const double h = fd_.step_second * fd_.length_scale;
  for (int a = 0; a < 3; ++a) {
    m(a, a) = fd_d2(
        [&](double s) {
          Vec3 xs = x;
          xs[a] += s;
          return value_(xs, t);
        },
        h);
    for (int b = a + 1; b < 3; ++b) {
      m(a, b) = m(b, a) = fd_d1d1(
          [&](double sa, double sb) {
            Vec3 xs = x;
            xs[a] += sa;
            xs[b] += sb;
            return value_(xs, t);
          },
          h);
    }
  }
  return m;
}

double ScalarField::laplacian(const Vec3& x, double t) const {
  return hessian(x, t).trace();
}

void ScalarField::validate_derivatives(std::uint64_t seed, int n,
                                       double rel_tol) const {
  if (!grad_ && !dt_ && !hess_) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ut(0.0, 1.0);
  ScalarField fd_only(value_);
  fd_only.set_fd_config(fd_);
  for (int k = 0; k < n; ++k) {
    const Vec3 x(ux(rng), ux(rng), ux(rng));
    const double t = ut(rng);
    if (grad_) {
      const Vec3 a = grad_(x, t), b = fd_only.grad(x, t);
      if ((a - b).norm() > rel_tol * std::max(1.0, a.norm()))
        throw FieldError("scalar field: closed-form gradient disagrees with "
                         "finite differences");
    }
    if (dt_) {
      const double a = dt_(x, t), b = fd_only.dt(x, t);
      if (std::abs(a - b) > rel_tol * std::max(1.0, std::abs(a)))
        throw FieldError("scalar field: closed-form time derivative disagrees "
                         "with finite differences");
    }
    if (hess_) {
      const Mat3 a = hess_(x, t), b = fd_only.hessian(x, t);
      if ((a - b).norm() > rel_tol * std::max(1.0, a.norm()))
        throw FieldError("scalar field: closed-form Hessian disagrees with "
                         "finite differences");
    }
  }
}

// ---------------------------------------------------------------------------
// VectorField
// ---------------------------------------------------------------------------

VectorField::VectorField(ValueFn value) : value_(std::move(value)) {}

VectorField::VectorField(ValueFn value, JacFn jac, VecFn dt, CompHessFn hess)
    : value_(std::move(value)),
      jac_(std::move(jac)),
      dt_(std::move(dt)),
      hess_(std::move(hess)) {
#ifndef NDEBUG
  validate_derivatives();
#endif
}

VectorField VectorField::constant(const Vec3& c) {
  return VectorField([c](const Vec3&, double) { return c; },
                     [](const Vec3&, double) { return Mat3::Zero().eval(); },
                     [](const Vec3&, double) { return Vec3::Zero().eval(); },
                     [](int, const Vec3&, double) { return Mat3::Zero().eval(); });
}

VectorField VectorField::zero() { return constant(Vec3::Zero()); }

VectorField VectorField::from_poly(const PolyVec3& p, const Vec3& origin) {
  std::array<std::array<Poly4, 3>, 3> jac;  // jac[i][j] = d p_i / d x_j
  std::array<Poly4, 3> pt;
  std::array<std::array<std::array<Poly4, 3>, 3>, 3> hess;
  for (int i = 0; i < 3; ++i) {
    pt[i] = p[i].derivative(3);
    for (int j = 0; j < 3; ++j) {
      jac[i][j] = p[i].derivative(j);
      for (int k = 0; k < 3; ++k) hess[i][j][k] = jac[i][j].derivative(k);
    }
  }
  const Vec3 o = origin;
  return VectorField(
      [p, o](const Vec3& x, double t) {
        const Vec3 y = x - o;
        return Vec3(p[0](y, t), p[1](y, t), p[2](y, t));
      },
      [jac, o](const Vec3& x, double t) {
        const Vec3 y = x - o;
        Mat3 m;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m(i, j) = jac[i][j](y, t);
        return m;
      },
      [pt, o](const Vec3& x, double t) {
        const Vec3 y = x - o;
        return Vec3(pt[0](y, t), pt[1](y, t), pt[2](y, t));
      },
      [hess, o](int i, const Vec3& x, double t) {
        const Vec3 y = x - o;
        Mat3 m;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) m(j, k) = hess[i][j][k](y, t);
        return m;
      });
}

Vec3 VectorField::value(const Vec3& x, double t) const {
  if (!value_) throw FieldError("vector field: missing value callback");
  return value_(x, t);
}

Mat3 VectorField::jacobian(const Vec3& x, double t) const {
  if (jac_) return jac_(x, t);
  const double h = fd_.step_first * fd_.length_scale;
  Mat3 m;
  for (int j = 0; j < 3; ++j) {
    Vec3 col = Vec3::Zero();
    for (std::size_t k = 0; k < kD1Off.size(); ++k) {
      Vec3 xs = x;
      xs[j] += kD1Off[k] * h;
      col += kD1W[k] * value_(xs, t);
    }
    col /= 12.0 * h;
    for (int i = 0; i < 3; ++i) m(i, j) = col[i];
  }
  return m;
}

Vec3 VectorField::dt(const Vec3& x, double t) const {
  if (dt_) return dt_(x, t);
  const double h = fd_.step_first * fd_.time_scale;
  Vec3 acc = Vec3::Zero();
  for (std::size_t k = 0; k < kD1Off.size(); ++k)
    acc += kD1W[k] * value_(x, t + kD1Off[k] * h);
  return acc / (12.0 * h);
}

Mat3 VectorField::hessian(int i, const Vec3& x, double t) const {
  if (hess_) return hess_(i, x, t);
  if (jac_) {
    const double h = fd_.step_first * fd_.length_scale;
    Mat3 m;
    for (int k = 0; k < 3; ++k) {
      Vec3 row = Vec3::Zero();  // d/dx_k of row i of the Jacobian
      for (std::size_t s = 0; s < kD1Off.size(); ++s) {
        Vec3 xs = x;
        xs[k] += kD1Off[s] * h;
        row += kD1W[s] * jac_(xs, t).row(i).transpose();
      }
      row /= 12.0 * h;
      for (int j = 0; j < 3; ++j) m(j, k) = row[j];
    }
    return 0.5 * (m + m.transpose());
  }
  const double h = fd_.step_second * fd_.length_scale;
  Mat3 m;
  for (int a = 0; a < 3; ++a) {
    m(a, a) = fd_d2(
        [&](double s) {
          Vec3 xs = x;
          xs[a] += s;
          return value_(xs, t)[i];
        },
        h);
    for (int b = a + 1; b < 3; ++b) {
      m(a, b) = m(b, a) = fd_d1d1(
          [&](double sa, double sb) {
            Vec3 xs = x;
            xs[a] += sa;
            xs[b] += sb;
            return value_(xs, t)[i];
          },
          h);
    }
  }
  return m;
}

double VectorField::divergence(const Vec3& x, double t) const {
  return jacobian(x, t).trace();
}

Vec3 VectorField::laplacian(const Vec3& x, double t) const {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = hessian(i, x, t).trace();
  return out;
}

Vec3 VectorField::grad_divergence(const Vec3& x, double t) const {
  // d_i (div v) = sum_j d_i d_j v_j = sum_j H_j(i, j)
  Vec3 out = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const Mat3 hj = hessian(j, x, t);
    for (int i = 0; i < 3; ++i) out[i] += hj(i, j);
  }
  return out;
}

Vec3 VectorField::curl(const Vec3& x, double t) const {
  const Mat3 j = jacobian(x, t);
  return Vec3(j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1));
}

void VectorField::validate_derivatives(std::uint64_t seed, int n,
                                       double rel_tol) const {
  if (!jac_ && !dt_ && !hess_) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ut(0.0, 1.0);
  VectorField fd_only(value_);
  fd_only.set_fd_config(fd_);
  for (int k = 0; k < n; ++k) {
    const Vec3 x(ux(rng), ux(rng), ux(rng));
    const double t = ut(rng);
    if (jac_) {
      const Mat3 a = jac_(x, t), b = fd_only.jacobian(x, t);
      if ((a - b).norm() > rel_tol * std::max(1.0, a.norm()))
        throw FieldError("vector field: closed-form Jacobian disagrees with "
                         "finite differences");
    }
    if (dt_) {
      const Vec3 a = dt_(x, t), b = fd_only.dt(x, t);
      if ((a - b).norm() > rel_tol * std::max(1.0, a.norm()))
        throw FieldError("vector field: closed-form time derivative disagrees "
                         "with finite differences");
    }
    if (hess_) {
      for (int i = 0; i < 3; ++i) {
        const Mat3 a = hess_(i, x, t), b = fd_only.hessian(i, x, t);
        if ((a - b).norm() > rel_tol * std::max(1.0, a.norm()))
          throw FieldError("vector field: closed-form component Hessian "
                           "disagrees with finite differences");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Presets and JSON catalog
// ---------------------------------------------------------------------------

ScalarField scalar_preset(const std::string& name) {
  if (name == "one") return ScalarField::constant(1.0);
  if (name == "x3_squared") {
    Poly4 z = Poly4::var(2);
    return ScalarField::from_poly(z * z);
  }
  if (name == "radial_quadratic") return ScalarField::from_poly(poly_r2());
  if (name == "trig_bump") {
    // sin(x1 + 2 x2 - x3 + t/2), with exact derivatives.
    const Vec3 k(1.0, 2.0, -1.0);
    const double w = 0.5;
    auto arg = [k, w](const Vec3& x, double t) { return k.dot(x) + w * t; };
    return ScalarField(
        [arg](const Vec3& x, double t) { return std::sin(arg(x, t)); },
        [arg, k](const Vec3& x, double t) {
          return (std::cos(arg(x, t)) * k).eval();
        },
        [arg, w](const Vec3& x, double t) { return w * std::cos(arg(x, t)); },
        [arg, k](const Vec3& x, double t) {
          return (-std::sin(arg(x, t)) * (k * k.transpose())).eval();
        });
  }
  throw ConfigError("field catalog: unknown scalar preset '" + name + "'");
}

VectorField vector_preset(const std::string& name) {
  if (name == "zero") return VectorField::zero();
  if (name == "identity") {
    return VectorField::from_poly(
        {Poly4::var(0), Poly4::var(1), Poly4::var(2)});
  }
  if (name == "rotation_z") {
    return VectorField::from_poly({-Poly4::var(1), Poly4::var(0), Poly4(0.0)});
  }
  if (name == "shear_xy") {
    return VectorField::from_poly({Poly4::var(1), Poly4(0.0), Poly4(0.0)});
  }
  if (name == "trig_wave") {
    // (sin x2, sin x3, sin x1): solenoidal, exact derivatives.
    return VectorField(
        [](const Vec3& x, double) {
          return Vec3(std::sin(x[1]), std::sin(x[2]), std::sin(x[0]));
        },
        [](const Vec3& x, double) {
          Mat3 j = Mat3::Zero();
          j(0, 1) = std::cos(x[1]);
          j(1, 2) = std::cos(x[2]);
          j(2, 0) = std::cos(x[0]);
          return j;
        },
        [](const Vec3&, double) { return Vec3::Zero().eval(); },
        [](int i, const Vec3& x, double) {
          Mat3 h = Mat3::Zero();
          const int dep = (i + 1) % 3;  // component i depends on x_{i+1}
          h(dep, dep) = -std::sin(x[dep]);
          return h;
        });
  }
  throw ConfigError("field catalog: unknown vector preset '" + name + "'");
}

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok)
      throw ConfigError("field catalog: unknown key '" + it.key() + "' in " +
                        where);
  }
}

Poly4 poly_from_json(const json& j, const std::string& where) {
  if (!j.contains("terms") || !j["terms"].is_array())
    throw ConfigError("field catalog: polynomial needs a 'terms' array in " +
                      where);
  std::vector<Poly4::Term> terms;
  for (const auto& jt : j["terms"]) {
    check_keys(jt, {"coeff", "exp"}, where + ".terms[]");
    if (!jt.contains("coeff") || !jt.contains("exp"))
      throw ConfigError("field catalog: each term needs 'coeff' and 'exp' in " +
                        where);
    Poly4::Term t;
    t.coeff = jt["coeff"].get<double>();
    const auto e = jt["exp"].get<std::vector<int>>();
    if (e.size() != 4)
      throw ConfigError("field catalog: 'exp' must have 4 entries in " + where);
    for (int i = 0; i < 4; ++i) {
      if (e[i] < 0)
        throw ConfigError("field catalog: negative exponent in " + where);
      t.exp[i] = e[i];
    }
    terms.push_back(t);
  }
  return Poly4(std::move(terms));
}

ScalarField scalar_field_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("field catalog: expected an object with 'kind' in " +
                      where);
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, where);
    return ScalarField::constant(j.at("value").get<double>());
  }
  if (kind == "polynomial") {
    check_keys(j, {"kind", "terms"}, where);
    return ScalarField::from_poly(poly_from_json(j, where));
  }
  if (kind == "preset") {
    check_keys(j, {"kind", "name"}, where);
    return scalar_preset(j.at("name").get<std::string>());
  }
  throw ConfigError("field catalog: unknown scalar kind '" + kind + "' in " +
                    where);
}

}  // namespace

ScalarField scalar_field_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field catalog: invalid JSON: ") + e.what());
  }
  return scalar_field_from_json(j, "scalar field");
}

VectorField vector_field_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field catalog: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("field catalog: expected an object with 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "preset") {
    check_keys(j, {"kind", "name"}, "vector field");
    return vector_preset(j.at("name").get<std::string>());
  }
  if (kind == "components") {
    check_keys(j, {"kind", "components"}, "vector field");
    const auto& comps = j.at("components");
    if (!comps.is_array() || comps.size() != 3)
      throw ConfigError("field catalog: 'components' must be an array of 3");
    // Components given as polynomials combine into a single exact PolyVec3;
    // otherwise fall back to wrapping three scalar fields.
    bool all_poly = true;
    for (const auto& c : comps)
      if (!(c.is_object() && c.contains("kind") &&
            (c["kind"] == "polynomial" || c["kind"] == "constant")))
        all_poly = false;
    if (all_poly) {
      PolyVec3 p;
      for (int i = 0; i < 3; ++i) {
        const auto& c = comps[i];
        p[i] = (c["kind"] == "constant") ? Poly4(c.at("value").get<double>())
                                         : poly_from_json(c, "component");
      }
      return VectorField::from_poly(p);
    }
    auto s0 = scalar_field_from_json(comps[0], "component 0");
    auto s1 = scalar_field_from_json(comps[1], "component 1");
    auto s2 = scalar_field_from_json(comps[2], "component 2");
    return VectorField(
        [s0, s1, s2](const Vec3& x, double t) {
          return Vec3(s0.value(x, t), s1.value(x, t), s2.value(x, t));
        },
        [s0, s1, s2](const Vec3& x, double t) {
          Mat3 m;
          m.row(0) = s0.grad(x, t).transpose();
          m.row(1) = s1.grad(x, t).transpose();
          m.row(2) = s2.grad(x, t).transpose();
          return m;
        },
        [s0, s1, s2](const Vec3& x, double t) {
          return Vec3(s0.dt(x, t), s1.dt(x, t), s2.dt(x, t));
        },
        [s0, s1, s2](int i, const Vec3& x, double t) {
          return i == 0 ? s0.hessian(x, t)
                        : (i == 1 ? s1.hessian(x, t) : s2.hessian(x, t));
        });
  }
  throw ConfigError("field catalog: unknown vector kind '" + kind + "'");
}

VectorField combine(double a, const VectorField& u, double b,
                    const VectorField& w) {
  return VectorField(
      [a, u, b, w](const Vec3& x, double t) {
        return (a * u.value(x, t) + b * w.value(x, t)).eval();
      },
      [a, u, b, w](const Vec3& x, double t) {
        return (a * u.jacobian(x, t) + b * w.jacobian(x, t)).eval();
      },
      [a, u, b, w](const Vec3& x, double t) {
        return (a * u.dt(x, t) + b * w.dt(x, t)).eval();
      },
      [a, u, b, w](int i, const Vec3& x, double t) {
        return (a * u.hessian(i, x, t) + b * w.hessian(i, x, t)).eval();
      });
}

}  // namespace mfpt
