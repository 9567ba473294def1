#include "mfpt/surface_calc.hpp"

#include <cmath>

namespace mfpt {

Mat3 tangential_projector(const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-8)
    throw GeometryError("tangential_projector: normal is not unit length");
  return Mat3::Identity() - n * n.transpose();
}

Vec3 tangential_project(const Vec3& n, const Vec3& v) {
  if (std::abs(n.norm() - 1.0) > 1e-8)
    throw GeometryError("tangential_project: normal is not unit length");
  return v - n.dot(v) * n;
}

namespace detail {

ScalarField with_surface_fd(const ClosedSurface& s, const ScalarField& f) {
  ScalarField g = f;
  if (!f.has_closed_form()) {
    FdConfig fd = f.fd_config();
    fd.step_first = 1e-5;
    fd.length_scale = s.bounding_radius();
    g.set_fd_config(fd);
  }
  return g;
}

VectorField with_surface_fd(const ClosedSurface& s, const VectorField& v) {
  VectorField g = v;
  if (!v.has_closed_form()) {
    FdConfig fd = v.fd_config();
    fd.step_first = 1e-5;
    fd.length_scale = s.bounding_radius();
    g.set_fd_config(fd);
  }
  return g;
}

}  // namespace detail

std::vector<Vec3> surface_gradient(const ClosedSurface& s, const ScalarField& f,
                                   double t) {
  if (s.is_mesh()) return surface_gradient(s, sample_scalar(s, f, t));
  const ScalarField g = detail::with_surface_fd(s, f);
  std::vector<Vec3> out(s.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& node = s.nodes()[i];
    out[i] = tangential_project(node.normal, g.grad(node.position, t));
  }
  return out;
}

std::vector<Vec3> surface_gradient(const ClosedSurface& s,
                                   const std::vector<double>& nodal) {
  if (!s.is_mesh())
    throw GeometryError(
        "surface_gradient: parametric surfaces need an ambient extension "
        "callback, not per-node samples");
  return s.vertex_gradient(nodal);
}

std::vector<double> surface_divergence(const ClosedSurface& s,
                                       const VectorField& v, double t) {
  if (s.is_mesh()) return surface_divergence(s, sample_vector(s, v, t));
  const VectorField g = detail::with_surface_fd(s, v);
  std::vector<double> out(s.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& node = s.nodes()[i];
    const Mat3 jac = g.jacobian(node.position, t);
    out[i] = jac.trace() - node.normal.dot(jac * node.normal);
  }
  return out;
}

std::vector<double> surface_divergence(const ClosedSurface& s,
                                       const std::vector<Vec3>& nodal) {
  if (!s.is_mesh())
    throw GeometryError(
        "surface_divergence: parametric surfaces need an ambient extension "
        "callback, not per-node samples");
  return s.vertex_divergence(nodal);
}

std::vector<double> mean_curvature(const ClosedSurface& s) {
  return s.curvatures();
}

double surface_integral(const ClosedSurface& s, const ScalarField& f,
                        double t) {
  return s.integrate(sample_scalar(s, f, t));
}

double surface_integral(const ClosedSurface& s,
                        const std::vector<double>& nodal) {
  return s.integrate(nodal);
}

double divergence_theorem_residual(const ClosedSurface& s, const VectorField& v,
                                   double t) {
  // Ambient-derivative form on both representations: per-node tangential
  // divergence from the field's Jacobian plus the node's (exact or discrete)
  // curvature term. On meshes this measures the genuine discretization error
  // of the normals, curvatures, and area weights; the nodal overload below
  // telescopes exactly for any samples (discrete summation by parts), so it
  // cannot serve as a convergence probe.
  const VectorField g = detail::with_surface_fd(s, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.node_count(); ++i) {
    const auto& node = s.nodes()[i];
    const Mat3 jac = g.jacobian(node.position, t);
    const double div = jac.trace() - node.normal.dot(jac * node.normal);
    const double vn = g.value(node.position, t).dot(node.normal);
    acc += node.weight * (div + node.mean_curvature * vn);
  }
  return std::abs(acc);
}

double divergence_theorem_residual(const ClosedSurface& s,
                                   const std::vector<Vec3>& nodal) {
  if (!s.is_mesh())
    throw GeometryError(
        "divergence_theorem_residual: parametric surfaces need an ambient "
        "extension callback, not per-node samples");
  // integral(div_Gamma V): exact for the per-triangle-linear interpolant.
  double lhs = 0.0;
  for (std::size_t f = 0; f < s.faces().size(); ++f) {
    const auto& t = s.faces()[f];
    const auto gl = s.triangle_basis_gradients(static_cast<int>(f));
    const double div = nodal[t[0]].dot(gl[0]) + nodal[t[1]].dot(gl[1]) +
                       nodal[t[2]].dot(gl[2]);
    lhs += s.triangle_area(static_cast<int>(f)) * div;
  }
  // integral(H (V.n)) on per-vertex data, quadratic product rule.
  std::vector<double> h = s.curvatures();
  std::vector<double> vn(s.node_count());
  for (std::size_t i = 0; i < s.node_count(); ++i)
    vn[i] = nodal[i].dot(s.nodes()[i].normal);
  const double rhs = s.integrate_product(h, vn, 2);
  return std::abs(lhs + rhs);
}

}  // namespace mfpt
