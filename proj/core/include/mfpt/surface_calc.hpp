#pragma once

#include <vector>

#include "mfpt/surface.hpp"

namespace mfpt {

/// (I - n n^T): projector onto the tangent plane of a unit normal n.
/// Throws GeometryError when |n| deviates from 1 by more than 1e-8.
Mat3 tangential_projector(const Vec3& n);
Vec3 tangential_project(const Vec3& n, const Vec3& v);

/// Tangential gradient of an ambient scalar field at every surface node:
/// grad_Gamma f = (I - n n^T) grad f. Parametric surfaces evaluate the
/// ambient gradient exactly (closed form) or with 4th-order finite
/// differences at step 1e-5 x bounding radius; mesh surfaces sample f at the
/// vertices and apply the per-triangle reconstruction stencil.
std::vector<Vec3> surface_gradient(const ClosedSurface& s, const ScalarField& f,
                                   double t);
/// Mesh-only variant on per-vertex data.
std::vector<Vec3> surface_gradient(const ClosedSurface& s,
                                   const std::vector<double>& nodal);

/// Tangential divergence div_Gamma v = tr((I - n n^T) grad v) per node.
std::vector<double> surface_divergence(const ClosedSurface& s,
                                       const VectorField& v, double t);
std::vector<double> surface_divergence(const ClosedSurface& s,
                                       const std::vector<Vec3>& nodal);

/// Per-node scalar mean curvature H = -div_Gamma(n) (so H = -2/R on a sphere
/// of radius R with outward normals).
std::vector<double> mean_curvature(const ClosedSurface& s);

/// Surface integral of an ambient scalar field or of per-node samples.
double surface_integral(const ClosedSurface& s, const ScalarField& f, double t);
double surface_integral(const ClosedSurface& s, const std::vector<double>& nodal);

/// Residual of the closed-surface divergence theorem
///   | integral(div_Gamma V) + integral(H (V . n)) |,
/// which vanishes for exact tangential calculus on a closed surface.
double divergence_theorem_residual(const ClosedSurface& s, const VectorField& v,
                                   double t);
double divergence_theorem_residual(const ClosedSurface& s,
                                   const std::vector<Vec3>& nodal);

namespace detail {
/// Ambient differentiation policy for parametric surfaces: exact Jacobian
/// when the field has closed-form derivatives, otherwise 4th-order central
/// differences with step 1e-5 x bounding radius.
ScalarField with_surface_fd(const ClosedSurface& s, const ScalarField& f);
VectorField with_surface_fd(const ClosedSurface& s, const VectorField& v);
}  // namespace detail

}  // namespace mfpt
