#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mfpt/fields.hpp"

namespace mfpt {

/// Orientation convention used throughout: normals point out of the enclosed
/// (phase A) region, and the scalar mean curvature is
///   H = kCurvatureOrientation * div_Gamma(n),
/// so a sphere of radius R carries H = -2/R. Every curvature-bearing formula
/// in the library reads its sign from this constant.
inline constexpr double kCurvatureOrientation = -1.0;

/// One evaluation/quadrature node on a closed surface.
struct SurfaceNode {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();     // unit, outward
  double weight = 0.0;            // area weight of the surface quadrature
  double mean_curvature = 0.0;    // exact (parametric) or discrete (mesh)
};

/// A closed orientable surface in one of two evaluation modes:
///
///  * Parametric: sphere/ellipsoid charts with exact normals and curvature;
///    integrals use Gauss-Legendre in the polar angle times the (spectrally
///    accurate, periodic) trapezoid rule in azimuth.
///  * Mesh: oriented triangle meshes; per-vertex normals by angle-weighted
///    averaging, curvature as the discrete tangential divergence of the
///    normal field, integrals by per-triangle centroid (order 1) or
///    symmetric 3-point (order 2) rules on per-vertex-linear data.
class ClosedSurface {
 public:
  enum class Kind { Parametric, Mesh };

  static ClosedSurface sphere(double radius, int n_theta, int n_phi,
                              const Vec3& center = Vec3::Zero());
  static ClosedSurface ellipsoid(double a, double b, double c, int n_theta,
                                 int n_phi, const Vec3& center = Vec3::Zero());

  /// Subdivided icosahedron projected onto a sphere (triangle mesh).
  static ClosedSurface icosphere(double radius, int subdivisions,
                                 const Vec3& center = Vec3::Zero());
  /// Icosphere scaled to the half-axes (a, b, c).
  static ClosedSurface tri_ellipsoid(double a, double b, double c,
                                     int subdivisions,
                                     const Vec3& center = Vec3::Zero());

  /// Triangle mesh in OFF format. The mesh must be closed (every edge shared
  /// by exactly two faces), consistently outward-oriented (positive signed
  /// volume), and free of degenerate triangles; violations raise
  /// GeometryError naming the defect.
  static ClosedSurface from_off_file(const std::string& path);
  static ClosedSurface from_off_text(const std::string& text);

  Kind kind() const { return kind_; }
  bool is_mesh() const { return kind_ == Kind::Mesh; }

  const std::vector<SurfaceNode>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  double area() const;
  /// Radius of the smallest origin-at-centroid ball containing the surface;
  /// sets the finite-difference step of ambient field differentiation.
  double bounding_radius() const { return bounding_radius_; }

  // --- mesh-mode accessors (GeometryError when parametric) ---
  const std::vector<Vec3>& vertices() const;
  const std::vector<std::array<int, 3>>& faces() const;

  double triangle_area(int f) const;
  Vec3 triangle_normal(int f) const;
  /// Gradients of the three barycentric hat functions of face f.
  std::array<Vec3, 3> triangle_basis_gradients(int f) const;

  /// Discrete tangential gradient of per-vertex data: per-triangle P1
  /// gradients averaged to vertices (area weights) and projected onto the
  /// vertex tangent plane.
  std::vector<Vec3> vertex_gradient(const std::vector<double>& nodal) const;
  /// Discrete tangential divergence of per-vertex vector data.
  std::vector<double> vertex_divergence(const std::vector<Vec3>& nodal) const;

  /// Integral of per-node data (parametric: quadrature weights; mesh: exact
  /// for per-triangle-linear data).
  double integrate(const std::vector<double>& nodal) const;
  /// Integral of a product of two per-node fields. In mesh mode the product
  /// is quadratic per triangle, handled by the symmetric 3-point rule when
  /// `order` is 2 (default) or the centroid rule when `order` is 1.
  double integrate_product(const std::vector<double>& f,
                           const std::vector<double>& g, int order = 2) const;

  std::vector<double> curvatures() const;
  std::vector<Vec3> normals() const;
  std::vector<Vec3> positions() const;

 private:
  ClosedSurface() = default;
  static ClosedSurface from_mesh(std::vector<Vec3> vertices,
                                 std::vector<std::array<int, 3>> faces);
  void build_mesh_nodes();
  void validate_mesh() const;
  void finalize_bounds();

  Kind kind_ = Kind::Parametric;
  std::vector<SurfaceNode> nodes_;
  double bounding_radius_ = 0.0;

  // mesh data
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
};

/// Sample an ambient field at the surface nodes.
std::vector<double> sample_scalar(const ClosedSurface& s, const ScalarField& f,
                                  double t);
std::vector<Vec3> sample_vector(const ClosedSurface& s, const VectorField& v,
                                double t);

/// Write per-node columns as CSV: node_id,x,y,z,<name0>,<name1>,...
void write_surface_csv(const std::string& path, const ClosedSurface& s,
                       const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace mfpt
