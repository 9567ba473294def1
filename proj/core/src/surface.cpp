#include "mfpt/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace mfpt {

namespace {

constexpr double kPi = std::numbers::pi;

/// Implicit-form curvature of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1:
/// H = kCurvatureOrientation * div(grad F / |grad F|) with F the quadric,
/// evaluated in closed form.
double ellipsoid_mean_curvature(const Vec3& p, double a, double b, double c) {
  const Vec3 g(2.0 * p[0] / (a * a), 2.0 * p[1] / (b * b), 2.0 * p[2] / (c * c));
  const Vec3 d2(2.0 / (a * a), 2.0 / (b * b), 2.0 / (c * c));
  const double lap = d2.sum();
  const double gn = g.norm();
  const double gHg = d2[0] * g[0] * g[0] + d2[1] * g[1] * g[1] + d2[2] * g[2] * g[2];
  const double div_n = (lap * gn * gn - gHg) / (gn * gn * gn);
  return kCurvatureOrientation * div_n;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw GeometryError("gauss_legendre: need at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration from Chebyshev initial guesses; standard and stable.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// ---------------------------------------------------------------------------
// Parametric factories
// ---------------------------------------------------------------------------

ClosedSurface ClosedSurface::sphere(double radius, int n_theta, int n_phi,
                                    const Vec3& center) {
  return ellipsoid(radius, radius, radius, n_theta, n_phi, center);
}

ClosedSurface ClosedSurface::ellipsoid(double a, double b, double c,
                                       int n_theta, int n_phi,
                                       const Vec3& center) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0)
    throw GeometryError("ellipsoid: half-axes must be positive");
  if (n_theta < 2 || n_phi < 4)
    throw GeometryError("ellipsoid: quadrature resolution too small");
  ClosedSurface s;
  s.kind_ = Kind::Parametric;

  std::vector<double> gl_x, gl_w;
  gauss_legendre(n_theta, gl_x, gl_w);

  s.nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 0.5 * kPi * (gl_x[i] + 1.0);  // [0, pi]
    const double wtheta = 0.5 * kPi * gl_w[i];
    const double st = std::sin(theta), ct = std::cos(theta);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = dphi * j;
      const double cp = std::cos(phi), sp = std::sin(phi);
      SurfaceNode node;
      const Vec3 p(a * st * cp, b * st * sp, c * ct);
      node.position = center + p;
      // Chart tangents give the exact area element |x_theta x x_phi|.
      const Vec3 xt(a * ct * cp, b * ct * sp, -c * st);
      const Vec3 xp(-a * st * sp, b * st * cp, 0.0);
      const Vec3 cross = xt.cross(xp);
      node.weight = cross.norm() * wtheta * dphi;
      node.normal =
          Vec3(p[0] / (a * a), p[1] / (b * b), p[2] / (c * c)).normalized();
      node.mean_curvature = ellipsoid_mean_curvature(p, a, b, c);
      s.nodes_.push_back(node);
    }
  }
  s.finalize_bounds();
  return s;
}

// ---------------------------------------------------------------------------
// Mesh factories
// ---------------------------------------------------------------------------

ClosedSurface ClosedSurface::icosphere(double radius, int subdivisions,
                                       const Vec3& center) {
  return tri_ellipsoid(radius, radius, radius, subdivisions, center);
}

ClosedSurface ClosedSurface::tri_ellipsoid(double a, double b, double c,
                                           int subdivisions,
                                           const Vec3& center) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0)
    throw GeometryError("tri_ellipsoid: half-axes must be positive");
  // Icosahedron.
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0},
      {0, -1, g}, {0, 1, g}, {0, -1, -g}, {0, 1, -g},
      {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (Vec3& v : verts) v.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = (verts[i] + verts[j]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  for (Vec3& v : verts) {
    v = Vec3(a * v[0], b * v[1], c * v[2]) + center;
  }
  return from_mesh(std::move(verts), std::move(tris));
}

ClosedSurface ClosedSurface::from_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("OFF: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_off_text(ss.str());
}

ClosedSurface ClosedSurface::from_off_text(const std::string& text) {
  std::istringstream in(text);
  auto next_token = [&in]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw GeometryError("OFF: unexpected end of input");
  };

  if (next_token() != "OFF") throw GeometryError("OFF: missing header");
  const int nv = std::stoi(next_token());
  const int nf = std::stoi(next_token());
  (void)std::stoi(next_token());  // edge count, ignored

  std::vector<Vec3> verts(nv);
  for (int i = 0; i < nv; ++i)
    for (int d = 0; d < 3; ++d) verts[i][d] = std::stod(next_token());

  std::vector<std::array<int, 3>> faces(nf);
  for (int f = 0; f < nf; ++f) {
    const int k = std::stoi(next_token());
    if (k != 3)
      throw GeometryError("OFF: face " + std::to_string(f) +
                          " is not a triangle");
    for (int d = 0; d < 3; ++d) {
      const int idx = std::stoi(next_token());
      if (idx < 0 || idx >= nv)
        throw GeometryError("OFF: face " + std::to_string(f) +
                            " references vertex " + std::to_string(idx) +
                            " out of range");
      faces[f][d] = idx;
    }
  }
  return from_mesh(std::move(verts), std::move(faces));
}

ClosedSurface ClosedSurface::from_mesh(std::vector<Vec3> vertices,
                                       std::vector<std::array<int, 3>> faces) {
  ClosedSurface s;
  s.kind_ = Kind::Mesh;
  s.vertices_ = std::move(vertices);
  s.faces_ = std::move(faces);
  s.validate_mesh();
  s.build_mesh_nodes();
  s.finalize_bounds();
  return s;
}

void ClosedSurface::validate_mesh() const {
  // Degenerate triangles.
  double scale = 0.0;
  for (const Vec3& v : vertices_) scale = std::max(scale, v.norm());
  const double area_floor = 1e-14 * std::max(1.0, scale * scale);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& t = faces_[f];
    const Vec3 a = vertices_[t[1]] - vertices_[t[0]];
    const Vec3 b = vertices_[t[2]] - vertices_[t[0]];
    if (0.5 * a.cross(b).norm() < area_floor)
      throw GeometryError("mesh: degenerate triangle at face " +
                          std::to_string(f));
  }
  // Closedness and consistent orientation: every directed edge must appear
  // exactly once, and its reverse exactly once.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : faces_) {
    for (int e = 0; e < 3; ++e) {
      const int i = t[e], j = t[(e + 1) % 3];
      if (++directed[{i, j}] > 1)
        throw GeometryError("mesh: directed edge (" + std::to_string(i) + "," +
                            std::to_string(j) +
                            ") repeated; inconsistent orientation");
    }
  }
  for (const auto& [edge, count] : directed) {
    (void)count;
    if (directed.find({edge.second, edge.first}) == directed.end())
      throw GeometryError("mesh: boundary edge (" + std::to_string(edge.first) +
                          "," + std::to_string(edge.second) +
                          "); surface is not closed");
  }
  // Outward orientation: positive signed volume.
  double vol6 = 0.0;
  for (const auto& t : faces_)
    vol6 += vertices_[t[0]].dot(vertices_[t[1]].cross(vertices_[t[2]]));
  if (vol6 <= 0.0)
    throw GeometryError("mesh: non-positive signed volume; faces are not "
                        "consistently outward-oriented");
}

void ClosedSurface::build_mesh_nodes() {
  const std::size_t nv = vertices_.size();
  nodes_.assign(nv, SurfaceNode{});
  for (std::size_t v = 0; v < nv; ++v) nodes_[v].position = vertices_[v];

  // Angle-weighted vertex normals and lumped (one-third) area weights.
  std::vector<Vec3> nsum(nv, Vec3::Zero());
  for (const auto& t : faces_) {
    const Vec3& p0 = vertices_[t[0]];
    const Vec3& p1 = vertices_[t[1]];
    const Vec3& p2 = vertices_[t[2]];
    const Vec3 fn = (p1 - p0).cross(p2 - p0);
    const double area = 0.5 * fn.norm();
    const Vec3 fnu = fn.normalized();
    const Vec3 e01 = (p1 - p0).normalized(), e02 = (p2 - p0).normalized();
    const Vec3 e12 = (p2 - p1).normalized();
    const double a0 = std::acos(std::clamp(e01.dot(e02), -1.0, 1.0));
    const double a1 = std::acos(std::clamp((-e01).dot(e12), -1.0, 1.0));
    const double a2 = kPi - a0 - a1;
    nsum[t[0]] += a0 * fnu;
    nsum[t[1]] += a1 * fnu;
    nsum[t[2]] += a2 * fnu;
    for (int e = 0; e < 3; ++e) nodes_[t[e]].weight += area / 3.0;
  }
  for (std::size_t v = 0; v < nv; ++v) nodes_[v].normal = nsum[v].normalized();

  // Curvature: discrete tangential divergence of the vertex normal field.
  std::vector<Vec3> normals(nv);
  for (std::size_t v = 0; v < nv; ++v) normals[v] = nodes_[v].normal;
  const std::vector<double> divn = vertex_divergence(normals);
  for (std::size_t v = 0; v < nv; ++v)
    nodes_[v].mean_curvature = kCurvatureOrientation * divn[v];
}

void ClosedSurface::finalize_bounds() {
  Vec3 centroid = Vec3::Zero();
  for (const auto& n : nodes_) centroid += n.position;
  centroid /= static_cast<double>(nodes_.size());
  double r = 0.0;
  for (const auto& n : nodes_) r = std::max(r, (n.position - centroid).norm());
  bounding_radius_ = r;
}

// ---------------------------------------------------------------------------
// Mesh accessors and discrete operators
// ---------------------------------------------------------------------------

const std::vector<Vec3>& ClosedSurface::vertices() const {
  if (!is_mesh()) throw GeometryError("surface: vertices() needs a mesh");
  return vertices_;
}

const std::vector<std::array<int, 3>>& ClosedSurface::faces() const {
  if (!is_mesh()) throw GeometryError("surface: faces() needs a mesh");
  return faces_;
}

double ClosedSurface::triangle_area(int f) const {
  const auto& t = faces()[f];
  const Vec3 a = vertices_[t[1]] - vertices_[t[0]];
  const Vec3 b = vertices_[t[2]] - vertices_[t[0]];
  return 0.5 * a.cross(b).norm();
}

Vec3 ClosedSurface::triangle_normal(int f) const {
  const auto& t = faces()[f];
  const Vec3 a = vertices_[t[1]] - vertices_[t[0]];
  const Vec3 b = vertices_[t[2]] - vertices_[t[0]];
  return a.cross(b).normalized();
}

std::array<Vec3, 3> ClosedSurface::triangle_basis_gradients(int f) const {
  const auto& t = faces()[f];
  const Vec3& p0 = vertices_[t[0]];
  const Vec3& p1 = vertices_[t[1]];
  const Vec3& p2 = vertices_[t[2]];
  const Vec3 fn = (p1 - p0).cross(p2 - p0);
  const double area2 = fn.norm();
  const Vec3 fnu = fn / area2;
  // grad lambda_i = n x (p_{i+2} - p_{i+1}) / (2 A)
  return {fnu.cross(p2 - p1) / area2, fnu.cross(p0 - p2) / area2,
          fnu.cross(p1 - p0) / area2};
}

std::vector<Vec3> ClosedSurface::vertex_gradient(
    const std::vector<double>& nodal) const {
  if (!is_mesh()) throw GeometryError("surface: vertex_gradient needs a mesh");
  if (nodal.size() != vertices_.size())
    throw GeometryError("surface: nodal data size mismatch");
  std::vector<Vec3> acc(vertices_.size(), Vec3::Zero());
  std::vector<double> wsum(vertices_.size(), 0.0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& t = faces_[f];
    const auto gl = triangle_basis_gradients(static_cast<int>(f));
    const double area = triangle_area(static_cast<int>(f));
    const Vec3 g =
        nodal[t[0]] * gl[0] + nodal[t[1]] * gl[1] + nodal[t[2]] * gl[2];
    for (int e = 0; e < 3; ++e) {
      acc[t[e]] += area * g;
      wsum[t[e]] += area;
    }
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    acc[v] /= wsum[v];
    const Vec3& n = nodes_[v].normal;
    acc[v] -= n.dot(acc[v]) * n;  // project onto the vertex tangent plane
  }
  return acc;
}

std::vector<double> ClosedSurface::vertex_divergence(
    const std::vector<Vec3>& nodal) const {
  if (!is_mesh()) throw GeometryError("surface: vertex_divergence needs a mesh");
  if (nodal.size() != vertices_.size())
    throw GeometryError("surface: nodal data size mismatch");
  std::vector<double> acc(vertices_.size(), 0.0);
  std::vector<double> wsum(vertices_.size(), 0.0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& t = faces_[f];
    const auto gl = triangle_basis_gradients(static_cast<int>(f));
    const double area = triangle_area(static_cast<int>(f));
    const double div = nodal[t[0]].dot(gl[0]) + nodal[t[1]].dot(gl[1]) +
                       nodal[t[2]].dot(gl[2]);
    for (int e = 0; e < 3; ++e) {
      acc[t[e]] += area * div;
      wsum[t[e]] += area;
    }
  }
  for (std::size_t v = 0; v < vertices_.size(); ++v) acc[v] /= wsum[v];
  return acc;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

double ClosedSurface::area() const {
  if (!is_mesh()) {
    double a = 0.0;
    for (const auto& n : nodes_) a += n.weight;
    return a;
  }
  double a = 0.0;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    a += triangle_area(static_cast<int>(f));
  return a;
}

double ClosedSurface::integrate(const std::vector<double>& nodal) const {
  if (nodal.size() != nodes_.size())
    throw GeometryError("surface: nodal data size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < nodal.size(); ++i) acc += nodes_[i].weight * nodal[i];
  return acc;
}

double ClosedSurface::integrate_product(const std::vector<double>& f,
                                        const std::vector<double>& g,
                                        int order) const {
  if (f.size() != nodes_.size() || g.size() != nodes_.size())
    throw GeometryError("surface: nodal data size mismatch");
  if (!is_mesh()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      acc += nodes_[i].weight * f[i] * g[i];
    return acc;
  }
  double acc = 0.0;
  for (std::size_t fc = 0; fc < faces_.size(); ++fc) {
    const auto& t = faces_[fc];
    const double area = triangle_area(static_cast<int>(fc));
    if (order <= 1) {
      const double fm = (f[t[0]] + f[t[1]] + f[t[2]]) / 3.0;
      const double gm = (g[t[0]] + g[t[1]] + g[t[2]]) / 3.0;
      acc += area * fm * gm;
    } else {
      // Symmetric 3-point (edge midpoint) rule: exact for quadratics.
      double sum = 0.0;
      for (int e = 0; e < 3; ++e) {
        const int i = t[e], j = t[(e + 1) % 3];
        const double fm = 0.5 * (f[i] + f[j]);
        const double gm = 0.5 * (g[i] + g[j]);
        sum += fm * gm;
      }
      acc += area * sum / 3.0;
    }
  }
  return acc;
}

std::vector<double> ClosedSurface::curvatures() const {
  std::vector<double> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    out[i] = nodes_[i].mean_curvature;
  return out;
}

std::vector<Vec3> ClosedSurface::normals() const {
  std::vector<Vec3> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = nodes_[i].normal;
  return out;
}

std::vector<Vec3> ClosedSurface::positions() const {
  std::vector<Vec3> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = nodes_[i].position;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling and CSV export
// ---------------------------------------------------------------------------

std::vector<double> sample_scalar(const ClosedSurface& s, const ScalarField& f,
                                  double t) {
  std::vector<double> out(s.node_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = f.value(s.nodes()[i].position, t);
  return out;
}

std::vector<Vec3> sample_vector(const ClosedSurface& s, const VectorField& v,
                                double t) {
  std::vector<Vec3> out(s.node_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = v.value(s.nodes()[i].position, t);
  return out;
}

void write_surface_csv(const std::string& path, const ClosedSurface& s,
                       const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size())
    throw ConfigError("surface csv: names/columns size mismatch");
  for (const auto& col : columns)
    if (col.size() != s.node_count())
      throw ConfigError("surface csv: column size mismatch");
  std::ofstream out(path);
  if (!out) throw ConfigError("surface csv: cannot open '" + path + "'");
  out.precision(17);
  out << "node_id,x,y,z";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < s.node_count(); ++i) {
    const Vec3& p = s.nodes()[i].position;
    out << i << "," << p[0] << "," << p[1] << "," << p[2];
    for (const auto& col : columns) out << "," << col[i];
    out << "\n";
  }
}

}  // namespace mfpt
