#include "mfpt/helmholtz.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>

#include "mfpt/errors.hpp"

namespace mfpt {

namespace {

/// Compactly supported divergence-free test field: curl of a polynomial bump
/// times a constant axis vector, phi = grad b x a with
/// b = (1 - |x-c|^2/rho^2)^6 inside the support ball and 0 outside.
struct BumpCurl {
  Vec3 center;
  double rho;
  Vec3 axis;

  Vec3 operator()(const Vec3& x) const {
    const Vec3 d = x - center;
    const double s = d.squaredNorm() / (rho * rho);
    if (s >= 1.0) return Vec3::Zero();
    const double u = 1.0 - s;
    const double p5 = u * u * u * u * u;
    const Vec3 grad_b = -12.0 * p5 / (rho * rho) * d;
    return grad_b.cross(axis);
  }
};

std::vector<BumpCurl> test_basis(const Vec3& center, double radius) {
  std::vector<BumpCurl> basis;
  std::vector<std::pair<Vec3, double>> supports;
  supports.emplace_back(center, 0.6 * radius);
  for (int a = 0; a < 3; ++a) {
    for (double sgn : {-1.0, 1.0}) {
      Vec3 c = center;
      c[a] += sgn * 0.45 * radius;
      supports.emplace_back(c, 0.4 * radius);
    }
  }
  for (const auto& [c, rho] : supports)
    for (int a = 0; a < 3; ++a) {
      Vec3 axis = Vec3::Zero();
      axis[a] = 1.0;
      basis.push_back({c, rho, axis});
    }
  return basis;
}

}  // namespace

double HelmholtzField::value_at(const Vec3& x) const {
  if (n == 0 || centers.empty())
    throw FieldError("helmholtz potential: empty grid");
  const auto clamp_idx = [this](double s) {
    return std::min(n - 1, std::max(0, int(std::floor(s))));
  };
  const int i = clamp_idx((x.x() - origin.x()) / h);
  const int j = clamp_idx((x.y() - origin.y()) / h);
  const int k = clamp_idx((x.z() - origin.z()) / h);
  const int compact = cell_of_voxel_[std::size_t(i) + std::size_t(n) * (j + std::size_t(n) * k)];
  if (compact >= 0) return potential[compact];
  // Voxel outside the mask: fall back to the nearest masked cell.
  double best = std::numeric_limits<double>::max();
  std::size_t best_i = 0;
  for (std::size_t m = 0; m < centers.size(); ++m) {
    const double d = (centers[m] - x).squaredNorm();
    if (d < best) {
      best = d;
      best_i = m;
    }
  }
  return potential[best_i];
}

HelmholtzField helmholtz_pressure(const VectorField& f, double t,
                                  const Vec3& center, double radius,
                                  const HelmholtzOptions& opts) {
  if (!(radius > 0.0))
    throw GeometryError("helmholtz grid needs a positive ball radius");
  if (opts.cells_per_axis < 8)
    throw ConfigError("helmholtz grid needs at least 8 cells per axis");

  HelmholtzField out;
  out.n = opts.cells_per_axis;
  out.h = 2.0 * radius / out.n;
  out.origin = center - Vec3::Constant(radius);
  const int n = out.n;
  const double h = out.h;

  const auto voxel = [n](int i, int j, int k) {
    return std::size_t(i) + std::size_t(n) * (j + std::size_t(n) * k);
  };
  const auto cell_center = [&](int i, int j, int k) {
    return (out.origin + h * Vec3(i + 0.5, j + 0.5, k + 0.5)).eval();
  };

  out.cell_of_voxel_.assign(std::size_t(n) * n * n, -1);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 c = cell_center(i, j, k);
        if ((c - center).norm() < radius) {
          out.cell_of_voxel_[voxel(i, j, k)] = int(out.centers.size());
          out.centers.push_back(c);
        }
      }
  const int m = int(out.centers.size());
  if (m == 0) throw GeometryError("helmholtz grid mask is empty");

  // Cache the field at masked cell centers (for the divergence-free test)
  // and compute the test inner products.
  std::vector<Vec3> f_cells(m);
  double f_norm_sq = 0.0;
  for (int c = 0; c < m; ++c) {
    f_cells[c] = f.value(out.centers[c], t);
    f_norm_sq += f_cells[c].squaredNorm();
  }
  const double cell_vol = h * h * h;
  f_norm_sq *= cell_vol;

  out.divfree_worst = 0.0;
  for (const BumpCurl& phi : test_basis(center, radius)) {
    double inner = 0.0, phi_norm_sq = 0.0;
    for (int c = 0; c < m; ++c) {
      const Vec3 p = phi(out.centers[c]);
      inner += f_cells[c].dot(p);
      phi_norm_sq += p.squaredNorm();
    }
    inner *= cell_vol;
    phi_norm_sq *= cell_vol;
    const double denom =
        std::sqrt(f_norm_sq) * std::sqrt(phi_norm_sq) + 1e-300;
    out.divfree_worst = std::max(out.divfree_worst, std::abs(inner) / denom);
  }
  if (out.divfree_worst > opts.divfree_tol) {
    std::ostringstream os;
    os << "field is not orthogonal to the divergence-free test basis "
          "(normalized defect "
       << out.divfree_worst << " > " << opts.divfree_tol
       << "): no potential exists";
    throw IllPosedError(os.str());
  }

  // Assemble the 7-point finite-volume Laplacian over masked cells with
  // natural (do-nothing) boundary faces, and the face-flux right-hand side.
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(std::size_t(m) * 7);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int row = out.cell_of_voxel_[voxel(i, j, k)];
        if (row < 0) continue;
        const Vec3 xc = cell_center(i, j, k);
        double diag = 0.0;
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        for (int ff = 0; ff < 6; ++ff) {
          const int ii = i + di[ff], jj = j + dj[ff], kk = k + dk[ff];
          if (ii < 0 || jj < 0 || kk < 0 || ii >= n || jj >= n || kk >= n)
            continue;
          const int col = out.cell_of_voxel_[voxel(ii, jj, kk)];
          if (col < 0) continue;
          diag += h;
          trips.emplace_back(row, col, -h);
          const int axis = ff / 2;
          const double sgn = (ff % 2 == 0) ? 1.0 : -1.0;
          Vec3 face = xc;
          face[axis] += sgn * 0.5 * h;
          rhs[row] -= sgn * f.value(face, t)[axis] * h * h;
        }
        trips.emplace_back(row, row, diag);
      }

  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trips.begin(), trips.end());
  // The pure-Neumann operator is singular with a constant null space; the
  // right-hand side is compatible by construction (interior face fluxes
  // cancel pairwise), but strip any round-off mean before solving.
  rhs.array() -= rhs.mean();

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(opts.cg_tol);
  cg.setMaxIterations(opts.max_iterations);
  cg.compute(A);
  Eigen::VectorXd sol = cg.solve(rhs);
  if (cg.info() == Eigen::NoConvergence)
    throw NumericalAbortError(
        "helmholtz conjugate-gradient solve did not converge");
  out.iterations = int(cg.iterations());
  sol.array() -= sol.mean();
  out.potential.assign(sol.data(), sol.data() + m);

  // Face-sampled relative L2 defect of the recovered gradient.
  double err_sq = 0.0, ref_sq = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int row = out.cell_of_voxel_[voxel(i, j, k)];
        if (row < 0) continue;
        const int di[3] = {1, 0, 0}, dj[3] = {0, 1, 0}, dk[3] = {0, 0, 1};
        for (int axis = 0; axis < 3; ++axis) {
          const int ii = i + di[axis], jj = j + dj[axis], kk = k + dk[axis];
          if (ii >= n || jj >= n || kk >= n) continue;
          const int col = out.cell_of_voxel_[voxel(ii, jj, kk)];
          if (col < 0) continue;
          Vec3 face = cell_center(i, j, k);
          face[axis] += 0.5 * h;
          const double fn = f.value(face, t)[axis];
          const double gn = (sol[col] - sol[row]) / h;
          err_sq += (gn - fn) * (gn - fn);
          ref_sq += fn * fn;
        }
      }
  out.gradient_residual =
      (ref_sq > 0.0) ? std::sqrt(err_sq / ref_sq) : std::sqrt(err_sq);
  return out;
}

}  // namespace mfpt
