#pragma once

#include <vector>

#include "mfpt/fields.hpp"

namespace mfpt {

struct HelmholtzOptions {
  /// Cells per axis across the bounding cube of the ball (h = 2R / n).
  int cells_per_axis = 64;
  /// Largest allowed normalized inner product against the divergence-free
  /// test basis before the input is declared non-gradient.
  double divfree_tol = 1e-6;
  double cg_tol = 1e-10;
  int max_iterations = 20000;
};

/// Potential recovered on the cell-centered Cartesian grid masked to the
/// ball. The potential is mean-zero over the masked cells.
struct HelmholtzField {
  Vec3 origin = Vec3::Zero();  // corner of the bounding cube
  double h = 0.0;
  int n = 0;
  std::vector<Vec3> centers;
  std::vector<double> potential;
  double gradient_residual = 0.0;  // ||grad P - F|| / ||F||, face-sampled L2
  double divfree_worst = 0.0;      // worst normalized test inner product
  int iterations = 0;

  /// Potential at the masked cell containing (or nearest to) x.
  double value_at(const Vec3& x) const;

 private:
  friend HelmholtzField helmholtz_pressure(const VectorField&, double,
                                           const Vec3&, double,
                                           const HelmholtzOptions&);
  std::vector<int> cell_of_voxel_;  // n^3 voxel -> compact index or -1
};

/// Least-squares potential for a vector field on the ball |x - center| < R:
/// solves the natural-boundary Poisson problem div(grad P - F) = 0 with a
/// 7-point finite-volume stencil and conjugate gradients, then normalizes P
/// to zero mean.
///
/// A field has such a potential only if it is orthogonal to divergence-free
/// test fields: this is probed first against a basis of compactly supported
/// polynomial-bump curls, and a field failing the probe (i.e. carrying a
/// rotational part) throws IllPosedError with the measured defect.
HelmholtzField helmholtz_pressure(const VectorField& f, double t,
                                  const Vec3& center, double radius,
                                  const HelmholtzOptions& opts = {});

}  // namespace mfpt
