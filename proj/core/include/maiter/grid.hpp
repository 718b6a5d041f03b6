#pragma once

#include <cstdint>
#include <vector>

#include "maiter/geometry.hpp"

namespace maiter {

/// Tensor grid on [-L, L]^n (n in {1,2}) with trapezoid quadrature weights.
/// Nodes are indexed flat, x-fastest; everything is computed on the fly.
struct EvaluationGrid {
  int dim = 1;
  double halfwidth = 0;     // L
  int points_per_axis = 2;  // m

  EvaluationGrid() = default;
  EvaluationGrid(int n, double L, int m);

  double spacing() const { return 2 * halfwidth / (points_per_axis - 1); }
  int64_t num_nodes() const;
  Vec node(int64_t k) const;
  double quad_weight(int64_t k) const;
  double axis_coord(int i) const { return -halfwidth + i * spacing(); }

  bool same_layout(const EvaluationGrid& o) const {
    return dim == o.dim && points_per_axis == o.points_per_axis &&
           halfwidth == o.halfwidth;
  }
};

/// Node values on an EvaluationGrid with multilinear interpolation in the
/// box; the interpolant integrates to exactly the trapezoid sum.
struct GridValues {
  EvaluationGrid grid;
  std::vector<double> values;

  double interp(const Vec& x) const;
};

/// Outward halfline at a boundary node with its transverse measure; the
/// fixed extension geometry used by the closed-form tail integrals.
struct RayGeom {
  int64_t node = 0;
  double tweight = 1;  // transverse quadrature weight (1 in 1-d)
  int axis = 0;
  double sign = 1;

  Vec edge(const EvaluationGrid& g) const { return g.node(node); }
  Vec outward(int dim) const {
    Vec u = Vec::zero(dim);
    u[axis] = sign;
    return u;
  }
};

std::vector<RayGeom> boundary_rays(const EvaluationGrid& grid);

}  // namespace maiter
