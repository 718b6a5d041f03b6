#pragma once

#include <vector>

#include "maiter/geometry.hpp"
#include "maiter/grid.hpp"

namespace maiter {

/// Quadrature of a multilinearly interpolated density over the Laguerre
/// cells of max_j(<x,y_j> - w_j) restricted to the grid box.  Cell masses
/// and moments are exact for the interpolated density, so they vary
/// smoothly with the weights; the off-diagonal Jacobian entries
/// d(mass_j)/d(w_i) = (boundary flux)/(|y_j - y_i|) come from edge
/// integrals of the same interpolant.
struct LaguerreStats {
  std::vector<double> mass;
  std::vector<Vec> moment;                             // filled if requested
  std::vector<std::pair<std::pair<int, int>, double>> jac;  // (j,i) j<i, value >= 0
  double min_mass = 0;
  double total_mass = 0;
};

struct LaguerreRequest {
  bool moments = false;
  bool jacobian = false;
};

/// Distance-sorted site orders speed up 2-d cell clipping; computed once per
/// site set and reused across Newton iterations.
std::vector<std::vector<int>> neighbor_order(const std::vector<Vec>& sites);

LaguerreStats laguerre_stats(const std::vector<Vec>& sites,
                             const std::vector<double>& weights,
                             const GridValues& density, LaguerreRequest req,
                             const std::vector<std::vector<int>>* order = nullptr);

}  // namespace maiter
