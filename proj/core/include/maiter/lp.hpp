#pragma once

#include <array>
#include <vector>

namespace maiter {

/// One inequality a.x <= b in at most 4 variables.
struct LinIneq {
  std::array<double, 4> a{0, 0, 0, 0};
  double b = 0;
};

struct LpResult {
  bool feasible = false;
  bool bounded = true;  // false when the optimum escapes to the guard box
  std::array<double, 4> x{0, 0, 0, 0};
};

/// Seidel's randomized incremental LP: maximize c.x subject to the
/// inequalities and |x_i| <= guard for every variable.  Deterministic
/// (fixed internal shuffle).  Dimensions 1..4.
LpResult lp_maximize(int dim, const std::vector<LinIneq>& cons,
                     const std::array<double, 4>& c, double guard = 1e9);

}  // namespace maiter
