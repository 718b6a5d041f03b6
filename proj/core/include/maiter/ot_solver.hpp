#pragma once

#include <vector>

#include "maiter/grid.hpp"
#include "maiter/laguerre.hpp"
#include "maiter/potential.hpp"
#include "maiter/sites.hpp"

namespace maiter {

/// Tail mass carried by one outward boundary ray: the generator potential
/// is linear along the ray, so the h-integral beyond the box has the
/// closed form tweight * H(value)/slope.
struct BoundaryRay {
  RayGeom geom;
  double gen_value = 0;  // generator potential at the edge node
  double gen_slope = 1;  // outward slope of the generator
  double mass = 0;       // normalized tail mass of the ray
  double mean_t = 0;     // E[t] under the ray's h-weight: (J - vH)/(sH)
};

/// Probability mass discretized on an evaluation grid: node masses are the
/// trapezoid weights times the density values plus, when built from a
/// potential, closed-form boundary rays holding the mass outside the box
/// (node masses + ray masses sum to 1).
struct SourceDensity {
  EvaluationGrid grid;
  std::vector<double> masses;      // node part only
  std::vector<BoundaryRay> rays;   // exact tails; empty for hand-built data
  double tail_mass_bound = 0;      // total ray mass share
  double normalization = 1;        // ||h o phi||_1 including the tails

  GridValues node_values() const;    // masses[k] / quad_weight(k)
  GridValues solver_values() const;  // ray masses folded onto boundary nodes
  std::vector<double> folded_masses() const;
};

struct SolverOptions {
  double mass_tol = 1e-6;  // relative, per site
  int max_iters = 500;
  double damping = 0.5;
};

/// Kantorovich dual state for one transport solve.
struct DualState {
  std::vector<double> weights;
  std::vector<double> cell_masses;
  double dual_value = 0;
  std::vector<double> dual_history;  // value after each accepted ascent step
  int iterations = 0;
  double max_rel_imbalance = 0;
};

struct SolveResult {
  MaxAffinePotential potential;  // gauge-fixed: min w_j = 0
  DualState dual;
};

/// One second-boundary-value step: damped Newton ascent on the concave
/// Kantorovich dual until every Laguerre cell carries its target mass
/// nu_j / lambda(A) within opts.mass_tol (relative).  Line-search steps are
/// rejected unless the residual shrinks and no cell drops below the
/// standard mass floor.
SolveResult solve_step(const SourceDensity& source, const TargetSites& sites,
                       const SolverOptions& opts = {},
                       const std::vector<double>* warm_start = nullptr,
                       const std::vector<std::vector<int>>* order = nullptr);

/// Monotone-rearrangement oracle for n = 1: cell boundaries at source
/// quantiles of the cumulative target masses, weights recovered from the
/// breakpoint identity.  Independent of the dual ascent path.
MaxAffinePotential solve_step_1d_exact(const SourceDensity& source,
                                       const TargetSites& sites);

/// Hard node assignment (ties to the lowest site index); diagnostic view of
/// the transport plan at grid resolution.
std::vector<double> assign_cells(const std::vector<double>& weights,
                                 const std::vector<Vec>& sites,
                                 const SourceDensity& source);

}  // namespace maiter
