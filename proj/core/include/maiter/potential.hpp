#pragma once

#include <vector>

#include "maiter/convex_body.hpp"
#include "maiter/geometry.hpp"
#include "maiter/grid.hpp"
#include "maiter/sites.hpp"

namespace maiter {

/// Convex potential phi(x) = max_j (<x, y_j> - w_j) anchored to target
/// quadrature sites y_j in the body.  At active sites the Legendre
/// transform is phi*(y_j) = w_j, which makes the conjugate-side integrals
/// direct weighted sums.  Immutable value type.
struct MaxAffinePotential {
  int dim = 0;
  std::vector<Vec> sites;
  std::vector<double> weights;
  std::vector<double> site_masses;  // nu_j, sum = lambda(A)

  double eval(const Vec& x) const;
  int argmax_index(const Vec& x) const;
  double total_site_mass() const;
};

MaxAffinePotential seed_potential(const TargetSites& sites);  // w_j = |y_j|^2/2

/// Exact site activity: j is active iff its Laguerre cell has nonempty
/// interior (the cells at working scales are narrower than any practical
/// evaluation grid, so node sampling is not reliable here).
std::vector<char> active_mask(const MaxAffinePotential& phi);

struct LegendreValues {
  std::vector<double> values;  // phi*(y_j) = w_j
  double integral = 0;         // sum_j nu_j w_j ~ int_A phi* dlambda
};

/// Throws InactiveSite when some supporting plane never touches the graph.
LegendreValues legendre_on_body(const MaxAffinePotential& phi);

/// Shift by the constant making sum_j nu_j phi*(y_j) = -tau.  With
/// require_positive the shifted minimum must stay positive.
MaxAffinePotential normalize(const MaxAffinePotential& phi, double tau,
                             bool require_positive = false);

struct ArgminResult {
  Vec point;
  double value = 0;
};

/// Linear program min_x max_j (<x,y_j> - w_j); lexicographically smallest
/// minimizer on flat pieces.  Throws Unbounded when the sites do not
/// surround the origin.
ArgminResult argmin(const MaxAffinePotential& phi);

MaxAffinePotential recenter(const MaxAffinePotential& phi, const Vec& a);

struct GrowthReport {
  double slope_r = 0;        // coercivity slope from the body
  double gradient_bound = 0; // R = max_j |y_j|
  double lower_margin = 0;   // min over nodes of phi - (tau/vol + r|x|)
  double upper_margin = 0;   // min over nodes of phi(0) + R|x| - phi
  bool ok = false;
};

/// Verifies tau/vol + r|x| <= phi <= phi(0) + R|x| on the grid for a
/// recentered, normalized potential; throws BoundViolated past `slack`.
GrowthReport growth_bounds_check(const MaxAffinePotential& phi, double tau,
                                 const ConvexBody& body, const EvaluationGrid& grid,
                                 double slack = 1e-9);

}  // namespace maiter
