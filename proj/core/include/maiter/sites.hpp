#pragma once

#include <cstdint>
#include <vector>

#include "maiter/convex_body.hpp"

namespace maiter {

/// Quadrature nodes for the uniform measure on the body: site j carries the
/// exact volume of its Voronoi cell clipped to the body, so the masses sum
/// to lambda(A).  After relaxation the sites are translated so the discrete
/// first moment matches the body barycenter exactly.
struct TargetSites {
  std::vector<Vec> sites;
  std::vector<double> masses;  // nu_j > 0, sum = lambda(A)
  double total_mass = 0;
};

/// Centroidal Voronoi sites: uniform lattice intersected with the body,
/// then `lloyd_steps` relaxation passes.  The seed only matters for the
/// rejection-sampling fallback taken when the lattice misses the requested
/// count badly (thin bodies, tiny n).
TargetSites make_target_sites(const ConvexBody& body, int n_sites, uint64_t seed,
                              int lloyd_steps = 5);

}  // namespace maiter
