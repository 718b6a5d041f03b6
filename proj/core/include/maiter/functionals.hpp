#pragma once

#include <functional>

#include "maiter/convex_body.hpp"
#include "maiter/grid.hpp"
#include "maiter/ot_solver.hpp"
#include "maiter/potential.hpp"
#include "maiter/profile.hpp"

namespace maiter {

/// Per-iteration functional values as recorded in the trace.
struct FunctionalRecord {
  double F = 0;
  double pairing = 0;
  double G = 0;
  double g_value = 0;
  double ding = 0;
  double mabuchi = 0;
  double aubin_mabuchi = 0;
  double gap1 = 0;  // F(previous) - g_value
  double gap2 = 0;  // g_value - F(current)
};

using ScalarField = std::function<double(const Vec&)>;

/// F(f) = H^-1(||H o f||_1), quadrature over the grid box.
double F_of(const ScalarField& f, const Profile& profile, const EvaluationGrid& grid);
double F_of(const MaxAffinePotential& phi, const Profile& profile,
            const EvaluationGrid& grid);

/// F over the extended measure (grid box plus its boundary rays, where the
/// max-affine potential is exactly linear); the iteration's chain
/// quantities use this version so they stay consistent with densities
/// carrying tail rays.
double F_of_extended(const MaxAffinePotential& phi, const Profile& profile,
                     const EvaluationGrid& grid);

/// <phi, rho> where rho is the solved step's own Monge-Ampere density.
double pairing(const MaxAffinePotential& phi, const SourceDensity& rho);

/// Closed forms of the dual functional: negative differential entropy
/// (exponential coupling) or the s/(s+1)-norm of the density (ratio).
double G_of(const SourceDensity& rho, const Profile& profile);

struct GapReport {
  double pairing = 0;
  double G = 0;
  double g_value = 0;
  double F_next = 0;
  double gap1 = 0;
  double gap2 = 0;
};

/// Both inequalities of the per-step chain
///   F(phi_prev) >= g(<phi, rho>, G(rho)) >= F(phi);
/// throws MonotonicityViolated when a gap dips below -num_tol.
GapReport duality_gap_check(const MaxAffinePotential& phi, double F_prev,
                            const SourceDensity& rho, const Profile& profile,
                            const Coupling& coupling, double num_tol = 1e-6);

struct DingMabuchi {
  double ding = 0;
  double mabuchi = 0;
  double aubin_mabuchi = 0;
};

/// Toric reductions (exponential profile only):
///   D  = F + mean(phi*) + log lambda(A)
///   K  = <phi, rho> - G(rho) + log lambda(A) + mean(phi*)
///   AM = -mean(phi*)
/// where mean(phi*) = lambda(A)^-1 int_A phi*.
DingMabuchi ding_mabuchi(const MaxAffinePotential& phi, const SourceDensity& rho,
                         const ConvexBody& body, const EvaluationGrid& grid,
                         const Profile& profile);

struct HolderReport {
  double lhs = 0;  // ||h||_p ||f||_q
  double rhs = 0;  // int f h
};

/// Reverse Hoelder inequality ||h||_{s/(s+1)} ||f||_{-s} <= int f h for
/// positive f; throws InequalityViolated past tol.
HolderReport reverse_holder_check(const ScalarField& f, const ScalarField& h, double s,
                                  const EvaluationGrid& grid, double tol = 1e-9);

}  // namespace maiter
