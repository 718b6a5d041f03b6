#pragma once

#include <array>
#include <functional>
#include <string>

#include "maiter/convex_body.hpp"
#include "maiter/potential.hpp"
#include "maiter/profile.hpp"
#include "maiter/sites.hpp"

namespace maiter {

/// Ground-truth solution of the second boundary value problem with analytic
/// (or ODE-grade) samplers.  Lives behind the same callable surface as
/// solved iterates so every diagnostic runs on both.
struct OracleSolution {
  Profile profile;
  ConvexBody body;       // polytope handed to solvers (ngon for discs)
  double lambda_A = 0;   // measure of the true gradient image
  double tau = 0;        // -int_A phi* dlambda
  double h_norm = 0;     // ||h o phi||_1

  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> grad;
  std::function<double(const Vec&)> det_hess;
  std::function<double(const Vec&)> conj;  // phi*(y) for y in the body

  // optional smooth second derivatives (h11, h22, h12); empty when unknown
  std::function<std::array<double, 3>(const Vec&)> hess;
  // closed-form affine support psi = det^{-1/(n+2)} when available
  bool psi_is_phi = false;

  std::string note;
};

OracleSolution exp_oracle_1d();
OracleSolution power_oracle_1d();

/// Product solution on the square (exponential profile only; the power
/// nonlinearity is not multiplicative).
OracleSolution separable_oracle_2d(const Profile& profile);

/// Radially symmetric solution on a disc of the given radius (n = 2, both
/// profiles) by shooting on phi(0); the returned sampler is normalized to
/// the requested tau (constant shift for the exponential profile, dilation
/// for the power one).  The body is a `ngon`-sided polygon stand-in.
OracleSolution radial_shooting(const Profile& profile, double disc_radius, double tau,
                               int ngon = 64);

/// Pointwise max of |det/lambda - h(phi)/||h o phi||| over the samples.
double oracle_max_residual(const OracleSolution& o, const std::vector<Vec>& samples);

/// Max-affine representation anchored at the target sites: w_j = phi*(y_j).
MaxAffinePotential sample_potential(const OracleSolution& o, const TargetSites& sites);

}  // namespace maiter
