#pragma once

#include <array>
#include <functional>

#include "maiter/convex_body.hpp"
#include "maiter/functionals.hpp"
#include "maiter/grid.hpp"
#include "maiter/oracle.hpp"
#include "maiter/ot_solver.hpp"
#include "maiter/potential.hpp"
#include "maiter/profile.hpp"

namespace maiter {

/// Callable bundle for a positive, convex potential with enough derivative
/// data for the affine-geometric quantities.  Missing derivatives fall back
/// to central differences; det_hess is always required (analytic for
/// oracles, the Monge-Ampere identity for solved iterates).
struct SmoothSampler {
  int dim = 1;
  double lambda_A = 0;
  ScalarField phi;
  std::function<Vec(const Vec&)> grad;                    // optional
  ScalarField det_hess;                                   // required
  std::function<std::array<double, 3>(const Vec&)> hess;  // optional (h11,h22,h12)
  bool psi_is_phi = false;  // affine support psi = det^{-1/(n+2)} equals phi
  double fd_step = 1e-4;
};

SmoothSampler sampler_from_oracle(const OracleSolution& o);

/// Solved iterates carry no classical Hessian; the determinant comes from
/// the equation the step solved: det = lambda(A) h(phi_prescribed)/Z.
SmoothSampler sampler_from_iterate(const MaxAffinePotential& phi,
                                   const MaxAffinePotential& prescribed,
                                   const Profile& profile, const EvaluationGrid& grid);

/// One point of the Legendre graph immersion and its affine data.
struct ImmersionSample {
  Vec x;
  std::array<double, 3> f_point{};      // (grad phi, <x,grad phi> - phi)
  std::array<double, 3> xi{};           // affine normal
  std::array<double, 3> nu_point{};     // dual immersion (x/phi, -1/phi)
  std::array<double, 3> gauss_normal{}; // graph normal (x,-1)/sqrt(1+|x|^2)
  double support_rho = 0;               // <f, N>
  double kappa = 0;                     // Gaussian curvature at N(x)
};

ImmersionSample immerse(const SmoothSampler& s, const Vec& x);

struct ShapeResult {
  std::array<double, 4> S{};  // row-major n x n
  double gamma_est = 0;       // trace / n
};

ShapeResult shape_operator(const SmoothSampler& s, const Vec& x);

/// Affine surface area by (1) the Hessian-power quadrature, (2) the
/// curvature form, (3) the dual norm identity through the G functional.
double affine_surface_area(const SmoothSampler& s, const EvaluationGrid& grid,
                           int method);

struct ConeMeasures {
  double mu_f = 0;   // int phi det(Hess phi)
  double mu_nu = 0;  // int phi^-(n+1)
};

ConeMeasures cone_measures(const SmoothSampler& s, const EvaluationGrid& grid);

/// Max distance of nu(R_far u) to the boundary cylinder polar(A) x {0};
/// decays like 1/R_far for potentials with gradient image A.
double anchor_check(const SmoothSampler& s, const ConvexBody& body, double R_far,
                    int n_dirs = 64);

struct PrescribedStep {
  SolveResult solve;
  double c = 0;  // xi_out = -c f_psi
};

/// One affine-iteration step: solve the transport problem with source
/// psi^-(n+2)/Z and report the proportionality constant of the prescribed
/// normal.
PrescribedStep prescribed_normal_step(const SmoothSampler& psi, const ConvexBody& body,
                                      const EvaluationGrid& grid,
                                      const TargetSites& sites,
                                      const SolverOptions& opts = {});

struct AffineReport {
  double gamma_est = 0;
  double sphere_residual = 0;
  double asa_def1 = 0, asa_def2 = 0, asa_def3 = 0;
  double cone_measure_f = 0, cone_measure_nu = 0;
  double anchor_error = 0;
};

/// Report for an analytic sampler: residual = sup |S - gamma I| on the
/// window.
AffineReport affine_report_smooth(const SmoothSampler& s, const ConvexBody& body,
                                  const EvaluationGrid& grid, double window);

/// Report for a solved pair (prescribed data, solved step): the sphere
/// defect is the normalized prescribed-normal residual
/// sup |gamma f_final - c f_prescribed| / (1 + |f_final|).
AffineReport affine_report_iterate(const MaxAffinePotential& prescribed,
                                   const MaxAffinePotential& final_phi,
                                   const Profile& profile, const ConvexBody& body,
                                   const EvaluationGrid& grid, double window);

}  // namespace maiter
