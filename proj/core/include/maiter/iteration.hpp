#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "maiter/convex_body.hpp"
#include "maiter/functionals.hpp"
#include "maiter/oracle.hpp"
#include "maiter/ot_solver.hpp"
#include "maiter/potential.hpp"
#include "maiter/profile.hpp"

namespace maiter {

enum class SeedKind { ConeQuadratic, Oracle };

struct IterationConfig {
  ConvexBody body;
  Profile profile;
  Coupling coupling;
  double tau = 0;
  int n_sites = 129;
  double grid_l = 0;  // <= 0: pick from the tail rule
  int grid_m = 257;
  double mass_tol = 1e-7;
  double stop_tol = 1e-5;
  int max_iterations = 60;
  double tail_tol = 1e-8;
  double num_tol = 1e-6;
  uint64_t seed = 1;
  int ot_max_iters = 500;
  double ot_damping = 0.5;
  bool w1_diag = true;
  SeedKind seed_kind = SeedKind::ConeQuadratic;
  const OracleSolution* seed_oracle = nullptr;
};

struct TraceRow {
  int iter = 0;
  FunctionalRecord rec;
  double a_norm = 0;      // translation applied this step
  double drift = 0;       // |a_{i+1} - a_i| in the fixed frame (= a_norm here)
  double sup_change = 0;  // max change of the recentered potential on the window
  double tail_mass = 0;
  double w1_lower = 0, w1_upper = 0;
  double wall_ms = 0;
  double growth_lower_margin = 0, growth_upper_margin = 0;
  double min_value = 0;
  double normalization_residual = 0;  // |sum nu phi* + tau|
  double max_rel_imbalance = 0;
  std::array<double, 3> tail_moment{0, 0, 0};    // at R = L/4, L/2, 3L/4
  std::array<double, 3> tail_envelope{0, 0, 0};  // decay bound at the same radii
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  double grid_l = 0;
  int grid_m = 0;
  int n_sites = 0;
  double tau = 0;
  std::string profile_name;
};

enum class RunStatus { Converged, MaxIterations, MonotonicityViolated };

struct RunResult {
  MaxAffinePotential potential;        // recentered + normalized final iterate
  std::vector<double> prev_weights;    // prescribed-data potential, same frame
  IterationTrace trace;
  RunStatus status = RunStatus::MaxIterations;
};

/// Default truncation half-width: smallest L with
/// H(tau/vol + r_eps L) * surface term < 1e-10 (eroded-inradius slope).
double auto_halfwidth(const ConvexBody& body, const Profile& profile, double tau);

/// Normalized density h(phi)/||h o phi|| discretized on the grid; throws
/// TailTooHeavy when the estimated truncated mass exceeds tail_tol.
SourceDensity build_density(const ScalarField& phi, const Profile& profile,
                            const EvaluationGrid& grid, double tail_slope,
                            double tail_tol);
SourceDensity build_density(const MaxAffinePotential& phi, const Profile& profile,
                            const EvaluationGrid& grid, double tail_slope,
                            double tail_tol);

RunResult run(const IterationConfig& config);

struct W1Bracket {
  double lower = 0;
  double upper = 0;  // lower == upper == exact value in 1-d
};

/// Wasserstein-1 between two discretizations on the same grid: exact in
/// 1-d via cumulative mass, a dual/primal sandwich in 2-d.
W1Bracket w1_diagnostic(const SourceDensity& a, const SourceDensity& b);

struct TightnessReport {
  bool decreasing = true;     // tail moments decrease in R on every row
  bool below_envelope = true;
  double worst_ratio = 0;     // max over rows of moment/envelope
};

TightnessReport tightness_check(const IterationTrace& trace);

}  // namespace maiter
