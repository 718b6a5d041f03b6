#include <doctest.h>

#include <cmath>
#include <random>

#include "maiter/errors.hpp"
#include "maiter/iteration.hpp"
#include "maiter/oracle.hpp"
#include "maiter/ot_solver.hpp"

using namespace maiter;

namespace {

SourceDensity density_from(const ScalarField& f, const EvaluationGrid& grid) {
  SourceDensity rho;
  rho.grid = grid;
  rho.masses.resize(grid.num_nodes());
  double Z = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    rho.masses[k] = grid.quad_weight(k) * std::max(0.0, f(grid.node(k)));
    Z += rho.masses[k];
  }
  for (double& m : rho.masses) m /= Z;
  rho.normalization = Z;
  return rho;
}

TargetSites interval_sites(int n) {
  return make_target_sites(build_body({Vec(-1.0), Vec(1.0)}), n, 1);
}

TargetSites two_sites() {
  TargetSites t;
  t.sites = {Vec(-0.5), Vec(0.5)};
  t.masses = {1.0, 1.0};
  t.total_mass = 2.0;
  return t;
}

double gauge_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0;
  for (size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

}  // namespace

TEST_CASE("assign_cells") {
  const EvaluationGrid grid(1, 2.0, 401);
  SUBCASE("symmetric source splits evenly") {
    const SourceDensity rho =
        density_from([](const Vec& x) { return std::exp(-x[0] * x[0]); }, grid);
    const std::vector<double> cells = assign_cells({0.0, 0.0}, two_sites().sites, rho);
    CHECK(cells[0] == doctest::Approx(0.5).epsilon(0.01));
    CHECK(cells[1] == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("a dominated plane gets nothing") {
    const SourceDensity rho =
        density_from([](const Vec& x) { return std::exp(-x[0] * x[0]); }, grid);
    const std::vector<double> cells = assign_cells({0.0, 10.0}, two_sites().sites, rho);
    CHECK(cells[0] == doctest::Approx(1.0));
    CHECK(cells[1] == doctest::Approx(0.0));
  }
  SUBCASE("breakpoint at w2 - w1") {
    const SourceDensity rho = density_from(
        [](const Vec& x) { return x[0] >= 0 && x[0] <= 1 ? 1.0 : 0.0; }, grid);
    const std::vector<double> cells = assign_cells({0.0, 0.5}, two_sites().sites, rho);
    CHECK(cells[0] == doctest::Approx(0.5).epsilon(0.03));
    CHECK(cells[1] == doctest::Approx(0.5).epsilon(0.03));
  }
}

TEST_CASE("identity transport") {
  const EvaluationGrid grid(1, 2.0, 801);
  const TargetSites ts = interval_sites(33);
  const SourceDensity rho = density_from(
      [](const Vec& x) { return std::abs(x[0]) < 1 ? 1.0 : 0.0; }, grid);
  SolverOptions opts;
  opts.mass_tol = 1e-9;
  const SolveResult sol = solve_step(rho, ts, opts);
  // w_j = |y_j|^2/2 + const: check against the gauge-aligned quadratic
  double c = 1e300;
  for (const Vec& y : ts.sites) c = std::min(c, 0.5 * norm_sq(y));
  for (size_t j = 0; j < ts.sites.size(); ++j)
    CHECK(sol.potential.weights[j] ==
          doctest::Approx(0.5 * norm_sq(ts.sites[j]) - c).epsilon(2e-2));
  CHECK(sol.dual.max_rel_imbalance <= 1e-9);
}

TEST_CASE("two equal sites split the uniform source at one half") {
  const EvaluationGrid grid(1, 2.0, 801);
  const SourceDensity rho = density_from(
      [](const Vec& x) { return x[0] >= 0 && x[0] <= 1 ? 1.0 : 0.0; }, grid);
  SolverOptions opts;
  opts.mass_tol = 1e-10;
  const SolveResult sol = solve_step(rho, two_sites(), opts);
  CHECK(sol.potential.weights[1] - sol.potential.weights[0] ==
        doctest::Approx(0.5).epsilon(2e-3));
  const MaxAffinePotential exact = solve_step_1d_exact(rho, two_sites());
  CHECK(exact.weights[1] - exact.weights[0] == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("exponential oracle is a fixed point of one step") {
  const EvaluationGrid grid(1, 8.0, 257);
  const OracleSolution o = exp_oracle_1d();
  const TargetSites ts = interval_sites(129);
  const SourceDensity rho =
      build_density(o.phi, o.profile, grid, 0.875, 1e-2);
  SolverOptions opts;
  opts.mass_tol = 1e-8;
  const SolveResult sol = solve_step(rho, ts, opts);
  // align constants at x = 0 and compare on the grid
  const double shift = sol.potential.eval(Vec(0.0)) - o.phi(Vec(0.0));
  double worst = 0;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const Vec x = grid.node(k);
    if (std::abs(x[0]) > 4) continue;
    worst = std::max(worst,
                     std::abs(sol.potential.eval(x) - shift - o.phi(x)));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("dual ascent matches the quantile oracle on random sources") {
  const EvaluationGrid grid(1, 6.0, 513);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng), x0 = 0.5 * (u(rng) - 1.1);
    const SourceDensity rho = density_from(
        [&](const Vec& x) {
          return a * std::exp(-b * (x[0] - x0) * (x[0] - x0)) +
                 0.05 * c / (1 + x[0] * x[0]);
        },
        grid);
    const int nsites = 17 + static_cast<int>(trial) % 3 * 16;
    const TargetSites ts = interval_sites(nsites);
    SolverOptions opts;
    opts.mass_tol = 1e-12;
    const SolveResult sol = solve_step(rho, ts, opts);
    const MaxAffinePotential exact = solve_step_1d_exact(rho, ts);
    CHECK(gauge_diff(sol.potential.weights, exact.weights) < 1e-8);

    // dual value never decreases across accepted steps
    for (size_t i = 1; i < sol.dual.dual_history.size(); ++i)
      CHECK(sol.dual.dual_history[i] >=
            sol.dual.dual_history[i - 1] - 1e-12 * (1 + std::abs(sol.dual.dual_history[i])));

    // pushforward within n_sites * mass_tol
    double sum = 0;
    double tot = 0;
    for (double m : ts.masses) tot += m;
    for (size_t j = 0; j < ts.masses.size(); ++j)
      sum += std::abs(sol.dual.cell_masses[j] - ts.masses[j] / tot);
    CHECK(sum <= nsites * 1e-10);
  }
}

TEST_CASE("cyclical monotonicity of the node assignment") {
  const EvaluationGrid grid(1, 6.0, 513);
  const SourceDensity rho = density_from(
      [](const Vec& x) { return std::exp(-0.7 * std::abs(x[0])); }, grid);
  const TargetSites ts = interval_sites(33);
  const SolveResult sol = solve_step(rho, ts);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int64_t> pick(0, grid.num_nodes() - 1);
  for (int t = 0; t < 100; ++t) {
    const Vec x = grid.node(pick(rng));
    const Vec xp = grid.node(pick(rng));
    const Vec y = ts.sites[sol.potential.argmax_index(x)];
    const Vec yp = ts.sites[sol.potential.argmax_index(xp)];
    CHECK(dot(x - xp, y - yp) >= -1e-9);
  }
}

TEST_CASE("solver error paths") {
  const EvaluationGrid grid(1, 6.0, 257);
  const SourceDensity rho = density_from(
      [](const Vec& x) { return std::exp(-x[0] * x[0]); }, grid);
  const TargetSites ts = interval_sites(17);
  SolverOptions opts;
  opts.mass_tol = 1e-14;
  opts.max_iters = 0;
  CHECK_THROWS_AS(solve_step(rho, ts, opts), NoConvergence);
}

TEST_CASE("2-d solver splits a separable source") {
  const ConvexBody sq =
      build_body({Vec(-1.0, -1.0), Vec(1.0, -1.0), Vec(1.0, 1.0), Vec(-1.0, 1.0)});
  const EvaluationGrid grid(2, 4.0, 65);
  const TargetSites ts = make_target_sites(sq, 64, 1);
  const SourceDensity rho = density_from(
      [](const Vec& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); }, grid);
  SolverOptions opts;
  opts.mass_tol = 1e-8;
  const SolveResult sol = solve_step(rho, ts, opts);
  CHECK(sol.dual.max_rel_imbalance <= 1e-8);
  double tot = 0;
  for (double m : sol.dual.cell_masses) tot += m;
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
  // symmetric configuration: the weight field inherits the square symmetry
  const MaxAffinePotential& phi = sol.potential;
  CHECK(phi.eval(Vec(0.6, 0.3)) == doctest::Approx(phi.eval(Vec(-0.6, 0.3))).epsilon(1e-6));
  CHECK(phi.eval(Vec(0.6, 0.3)) == doctest::Approx(phi.eval(Vec(0.3, 0.6))).epsilon(1e-6));
}
