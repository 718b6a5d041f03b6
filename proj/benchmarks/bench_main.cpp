#include <benchmark/benchmark.h>

#include <cmath>

#include "maiter/iteration.hpp"
#include "maiter/laguerre.hpp"
#include "maiter/oracle.hpp"

using namespace maiter;

namespace {

SourceDensity exp_density(const EvaluationGrid& grid) {
  const OracleSolution o = exp_oracle_1d();
  return build_density(o.phi, o.profile, grid, 0.875, 1e-1);
}

SourceDensity exp_density_2d(const EvaluationGrid& grid) {
  const OracleSolution o = separable_oracle_2d(Profile::exponential(2));
  return build_density(o.phi, o.profile, grid, 0.875, 1e-1);
}

}  // namespace

static void BM_LaguerreMasses1D(benchmark::State& state) {
  const EvaluationGrid grid(1, 8.0, 257);
  const SourceDensity rho = exp_density(grid);
  const GridValues gv = rho.node_values();
  const TargetSites ts = make_target_sites(build_body({Vec(-1.0), Vec(1.0)}),
                                           static_cast<int>(state.range(0)), 1);
  std::vector<double> w;
  for (const Vec& y : ts.sites) w.push_back(0.5 * norm_sq(y));
  LaguerreRequest req;
  req.jacobian = true;
  for (auto _ : state) {
    const LaguerreStats st = laguerre_stats(ts.sites, w, gv, req);
    benchmark::DoNotOptimize(st.total_mass);
  }
}
BENCHMARK(BM_LaguerreMasses1D)->Arg(129)->Arg(513);

static void BM_LaguerreMasses2D(benchmark::State& state) {
  const ConvexBody sq =
      build_body({Vec(-1.0, -1.0), Vec(1.0, -1.0), Vec(1.0, 1.0), Vec(-1.0, 1.0)});
  const EvaluationGrid grid(2, 8.0, 129);
  const SourceDensity rho = exp_density_2d(grid);
  const GridValues gv = rho.node_values();
  const TargetSites ts = make_target_sites(sq, static_cast<int>(state.range(0)), 1);
  std::vector<double> w;
  for (const Vec& y : ts.sites) w.push_back(0.5 * norm_sq(y));
  const auto order = neighbor_order(ts.sites);
  LaguerreRequest req;
  req.jacobian = true;
  for (auto _ : state) {
    const LaguerreStats st = laguerre_stats(ts.sites, w, gv, req, &order);
    benchmark::DoNotOptimize(st.total_mass);
  }
}
BENCHMARK(BM_LaguerreMasses2D)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_SolveStep1D(benchmark::State& state) {
  const EvaluationGrid grid(1, 8.0, 257);
  const SourceDensity rho = exp_density(grid);
  const TargetSites ts = make_target_sites(build_body({Vec(-1.0), Vec(1.0)}), 129, 1);
  SolverOptions opts;
  opts.mass_tol = 1e-7;
  for (auto _ : state) {
    const SolveResult sol = solve_step(rho, ts, opts);
    benchmark::DoNotOptimize(sol.dual.iterations);
  }
}
BENCHMARK(BM_SolveStep1D)->Unit(benchmark::kMillisecond);

static void BM_PotentialGridEval(benchmark::State& state) {
  const OracleSolution o = exp_oracle_1d();
  const TargetSites ts = make_target_sites(build_body({Vec(-1.0), Vec(1.0)}), 129, 1);
  const MaxAffinePotential phi = sample_potential(o, ts);
  const EvaluationGrid grid(1, 8.0, 257);
  for (auto _ : state) {
    double acc = 0;
    for (int64_t k = 0; k < grid.num_nodes(); ++k) acc += phi.eval(grid.node(k));
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_PotentialGridEval);

static void BM_FunctionalF(benchmark::State& state) {
  const OracleSolution o = exp_oracle_1d();
  const EvaluationGrid grid(1, 8.0, 257);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F_of(o.phi, o.profile, grid));
  }
}
BENCHMARK(BM_FunctionalF);

static void BM_BuildDensity2D(benchmark::State& state) {
  const OracleSolution o = separable_oracle_2d(Profile::exponential(2));
  const EvaluationGrid grid(2, 8.0, 129);
  for (auto _ : state) {
    const SourceDensity rho = build_density(o.phi, o.profile, grid, 0.875, 1e-1);
    benchmark::DoNotOptimize(rho.normalization);
  }
}
BENCHMARK(BM_BuildDensity2D)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
