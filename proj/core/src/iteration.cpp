#include "maiter/iteration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "maiter/errors.hpp"
#include "maiter/parallel.hpp"

namespace maiter {
namespace {

double limit_quad(double lo, const std::function<double(double)>& f) {
  // stretched midpoint rule on [lo, 1e6]
  double s = 0, x = lo, h = std::max(1e-3, lo * 0.01);
  while (x < 1e6) {
    s += f(x + 0.5 * h) * h;
    x += h;
    h *= 1.01;
  }
  return s;
}

/// integral of |x| h(a + r|x|) over {|x| >= R} (radial bound for the tail
/// first moments)
double tail_moment_envelope(int dim, double a, double r, double R, const Profile& prof) {
  if (dim == 1)
    return 2 * limit_quad(R, [&](double s) { return s * prof.h(a + r * s); });
  return 2 * M_PI * limit_quad(R, [&](double s) { return s * s * prof.h(a + r * s); });
}

}  // namespace

double auto_halfwidth(const ConvexBody& body, const Profile& profile, double tau) {
  const double eps = body.inradius / 8;
  const double r_eps = std::max(body.inradius - eps, 1e-6);
  const double floor = tau / body.volume;
  const int n = body.dim;
  double L = 4;
  while (L < 1e4) {
    const double t = floor + r_eps * L;
    if (t > 0) {
      const double surface = 2 * n * std::pow(2 * L, n - 1) / r_eps;
      if (surface * profile.H(t) < 1e-10) return L;
    }
    L *= 1.25;
  }
  throw DomainError(
      "no admissible truncation width below 1e4; set grid_l and tail_tol explicitly");
}

namespace {

SourceDensity build_density_impl(const ScalarField& phi, const Profile& profile,
                                 const EvaluationGrid& grid, double tail_slope,
                                 double tail_tol,
                                 const std::function<double(const RayGeom&)>& slope_fn) {
  const int64_t nn = grid.num_nodes();
  std::vector<double> hv(nn);
  parallel_for(nn, [&](int64_t k) {
    const double v = phi(grid.node(k));
    if (profile.positive_domain() && v <= 0)
      throw NonPositivePotential("density needs phi > 0 on the grid");
    hv[k] = profile.h(v);
  });

  SourceDensity rho;
  rho.grid = grid;
  rho.masses.resize(nn);
  for (int64_t k = 0; k < nn; ++k) rho.masses[k] = grid.quad_weight(k) * hv[k];

  // The mass outside the box is kept exactly: the generator is (piecewise)
  // linear along each outward ray, so int_0^inf h(v + s t) dt = H(v)/s.
  double tail = 0;
  for (const RayGeom& g : boundary_rays(grid)) {
    BoundaryRay ray;
    ray.geom = g;
    ray.gen_value = phi(g.edge(grid));
    ray.gen_slope = std::max(slope_fn(g), tail_slope);
    const double Hv = profile.H(ray.gen_value);
    ray.mass = g.tweight * Hv / ray.gen_slope;
    ray.mean_t = (profile.J(ray.gen_value) - ray.gen_value * Hv) / (ray.gen_slope * Hv);
    tail += ray.mass;
    rho.rays.push_back(ray);
  }

  double Z = tail;
  for (int64_t k = 0; k < nn; ++k) Z += rho.masses[k];
  tail /= Z;
  if (tail > tail_tol) {
    std::ostringstream os;
    os << "estimated truncated mass " << tail << " > " << tail_tol
       << "; enlarge the grid box";
    throw TailTooHeavy(os.str());
  }
  for (int64_t k = 0; k < nn; ++k) rho.masses[k] /= Z;
  for (BoundaryRay& r : rho.rays) r.mass /= Z;
  rho.tail_mass_bound = tail;
  rho.normalization = Z;
  return rho;
}

}  // namespace

SourceDensity build_density(const ScalarField& phi, const Profile& profile,
                            const EvaluationGrid& grid, double tail_slope,
                            double tail_tol) {
  const double delta = grid.spacing();
  auto fd_slope = [&](const RayGeom& g) {
    const Vec edge = g.edge(grid);
    return (phi(edge) - phi(edge - delta * g.outward(grid.dim))) / delta;
  };
  return build_density_impl(phi, profile, grid, tail_slope, tail_tol, fd_slope);
}

SourceDensity build_density(const MaxAffinePotential& phi, const Profile& profile,
                            const EvaluationGrid& grid, double tail_slope,
                            double tail_tol) {
  auto exact_slope = [&](const RayGeom& g) {
    const Vec edge = g.edge(grid);
    return dot(phi.sites[phi.argmax_index(edge)], g.outward(grid.dim));
  };
  return build_density_impl([&phi](const Vec& x) { return phi.eval(x); }, profile,
                            grid, tail_slope, tail_tol, exact_slope);
}

RunResult run(const IterationConfig& config) {
  const ConvexBody& body = config.body;
  const Profile& profile = config.profile;
  if (body.dim != profile.dim)
    throw DomainError("body and profile dimensions disagree");
  assert_centered(body, 1e-9);
  check_hypothesis_b1(profile);
  if (profile.positive_domain() && config.tau <= 0)
    throw TauNotPositive("power profile requires tau > 0");
  const bool positive = profile.positive_domain();

  const double L = config.grid_l > 0 ? config.grid_l
                                     : auto_halfwidth(body, profile, config.tau);
  const EvaluationGrid grid(body.dim, L, config.grid_m);

  TargetSites sites = make_target_sites(body, config.n_sites, config.seed);
  const std::vector<std::vector<int>> order =
      body.dim == 2 ? neighbor_order(sites.sites) : std::vector<std::vector<int>>{};

  const double tail_slope =
      std::max(1e-9, erode(body, body.inradius / 8).inradius_origin());
  const double growth_r = growth_slope(body);
  const double growth_slack =
      config.num_tol * std::max(1.0, std::abs(config.tau) / body.volume + growth_r * L);

  SolverOptions ot_opts;
  ot_opts.mass_tol = config.mass_tol;
  ot_opts.max_iters = config.ot_max_iters;
  ot_opts.damping = config.ot_damping;

  MaxAffinePotential phi;
  if (config.seed_kind == SeedKind::Oracle) {
    if (!config.seed_oracle) throw DomainError("seed_kind Oracle needs seed_oracle");
    phi = sample_potential(*config.seed_oracle, sites);
  } else {
    phi = seed_potential(sites);
  }
  phi = normalize(phi, config.tau, positive);
  phi = recenter(phi, argmin(phi).point);
  phi = normalize(phi, config.tau, positive);

  // sup-norm window: |x|_inf <= L/2
  std::vector<int64_t> window;
  for (int64_t k = 0; k < grid.num_nodes(); ++k) {
    const Vec x = grid.node(k);
    double inf = 0;
    for (int i = 0; i < x.n; ++i) inf = std::max(inf, std::abs(x[i]));
    if (inf <= L / 2 + 1e-12) window.push_back(k);
  }
  auto window_values = [&](const MaxAffinePotential& p) {
    std::vector<double> v(window.size());
    parallel_for(static_cast<int64_t>(window.size()),
                 [&](int64_t i) { v[i] = p.eval(grid.node(window[i])); });
    return v;
  };
  std::vector<double> win_prev = window_values(phi);

  RunResult out;
  out.trace.grid_l = L;
  out.trace.grid_m = config.grid_m;
  out.trace.n_sites = static_cast<int>(sites.sites.size());
  out.trace.tau = config.tau;
  out.trace.profile_name = profile.name();
  out.status = RunStatus::MaxIterations;
  out.prev_weights = phi.weights;

  double F_prev = F_of_extended(phi, profile, grid);
  {
    TraceRow r0;
    r0.iter = 0;
    r0.rec.F = F_prev;
    r0.rec.pairing = r0.rec.G = r0.rec.g_value = r0.rec.mabuchi = r0.rec.gap1 =
        r0.rec.gap2 = std::nan("");
    double conj_int = 0;
    for (size_t j = 0; j < phi.weights.size(); ++j)
      conj_int += phi.site_masses[j] * phi.weights[j];
    r0.rec.aubin_mabuchi = -conj_int / body.volume;
    // the seed's Ding energy anchors the D >= K >= D chain
    r0.rec.ding = profile.kind == ProfileKind::Exponential
                      ? F_prev + conj_int / body.volume + std::log(body.volume)
                      : std::nan("");
    r0.normalization_residual = std::abs(conj_int + config.tau);
    r0.min_value = phi.eval(Vec::zero(body.dim));
    const GrowthReport g0 = growth_bounds_check(phi, config.tau, body, grid, growth_slack);
    r0.growth_lower_margin = g0.lower_margin;
    r0.growth_upper_margin = g0.upper_margin;
    out.trace.rows.push_back(r0);
  }

  SourceDensity rho_prev;
  bool have_rho_prev = false;

  for (int it = 1; it <= config.max_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    TraceRow row;
    row.iter = it;

    SourceDensity rho = build_density(phi, profile, grid, tail_slope, config.tail_tol);
    row.tail_mass = rho.tail_mass_bound;

    SolveResult sol = solve_step(rho, sites, ot_opts, &phi.weights,
                                 body.dim == 2 ? &order : nullptr);
    row.max_rel_imbalance = sol.dual.max_rel_imbalance;

    MaxAffinePotential phi_next = normalize(sol.potential, config.tau, positive);

    GapReport gaps;
    try {
      gaps = duality_gap_check(phi_next, F_prev, rho, profile, config.coupling,
                               config.num_tol);
    } catch (const MonotonicityViolated&) {
      out.status = RunStatus::MonotonicityViolated;
      gaps.pairing = pairing(phi_next, rho);
      gaps.G = G_of(rho, profile);
      gaps.g_value = couple(config.coupling, gaps.pairing, gaps.G);
      gaps.F_next = F_of_extended(phi_next, profile, grid);
      gaps.gap1 = F_prev - gaps.g_value;
      gaps.gap2 = gaps.g_value - gaps.F_next;
    }
    row.rec.F = gaps.F_next;
    row.rec.pairing = gaps.pairing;
    row.rec.G = gaps.G;
    row.rec.g_value = gaps.g_value;
    row.rec.gap1 = gaps.gap1;
    row.rec.gap2 = gaps.gap2;

    if (profile.kind == ProfileKind::Exponential) {
      const DingMabuchi dm = ding_mabuchi(phi_next, rho, body, grid, profile);
      row.rec.ding = dm.ding;
      row.rec.mabuchi = dm.mabuchi;
      row.rec.aubin_mabuchi = dm.aubin_mabuchi;
    } else {
      row.rec.ding = row.rec.mabuchi = std::nan("");
      double conj_int = 0;
      for (size_t j = 0; j < phi_next.weights.size(); ++j)
        conj_int += phi_next.site_masses[j] * phi_next.weights[j];
      row.rec.aubin_mabuchi = -conj_int / body.volume;
    }

    const ArgminResult am = argmin(phi_next);
    row.a_norm = row.drift = norm(am.point);
    phi_next = recenter(phi_next, am.point);
    phi_next = normalize(phi_next, config.tau, positive);
    row.min_value = phi_next.eval(Vec::zero(body.dim));
    {
      double conj_int = 0;
      for (size_t j = 0; j < phi_next.weights.size(); ++j)
        conj_int += phi_next.site_masses[j] * phi_next.weights[j];
      row.normalization_residual = std::abs(conj_int + config.tau);
    }

    const GrowthReport growth =
        growth_bounds_check(phi_next, config.tau, body, grid, growth_slack);
    row.growth_lower_margin = growth.lower_margin;
    row.growth_upper_margin = growth.upper_margin;

    const std::vector<double> win_next = window_values(phi_next);
    double sup = 0;
    for (size_t i = 0; i < window.size(); ++i)
      sup = std::max(sup, std::abs(win_next[i] - win_prev[i]));
    row.sup_change = sup;

    if (config.w1_diag && have_rho_prev) {
      const W1Bracket w1 = w1_diagnostic(rho_prev, rho);
      row.w1_lower = w1.lower;
      row.w1_upper = w1.upper;
    }

    // tail first moments of the discrete density against the decay envelope
    // |x| h(min + r|x|) / Z implied by the growth bound of the generating
    // potential (phi here: the density's source)
    const double a_gen = phi.eval(Vec::zero(body.dim));
    const std::vector<double> folded = rho.folded_masses();
    for (int s = 0; s < 3; ++s) {
      const double R = L * (s + 1) / 4.0;
      double mom = 0;
      for (int64_t k = 0; k < grid.num_nodes(); ++k) {
        const double r = norm(grid.node(k));
        if (r >= R) mom += r * folded[k];
      }
      row.tail_moment[s] = mom;
      row.tail_envelope[s] =
          tail_moment_envelope(body.dim, a_gen, growth_r, R, profile) /
          rho.normalization;
    }

    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    out.trace.rows.push_back(row);

    out.prev_weights = recenter(phi, am.point).weights;
    phi = phi_next;
    F_prev = gaps.F_next;
    win_prev = win_next;
    rho_prev = std::move(rho);
    have_rho_prev = true;

    if (out.status == RunStatus::MonotonicityViolated) break;
    if (sup <= config.stop_tol) {
      out.status = RunStatus::Converged;
      break;
    }
  }

  out.potential = phi;
  return out;
}

W1Bracket w1_diagnostic(const SourceDensity& a, const SourceDensity& b) {
  if (!a.grid.same_layout(b.grid)) throw GridMismatch("densities on different grids");
  const EvaluationGrid& g = a.grid;
  const std::vector<double> ma = a.folded_masses(), mb = b.folded_masses();
  W1Bracket w;
  if (g.dim == 1) {
    double cum = 0, tot = 0;
    for (int64_t k = 0; k + 1 < g.num_nodes(); ++k) {
      cum += ma[k] - mb[k];
      tot += std::abs(cum) * g.spacing();
    }
    w.lower = w.upper = tot;
    return w;
  }
  // dual lower bound over 1-Lipschitz test functions
  double dx = 0, dy = 0, dr = 0;
  for (int64_t k = 0; k < g.num_nodes(); ++k) {
    const Vec x = g.node(k);
    const double dm = ma[k] - mb[k];
    dx += dm * x[0];
    dy += dm * x[1];
    dr += dm * norm(x);
  }
  w.lower = std::max({std::abs(dx), std::abs(dy), std::abs(dr)});
  // primal upper bound: transport along a serpentine Hamiltonian path
  const int m = g.points_per_axis;
  double cum = 0, cost = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int ii = (j % 2 == 0) ? i : m - 1 - i;
      const int64_t k = static_cast<int64_t>(j) * m + ii;
      cum += ma[k] - mb[k];
      cost += std::abs(cum) * g.spacing();
    }
  w.upper = cost;
  return w;
}

TightnessReport tightness_check(const IterationTrace& trace) {
  TightnessReport rep;
  for (const TraceRow& row : trace.rows) {
    if (row.iter == 0) continue;
    if (!(row.tail_moment[0] >= row.tail_moment[1] &&
          row.tail_moment[1] >= row.tail_moment[2]))
      rep.decreasing = false;
    for (int s = 0; s < 3; ++s) {
      if (row.tail_envelope[s] <= 0) continue;
      const double ratio = row.tail_moment[s] / row.tail_envelope[s];
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      if (row.tail_moment[s] > row.tail_envelope[s] * (1 + 1e-9))
        rep.below_envelope = false;
    }
  }
  return rep;
}

}  // namespace maiter
