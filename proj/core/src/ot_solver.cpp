#include "maiter/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "maiter/errors.hpp"
#include "maiter/parallel.hpp"

namespace maiter {

GridValues SourceDensity::node_values() const {
  GridValues gv;
  gv.grid = grid;
  gv.values.resize(masses.size());
  for (size_t k = 0; k < masses.size(); ++k)
    gv.values[k] = masses[k] / grid.quad_weight(static_cast<int64_t>(k));
  return gv;
}

std::vector<double> SourceDensity::folded_masses() const {
  std::vector<double> m = masses;
  for (const BoundaryRay& r : rays) m[r.geom.node] += r.mass;
  return m;
}

GridValues SourceDensity::solver_values() const {
  GridValues gv;
  gv.grid = grid;
  const std::vector<double> m = folded_masses();
  gv.values.resize(m.size());
  for (size_t k = 0; k < m.size(); ++k)
    gv.values[k] = m[k] / grid.quad_weight(static_cast<int64_t>(k));
  return gv;
}

namespace {

// dense LDL^T solve of the regularized Newton system (-J + mu I) d = r;
// the system is an M-matrix on the gauge complement, small enough dense
double solve_spd(std::vector<double>& A, std::vector<double>& rhs, int n) {
  // returns max diagonal for diagnostics; A is overwritten
  double maxd = 0;
  for (int i = 0; i < n; ++i) maxd = std::max(maxd, A[static_cast<size_t>(i) * n + i]);
  for (int k = 0; k < n; ++k) {
    double* Ak = &A[static_cast<size_t>(k) * n];
    const double piv = Ak[k];
    for (int i = k + 1; i < n; ++i) {
      double* Ai = &A[static_cast<size_t>(i) * n];
      const double f = Ai[k] / piv;
      if (f == 0) continue;
      for (int j = k + 1; j < n; ++j) Ai[j] -= f * Ak[j];
      rhs[i] -= f * rhs[k];
      Ai[k] = f;
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    const double* Ai = &A[static_cast<size_t>(i) * n];
    for (int j = i + 1; j < n; ++j) s -= Ai[j] * rhs[j];
    rhs[i] = s / Ai[i];
  }
  return maxd;
}

double dual_value(const std::vector<Vec>& sites, const std::vector<double>& w,
                  const std::vector<double>& target, const LaguerreStats& st) {
  // Phi(w) = -int phi_w drho - sum_j t_j w_j, phi_w = max(<x,y_j> - w_j)
  double phi_int = 0;
  for (size_t j = 0; j < sites.size(); ++j)
    phi_int += dot(sites[j], st.moment[j]) - w[j] * st.mass[j];
  double tw = 0;
  for (size_t j = 0; j < w.size(); ++j) tw += target[j] * w[j];
  return -phi_int - tw;
}

}  // namespace

SolveResult solve_step(const SourceDensity& source, const TargetSites& sites,
                       const SolverOptions& opts,
                       const std::vector<double>* warm_start,
                       const std::vector<std::vector<int>>* order) {
  const int n = static_cast<int>(sites.sites.size());
  const GridValues density = source.solver_values();

  std::vector<double> target(sites.masses);
  {
    double tot = 0;
    for (double t : target) tot += t;
    for (double& t : target) t /= tot;  // probabilities
  }
  const double min_target = *std::min_element(target.begin(), target.end());

  std::vector<std::vector<int>> local_order;
  if (!order && source.grid.dim == 2) {
    local_order = neighbor_order(sites.sites);
    order = &local_order;
  }

  auto stats_for = [&](const std::vector<double>& w, bool full) {
    LaguerreRequest rq;
    rq.moments = full;
    rq.jacobian = full;
    return laguerre_stats(sites.sites, w, density, rq, order);
  };

  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = 0.5 * norm_sq(sites.sites[j]);
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    LaguerreRequest rq;
    const LaguerreStats probe = laguerre_stats(sites.sites, *warm_start, density, rq, order);
    if (probe.min_mass > 1e-3 * min_target) w = *warm_start;
  }

  LaguerreStats st = stats_for(w, true);
  const double eps0 = 0.5 * std::min(min_target, st.min_mass);
  if (eps0 <= 0) throw EmptyCellPersistent("initial weights leave an empty cell");

  auto max_err = [&](const LaguerreStats& s) {
    double e = 0;
    for (int j = 0; j < n; ++j) e = std::max(e, std::abs(s.mass[j] - target[j]));
    return e;
  };
  auto max_rel = [&](const LaguerreStats& s) {
    double e = 0;
    for (int j = 0; j < n; ++j)
      e = std::max(e, std::abs(s.mass[j] - target[j]) / target[j]);
    return e;
  };

  double err = max_err(st);
  std::vector<double> dual_history{dual_value(sites.sites, w, target, st)};
  int it = 0;
  for (; it < opts.max_iters && max_rel(st) > opts.mass_tol; ++it) {
    // assemble -J + mu I (J = dmass/dw, symmetric, rows sum to zero)
    std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
    for (const auto& [key, val] : st.jac) {
      const auto [j, i] = key;
      A[static_cast<size_t>(j) * n + i] -= val;
      A[static_cast<size_t>(i) * n + j] -= val;
      A[static_cast<size_t>(j) * n + j] += val;
      A[static_cast<size_t>(i) * n + i] += val;
    }
    double maxdiag = 0;
    for (int j = 0; j < n; ++j)
      maxdiag = std::max(maxdiag, A[static_cast<size_t>(j) * n + j]);
    const double mu = std::max(1e-12 * maxdiag, 1e-300);
    for (int j = 0; j < n; ++j) A[static_cast<size_t>(j) * n + j] += mu;

    std::vector<double> d(n);
    for (int j = 0; j < n; ++j) d[j] = st.mass[j] - target[j];
    solve_spd(A, d, n);
    double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    for (double& x : d) x -= mean;

    double alpha = 1.0;
    bool accepted = false;
    bool empty_blocked = false;
    while (alpha > 1e-12) {
      std::vector<double> wt(w);
      for (int j = 0; j < n; ++j) wt[j] += alpha * d[j];
      LaguerreStats trial = stats_for(wt, false);
      if (trial.min_mass < eps0) {
        empty_blocked = true;
        alpha *= opts.damping;
        continue;
      }
      const double trial_err = max_err(trial);
      if (trial_err <= (1 - 0.5 * alpha) * err) {
        w.swap(wt);
        err = trial_err;
        accepted = true;
        break;
      }
      alpha *= opts.damping;
    }
    if (!accepted) {
      if (empty_blocked)
        throw EmptyCellPersistent("line search cannot keep all cells populated");
      std::ostringstream os;
      os << "stalled at residual " << err << " after " << it << " iterations";
      throw NoConvergence(os.str());
    }
    st = stats_for(w, true);
    dual_history.push_back(dual_value(sites.sites, w, target, st));
  }

  if (max_rel(st) > opts.mass_tol) {
    std::ostringstream os;
    os << "relative imbalance " << max_rel(st) << " > " << opts.mass_tol << " after "
       << opts.max_iters << " iterations";
    throw NoConvergence(os.str());
  }

  SolveResult res;
  res.dual.weights = w;
  res.dual.cell_masses = st.mass;
  res.dual.dual_value = dual_history.back();
  res.dual.dual_history = std::move(dual_history);
  res.dual.iterations = it;
  res.dual.max_rel_imbalance = max_rel(st);

  const double wmin = *std::min_element(w.begin(), w.end());
  MaxAffinePotential phi;
  phi.dim = source.grid.dim;
  phi.sites = sites.sites;
  phi.site_masses = sites.masses;
  phi.weights = w;
  for (double& x : phi.weights) x -= wmin;
  res.potential = phi;
  return res;
}

MaxAffinePotential solve_step_1d_exact(const SourceDensity& source,
                                       const TargetSites& sites) {
  const int n = static_cast<int>(sites.sites.size());
  const EvaluationGrid& g = source.grid;
  const int m = g.points_per_axis;
  const GridValues density = source.solver_values();

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return sites.sites[a][0] < sites.sites[b][0]; });

  double tot = 0;
  for (double t : sites.masses) tot += t;

  // piecewise-quadratic CDF of the interpolated density
  std::vector<double> cdf(m, 0.0);
  const double h = g.spacing();
  for (int i = 0; i + 1 < m; ++i)
    cdf[i + 1] = cdf[i] + 0.5 * h * (density.values[i] + density.values[i + 1]);
  const double total = cdf[m - 1];

  auto quantile = [&](double q) {
    q = std::clamp(q, 0.0, total);
    int lo = 0, hi = m - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (cdf[mid] <= q ? lo : hi) = mid;
    }
    const double v0 = density.values[lo], v1 = density.values[lo + 1];
    const double rem = q - cdf[lo];
    // solve h (v0 t + (v1-v0) t^2 / 2) = rem on t in [0,1]
    const double a = 0.5 * (v1 - v0) * h, b = v0 * h;
    double t;
    if (std::abs(a) < 1e-300 * std::abs(b) || a == 0)
      t = b > 0 ? rem / b : 0.0;
    else {
      const double disc = std::max(0.0, b * b + 4 * a * rem);
      t = (-b + std::sqrt(disc)) / (2 * a);
      if (!(t >= 0 && t <= 1)) t = std::clamp(b != 0 ? rem / b : 0.0, 0.0, 1.0);
    }
    return g.axis_coord(lo) + t * h;
  };

  std::vector<double> w(n, 0.0);
  double cum = 0;
  for (int a = 0; a + 1 < n; ++a) {
    cum += sites.masses[perm[a]] / tot;
    const double b = quantile(cum * total);
    const int j = perm[a], i = perm[a + 1];
    w[i] = w[j] + b * (sites.sites[i][0] - sites.sites[j][0]);
  }
  const double wmin = *std::min_element(w.begin(), w.end());
  for (double& x : w) x -= wmin;

  MaxAffinePotential phi;
  phi.dim = 1;
  phi.sites = sites.sites;
  phi.site_masses = sites.masses;
  phi.weights = w;
  return phi;
}

std::vector<double> assign_cells(const std::vector<double>& weights,
                                 const std::vector<Vec>& sites,
                                 const SourceDensity& source) {
  const int64_t nn = source.grid.num_nodes();
  std::vector<int> owner(nn);
  parallel_for(nn, [&](int64_t k) {
    const Vec x = source.grid.node(k);
    int arg = 0;
    double best = dot(x, sites[0]) - weights[0];
    for (size_t j = 1; j < sites.size(); ++j) {
      const double v = dot(x, sites[j]) - weights[j];
      if (v > best) {  // ties stay with the lowest index
        best = v;
        arg = static_cast<int>(j);
      }
    }
    owner[k] = arg;
  });
  const std::vector<double> folded = source.folded_masses();
  std::vector<double> cell(sites.size(), 0.0);
  for (int64_t k = 0; k < nn; ++k) cell[owner[k]] += folded[k];
  return cell;
}

}  // namespace maiter
