#include "maiter/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maiter/errors.hpp"
#include "maiter/lp.hpp"
#include "maiter/parallel.hpp"

namespace maiter {

double MaxAffinePotential::eval(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < sites.size(); ++j)
    best = std::max(best, dot(x, sites[j]) - weights[j]);
  return best;
}

int MaxAffinePotential::argmax_index(const Vec& x) const {
  int arg = 0;
  double best = dot(x, sites[0]) - weights[0];
  for (size_t j = 1; j < sites.size(); ++j) {
    const double v = dot(x, sites[j]) - weights[j];
    if (v > best) {
      best = v;
      arg = static_cast<int>(j);
    }
  }
  return arg;
}

double MaxAffinePotential::total_site_mass() const {
  double s = 0;
  for (double m : site_masses) s += m;
  return s;
}

MaxAffinePotential seed_potential(const TargetSites& sites) {
  MaxAffinePotential phi;
  phi.dim = sites.sites.empty() ? 0 : sites.sites[0].n;
  phi.sites = sites.sites;
  phi.site_masses = sites.masses;
  phi.weights.reserve(sites.sites.size());
  for (const Vec& y : sites.sites) phi.weights.push_back(0.5 * norm_sq(y));
  return phi;
}

std::vector<char> active_mask(const MaxAffinePotential& phi) {
  const int n = static_cast<int>(phi.sites.size());
  std::vector<char> mask(n, 0);
  double wscale = 1;
  for (double w : phi.weights) wscale = std::max(wscale, std::abs(w));
  // touching contact counts as active: nudge the tested plane up slightly
  const double eps = 1e-9 * wscale;
  if (phi.dim == 1) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return phi.sites[a][0] < phi.sites[b][0]; });
    for (int a = 0; a < n; ++a) {
      const int j = perm[a];
      double left = -std::numeric_limits<double>::infinity(), right = -left;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        const int i = perm[b];
        const double cut = (phi.weights[i] - (phi.weights[j] - eps)) /
                           (phi.sites[i][0] - phi.sites[j][0]);
        (b < a ? left = std::max(left, cut) : right = std::min(right, cut));
      }
      mask[j] = left < right ? 1 : 0;
    }
    return mask;
  }
  if (phi.dim != 2) throw UnsupportedDimension("activity test implemented for n <= 2");
  parallel_for(n, [&](int64_t jj) {
    const int j = static_cast<int>(jj);
    ClipPoly poly = ClipPoly::box(-1e6, -1e6, 1e6, 1e6);
    for (int i = 0; i < n && !poly.empty(); ++i) {
      if (i == j) continue;
      const std::array<double, 2> a{phi.sites[i][0] - phi.sites[j][0],
                                    phi.sites[i][1] - phi.sites[j][1]};
      poly.clip(a, phi.weights[i] - (phi.weights[j] - eps), i);
    }
    mask[j] = poly.empty() ? 0 : 1;
  });
  return mask;
}

LegendreValues legendre_on_body(const MaxAffinePotential& phi) {
  const std::vector<char> mask = active_mask(phi);
  for (size_t j = 0; j < mask.size(); ++j)
    if (!mask[j]) {
      std::ostringstream os;
      os << "site " << j << " attains the max at no grid node";
      throw InactiveSite(os.str());
    }
  LegendreValues lv;
  lv.values = phi.weights;
  for (size_t j = 0; j < phi.weights.size(); ++j)
    lv.integral += phi.site_masses[j] * phi.weights[j];
  return lv;
}

MaxAffinePotential normalize(const MaxAffinePotential& phi, double tau,
                             bool require_positive) {
  double I = 0;
  for (size_t j = 0; j < phi.weights.size(); ++j)
    I += phi.site_masses[j] * phi.weights[j];
  const double c = (-tau - I) / phi.total_site_mass();
  MaxAffinePotential out = phi;
  for (double& w : out.weights) w += c;  // phi shifts by -c
  if (require_positive) {
    const ArgminResult m = argmin(out);
    if (m.value <= 0) {
      std::ostringstream os;
      os << "normalized minimum " << m.value << " is not positive";
      throw PositivityLost(os.str());
    }
  }
  return out;
}

ArgminResult argmin(const MaxAffinePotential& phi) {
  const int n = phi.dim;
  const int d = n + 1;  // variables (x, t)
  const double guard = 1e9;
  std::vector<LinIneq> cons;
  cons.reserve(phi.sites.size());
  for (size_t j = 0; j < phi.sites.size(); ++j) {
    LinIneq c;
    for (int i = 0; i < n; ++i) c.a[i] = phi.sites[j][i];
    c.a[n] = -1.0;
    c.b = phi.weights[j];
    cons.push_back(c);
  }
  std::array<double, 4> obj{0, 0, 0, 0};
  obj[n] = -1.0;  // minimize t
  LpResult r = lp_maximize(d, cons, obj, guard);
  if (!r.feasible || !r.bounded)
    throw Unbounded("potential has no minimizer; origin not interior to conv(sites)");
  const double tstar = r.x[n];
  // resolve flat minima lexicographically
  const double tie = 1e-12 * (1 + std::abs(tstar));
  for (int axis = 0; axis < n; ++axis) {
    LinIneq cap;
    cap.a[n] = 1.0;
    cap.b = tstar + tie;
    cons.push_back(cap);
    std::array<double, 4> o2{0, 0, 0, 0};
    o2[axis] = -1.0;
    LpResult r2 = lp_maximize(d, cons, o2, guard);
    if (!r2.feasible || !r2.bounded) break;
    cons.pop_back();
    LinIneq fix;
    fix.a[axis] = 1.0;
    fix.b = r2.x[axis] + tie;
    cons.push_back(fix);
    cons.push_back(cap);
    r = r2;
  }
  ArgminResult res;
  res.point = Vec::zero(n);
  for (int i = 0; i < n; ++i) res.point[i] = r.x[i];
  res.value = phi.eval(res.point);
  return res;
}

MaxAffinePotential recenter(const MaxAffinePotential& phi, const Vec& a) {
  MaxAffinePotential out = phi;
  for (size_t j = 0; j < out.weights.size(); ++j)
    out.weights[j] -= dot(a, out.sites[j]);
  return out;
}

GrowthReport growth_bounds_check(const MaxAffinePotential& phi, double tau,
                                 const ConvexBody& body, const EvaluationGrid& grid,
                                 double slack) {
  GrowthReport rep;
  rep.slope_r = growth_slope(body);
  for (const Vec& y : phi.sites) rep.gradient_bound = std::max(rep.gradient_bound, norm(y));
  const double floor = tau / body.volume;
  const double phi0 = phi.eval(Vec::zero(phi.dim));

  const int64_t nn = grid.num_nodes();
  std::vector<double> lower(nn), upper(nn);
  parallel_for(nn, [&](int64_t k) {
    const Vec x = grid.node(k);
    const double v = phi.eval(x);
    const double r = norm(x);
    lower[k] = v - (floor + rep.slope_r * r);
    upper[k] = phi0 + rep.gradient_bound * r - v;
  });
  rep.lower_margin = *std::min_element(lower.begin(), lower.end());
  rep.upper_margin = *std::min_element(upper.begin(), upper.end());
  rep.ok = rep.lower_margin >= -slack && rep.upper_margin >= -slack;
  if (!rep.ok) {
    std::ostringstream os;
    os << "growth bounds violated: lower margin " << rep.lower_margin
       << ", upper margin " << rep.upper_margin << ", slack " << slack;
    throw BoundViolated(os.str());
  }
  return rep;
}

}  // namespace maiter
