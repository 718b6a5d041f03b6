#include "maiter/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maiter {
namespace {

constexpr double kEps = 1e-11;

bool solve(int dim, std::vector<LinIneq> cons, std::array<double, 4> c,
           double guard, std::array<double, 4>& out, uint64_t& rng) {
  if (dim == 1) {
    double lo = -guard, hi = guard;
    for (const LinIneq& ct : cons) {
      const double a = ct.a[0];
      if (a > kEps)
        hi = std::min(hi, ct.b / a);
      else if (a < -kEps)
        lo = std::max(lo, ct.b / a);
      else if (ct.b < -kEps)
        return false;
    }
    if (lo > hi + kEps * (1 + std::abs(lo))) return false;
    hi = std::max(hi, lo);
    out[0] = c[0] > 0 ? hi : (c[0] < 0 ? lo : std::clamp(0.0, lo, hi));
    return true;
  }

  // deterministic shuffle
  std::vector<int> order(cons.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i) {
    rng = rng * 6364136223846793005ULL + 1442695040888963407ULL;
    std::swap(order[i - 1], order[(rng >> 33) % i]);
  }

  for (int j = 0; j < dim; ++j)
    out[j] = c[j] > 0 ? guard : (c[j] < 0 ? -guard : 0.0);

  std::vector<int> done;
  done.reserve(cons.size());
  for (int idx : order) {
    const LinIneq& ct = cons[idx];
    double ax = 0, an = 0;
    for (int j = 0; j < dim; ++j) {
      ax += ct.a[j] * out[j];
      an = std::max(an, std::abs(ct.a[j]));
    }
    const double tol = kEps * (1 + std::abs(ct.b) + an * guard * 1e-3);
    if (ax <= ct.b + tol) {
      done.push_back(idx);
      continue;
    }
    if (an < kEps) return false;  // 0.x <= b violated

    // optimum moved to the hyperplane a.x = b; eliminate the variable with
    // the largest coefficient and recurse in dim-1
    int k = 0;
    for (int j = 1; j < dim; ++j)
      if (std::abs(ct.a[j]) > std::abs(ct.a[k])) k = j;
    const double ak = ct.a[k];

    std::vector<int> vars;  // surviving variable positions
    for (int j = 0; j < dim; ++j)
      if (j != k) vars.push_back(j);

    auto project = [&](const std::array<double, 4>& p, double q, LinIneq& o) {
      const double pk = p[k] / ak;
      for (size_t j = 0; j < vars.size(); ++j) o.a[j] = p[vars[j]] - pk * ct.a[vars[j]];
      o.b = q - pk * ct.b;
    };

    std::vector<LinIneq> sub;
    sub.reserve(done.size() + 2);
    for (int d2 : done) {
      LinIneq o;
      project(cons[d2].a, cons[d2].b, o);
      sub.push_back(o);
    }
    {  // guard box of the eliminated variable becomes explicit
      std::array<double, 4> e{0, 0, 0, 0};
      e[k] = 1;
      LinIneq o;
      project(e, guard, o);
      sub.push_back(o);
      e[k] = -1;
      project(e, guard, o);
      sub.push_back(o);
    }
    std::array<double, 4> csub{0, 0, 0, 0};
    {
      const double ck = c[k] / ak;
      for (size_t j = 0; j < vars.size(); ++j) csub[j] = c[vars[j]] - ck * ct.a[vars[j]];
    }
    std::array<double, 4> xs{0, 0, 0, 0};
    if (!solve(dim - 1, sub, csub, guard, xs, rng)) return false;
    double s = ct.b;
    for (size_t j = 0; j < vars.size(); ++j) {
      out[vars[j]] = xs[j];
      s -= ct.a[vars[j]] * xs[j];
    }
    out[k] = s / ak;
    done.push_back(idx);
  }
  return true;
}

}  // namespace

LpResult lp_maximize(int dim, const std::vector<LinIneq>& cons,
                     const std::array<double, 4>& c, double guard) {
  LpResult r;
  uint64_t rng = 0x9e3779b97f4a7c15ULL;
  r.feasible = solve(dim, cons, c, guard, r.x, rng);
  if (r.feasible) {
    for (int j = 0; j < dim; ++j)
      if (std::abs(r.x[j]) > guard * (1 - 1e-6)) r.bounded = false;
  }
  return r;
}

}  // namespace maiter
