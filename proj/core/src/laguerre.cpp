#include "maiter/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "maiter/parallel.hpp"

namespace maiter {
namespace {

// --------------------------------------------------------------- 1-d ------

struct Piecewise1 {
  const EvaluationGrid* g;
  const std::vector<double>* v;

  double value(double x) const {
    const int m = g->points_per_axis;
    const double h = g->spacing();
    double t = (x + g->halfwidth) / h;
    int i = std::clamp(static_cast<int>(std::floor(t)), 0, m - 2);
    const double s = std::clamp(t - i, 0.0, 1.0);
    return (1 - s) * (*v)[i] + s * (*v)[i + 1];
  }

  // integral of the PL density and of x * density over [a, b] inside the box
  void segment(double a, double b, double& mass, double& mom) const {
    mass = mom = 0;
    a = std::max(a, -g->halfwidth);
    b = std::min(b, g->halfwidth);
    if (b <= a) return;
    const int m = g->points_per_axis;
    const double h = g->spacing();
    auto cell_part = [&](int i, double t0, double t1) {
      // local coordinate t in [0,1] over cell i
      const double x0 = g->axis_coord(i);
      const double v0 = (*v)[i], dv = (*v)[i + 1] - v0;
      auto I = [&](double t) { return v0 * t + 0.5 * dv * t * t; };
      auto J = [&](double t) { return 0.5 * v0 * t * t + dv * t * t * t / 3.0; };
      mass += h * (I(t1) - I(t0));
      mom += h * (x0 * (I(t1) - I(t0)) + h * (J(t1) - J(t0)));
    };
    const double ta = (a + g->halfwidth) / h, tb = (b + g->halfwidth) / h;
    int ia = std::clamp(static_cast<int>(std::floor(ta)), 0, m - 2);
    int ib = std::clamp(static_cast<int>(std::floor(tb - 1e-15)), 0, m - 2);
    if (ia == ib) {
      cell_part(ia, ta - ia, tb - ia);
      return;
    }
    cell_part(ia, ta - ia, 1.0);
    for (int i = ia + 1; i < ib; ++i) cell_part(i, 0.0, 1.0);
    cell_part(ib, 0.0, tb - ib);
  }
};

LaguerreStats stats_1d(const std::vector<Vec>& sites, const std::vector<double>& w,
                       const GridValues& density, LaguerreRequest req) {
  const int n = static_cast<int>(sites.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return sites[a][0] < sites[b][0]; });

  LaguerreStats out;
  out.mass.assign(n, 0.0);
  if (req.moments) out.moment.assign(n, Vec::zero(1));

  Piecewise1 pl{&density.grid, &density.values};
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> left(n, -inf), right(n, inf);
  std::vector<int> right_nbr(n, -1);
  for (int a = 0; a < n; ++a) {
    const int j = perm[a];
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const int i = perm[b];
      const double dy = sites[i][0] - sites[j][0];
      const double cut = (w[i] - w[j]) / dy;
      if (b < a) {
        left[a] = std::max(left[a], cut);
      } else if (cut < right[a]) {
        right[a] = cut;
        right_nbr[a] = b;
      }
    }
  }

  out.total_mass = 0;
  out.min_mass = inf;
  for (int a = 0; a < n; ++a) {
    const int j = perm[a];
    double mass = 0, mom = 0;
    if (left[a] < right[a]) pl.segment(left[a], right[a], mass, mom);
    out.mass[j] = mass;
    if (req.moments) out.moment[j] = Vec(mom);
    out.total_mass += mass;
    out.min_mass = std::min(out.min_mass, mass);
  }

  if (req.jacobian) {
    for (int a = 0; a < n; ++a) {
      if (right_nbr[a] < 0) continue;
      const double b = right[a];
      if (b <= left[a]) continue;  // empty cell
      if (b <= -density.grid.halfwidth || b >= density.grid.halfwidth) continue;
      const int j = perm[a], i = perm[right_nbr[a]];
      const double flux = pl.value(b);
      const double d = sites[i][0] - sites[j][0];
      out.jac.push_back({{std::min(i, j), std::max(i, j)}, flux / d});
    }
  }
  return out;
}

// --------------------------------------------------------------- 2-d ------

struct Bilinear {
  double x0, y0, h;
  double v00, v10, v01, v11;
  double operator()(double x, double y) const {
    const double t = (x - x0) / h, u = (y - y0) / h;
    return (1 - u) * ((1 - t) * v00 + t * v10) + u * ((1 - t) * v01 + t * v11);
  }
};

// degree-3 rule on a triangle (exact for the bilinear mass and its moments)
void tri_quad(const std::array<double, 2>& a, const std::array<double, 2>& b,
              const std::array<double, 2>& c, const Bilinear& f, double& mass,
              double& mx, double& my) {
  const double area =
      0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
  if (area == 0) return;
  static const double W[4] = {-27.0 / 48, 25.0 / 48, 25.0 / 48, 25.0 / 48};
  static const double B[4][3] = {{1 / 3.0, 1 / 3.0, 1 / 3.0},
                                 {0.6, 0.2, 0.2},
                                 {0.2, 0.6, 0.2},
                                 {0.2, 0.2, 0.6}};
  for (int q = 0; q < 4; ++q) {
    const double x = B[q][0] * a[0] + B[q][1] * b[0] + B[q][2] * c[0];
    const double y = B[q][0] * a[1] + B[q][1] * b[1] + B[q][2] * c[1];
    const double fv = W[q] * area * f(x, y);
    mass += fv;
    mx += fv * x;
    my += fv * y;
  }
}

struct CellScratch {
  double mass = 0;
  double mx = 0, my = 0;
  std::vector<std::pair<int, double>> flux;  // neighbor id -> boundary integral
};

LaguerreStats stats_2d(const std::vector<Vec>& sites, const std::vector<double>& w,
                       const GridValues& density, LaguerreRequest req,
                       const std::vector<std::vector<int>>* order) {
  const int n = static_cast<int>(sites.size());
  const EvaluationGrid& g = density.grid;
  const int m = g.points_per_axis;
  const double L = g.halfwidth, h = g.spacing();

  std::vector<std::vector<int>> local_order;
  if (!order) {
    local_order = neighbor_order(sites);
    order = &local_order;
  }

  std::vector<CellScratch> cells(n);
  parallel_for(n, [&](int64_t jj) {
    const int j = static_cast<int>(jj);
    ClipPoly poly = ClipPoly::box(-L, -L, L, L, -1);
    for (int i : (*order)[j]) {
      const std::array<double, 2> a{sites[i][0] - sites[j][0], sites[i][1] - sites[j][1]};
      poly.clip(a, w[i] - w[j], i);
      if (poly.empty()) return;
    }
    CellScratch& cs = cells[j];
    double xlo = poly.pt[0][0], xhi = xlo, ylo = poly.pt[0][1], yhi = ylo;
    for (const auto& p : poly.pt) {
      xlo = std::min(xlo, p[0]);
      xhi = std::max(xhi, p[0]);
      ylo = std::min(ylo, p[1]);
      yhi = std::max(yhi, p[1]);
    }
    const int ix0 = std::clamp(static_cast<int>(std::floor((xlo + L) / h)), 0, m - 2);
    const int ix1 = std::clamp(static_cast<int>(std::floor((xhi + L) / h - 1e-12)), 0, m - 2);
    const int iy0 = std::clamp(static_cast<int>(std::floor((ylo + L) / h)), 0, m - 2);
    const int iy1 = std::clamp(static_cast<int>(std::floor((yhi + L) / h - 1e-12)), 0, m - 2);

    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        ClipPoly sub = poly;
        const double px = g.axis_coord(ix), py = g.axis_coord(iy);
        sub.clip({1, 0}, px + h, -2);
        if (sub.empty()) continue;
        sub.clip({-1, 0}, -px, -2);
        if (sub.empty()) continue;
        sub.clip({0, 1}, py + h, -2);
        if (sub.empty()) continue;
        sub.clip({0, -1}, -py, -2);
        if (sub.empty()) continue;

        const Bilinear f{px,
                         py,
                         h,
                         density.values[static_cast<size_t>(iy) * m + ix],
                         density.values[static_cast<size_t>(iy) * m + ix + 1],
                         density.values[static_cast<size_t>(iy + 1) * m + ix],
                         density.values[static_cast<size_t>(iy + 1) * m + ix + 1]};
        for (size_t t = 1; t + 1 < sub.pt.size(); ++t)
          tri_quad(sub.pt[0], sub.pt[t], sub.pt[t + 1], f, cs.mass, cs.mx, cs.my);

        if (req.jacobian) {
          for (size_t e = 0; e < sub.pt.size(); ++e) {
            const int src = sub.src[e];
            if (src < 0) continue;
            const auto& p = sub.pt[e];
            const auto& q = sub.pt[(e + 1) % sub.pt.size()];
            const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
            if (len == 0) continue;
            constexpr double g1 = 0.5 - 0.5 / 1.7320508075688772;
            constexpr double g2 = 0.5 + 0.5 / 1.7320508075688772;
            const double s = 0.5 * (f(p[0] + g1 * (q[0] - p[0]), p[1] + g1 * (q[1] - p[1])) +
                                    f(p[0] + g2 * (q[0] - p[0]), p[1] + g2 * (q[1] - p[1])));
            cs.flux.push_back({src, len * s});
          }
        }
      }
    }
  });

  LaguerreStats out;
  out.mass.assign(n, 0.0);
  if (req.moments) out.moment.assign(n, Vec::zero(2));
  out.total_mass = 0;
  out.min_mass = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    out.mass[j] = cells[j].mass;
    if (req.moments) out.moment[j] = Vec(cells[j].mx, cells[j].my);
    out.total_mass += cells[j].mass;
    out.min_mass = std::min(out.min_mass, cells[j].mass);
  }

  if (req.jacobian) {
    // sum the pixel subsegments within each cell, then average the two sides
    std::map<std::pair<int, int>, std::pair<double, int>> acc;
    for (int j = 0; j < n; ++j) {
      std::map<int, double> side;
      for (const auto& [i, fl] : cells[j].flux) side[i] += fl;
      for (const auto& [i, fl] : side) {
        auto& slot = acc[{std::min(i, j), std::max(i, j)}];
        slot.first += fl;
        slot.second += 1;
      }
    }
    for (const auto& [key, val] : acc) {
      const double d = dist(sites[key.first], sites[key.second]);
      out.jac.push_back({key, val.first / (val.second * d)});
    }
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> neighbor_order(const std::vector<Vec>& sites) {
  const int n = static_cast<int>(sites.size());
  std::vector<std::vector<int>> order(n);
  for (int j = 0; j < n; ++j) {
    order[j].reserve(n - 1);
    for (int i = 0; i < n; ++i)
      if (i != j) order[j].push_back(i);
    std::sort(order[j].begin(), order[j].end(), [&](int a, int b) {
      return norm_sq(sites[a] - sites[j]) < norm_sq(sites[b] - sites[j]);
    });
  }
  return order;
}

LaguerreStats laguerre_stats(const std::vector<Vec>& sites,
                             const std::vector<double>& weights,
                             const GridValues& density, LaguerreRequest req,
                             const std::vector<std::vector<int>>* order) {
  if (density.grid.dim == 1) return stats_1d(sites, weights, density, req);
  return stats_2d(sites, weights, density, req, order);
}

}  // namespace maiter
