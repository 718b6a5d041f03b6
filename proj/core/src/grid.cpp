#include "maiter/grid.hpp"

#include <algorithm>
#include <cmath>

#include "maiter/errors.hpp"

namespace maiter {

EvaluationGrid::EvaluationGrid(int n, double L, int m)
    : dim(n), halfwidth(L), points_per_axis(m) {
  if (n < 1 || n > 2) throw UnsupportedDimension("grids support n in {1,2}");
  if (m < 2 || L <= 0) throw DomainError("grid needs m >= 2 and L > 0");
}

int64_t EvaluationGrid::num_nodes() const {
  int64_t n = points_per_axis;
  return dim == 1 ? n : n * n;
}

Vec EvaluationGrid::node(int64_t k) const {
  if (dim == 1) return Vec(axis_coord(static_cast<int>(k)));
  const int m = points_per_axis;
  return Vec(axis_coord(static_cast<int>(k % m)), axis_coord(static_cast<int>(k / m)));
}

double EvaluationGrid::quad_weight(int64_t k) const {
  const int m = points_per_axis;
  const double h = spacing();
  auto axis_w = [&](int i) { return (i == 0 || i == m - 1) ? 0.5 * h : h; };
  if (dim == 1) return axis_w(static_cast<int>(k));
  return axis_w(static_cast<int>(k % m)) * axis_w(static_cast<int>(k / m));
}

std::vector<RayGeom> boundary_rays(const EvaluationGrid& grid) {
  std::vector<RayGeom> rays;
  const int m = grid.points_per_axis;
  if (grid.dim == 1) {
    rays.push_back({0, 1.0, 0, -1.0});
    rays.push_back({m - 1, 1.0, 0, 1.0});
    return rays;
  }
  const double h = grid.spacing();
  auto tw = [&](int i) { return (i == 0 || i == m - 1) ? 0.5 * h : h; };
  for (int i = 0; i < m; ++i) {
    rays.push_back({static_cast<int64_t>(i) * m, tw(i), 0, -1.0});
    rays.push_back({static_cast<int64_t>(i) * m + m - 1, tw(i), 0, 1.0});
    rays.push_back({static_cast<int64_t>(i), tw(i), 1, -1.0});
    rays.push_back({static_cast<int64_t>(m - 1) * m + i, tw(i), 1, 1.0});
  }
  return rays;
}

double GridValues::interp(const Vec& x) const {
  const int m = grid.points_per_axis;
  const double h = grid.spacing();
  auto locate = [&](double c) {
    double t = (c + grid.halfwidth) / h;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, m - 2);
    return std::pair<int, double>{i, std::clamp(t - i, 0.0, 1.0)};
  };
  if (grid.dim == 1) {
    auto [i, t] = locate(x[0]);
    return (1 - t) * values[i] + t * values[i + 1];
  }
  auto [i, t] = locate(x[0]);
  auto [j, u] = locate(x[1]);
  const double v00 = values[j * m + i], v10 = values[j * m + i + 1];
  const double v01 = values[(j + 1) * m + i], v11 = values[(j + 1) * m + i + 1];
  return (1 - u) * ((1 - t) * v00 + t * v10) + u * ((1 - t) * v01 + t * v11);
}

}  // namespace maiter
