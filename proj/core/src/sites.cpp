#include "maiter/sites.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "maiter/errors.hpp"

namespace maiter {
namespace {

TargetSites sites_1d(const ConvexBody& body, int n) {
  const double a = body.vertices[0][0], b = body.vertices[1][0];
  const double h = (b - a) / n;
  TargetSites s;
  for (int j = 0; j < n; ++j) {
    s.sites.push_back(Vec(a + (j + 0.5) * h));
    s.masses.push_back(h);
  }
  s.total_mass = b - a;
  return s;
}

struct VorCell {
  double area;
  std::array<double, 2> centroid;
};

VorCell voronoi_cell(const ConvexBody& body, const std::vector<Vec>& pts, int j) {
  ClipPoly poly;
  for (const Vec& v : body.vertices) poly.pt.push_back({v[0], v[1]});
  poly.src.assign(poly.pt.size(), -1);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (static_cast<int>(i) == j) continue;
    // bisector halfplane towards site i
    const std::array<double, 2> a{pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]};
    const double b = 0.5 * (norm_sq(pts[i]) - norm_sq(pts[j]));
    poly.clip(a, b, static_cast<int>(i));
    if (poly.empty()) return {0.0, {pts[j][0], pts[j][1]}};
  }
  return {poly.area(), poly.centroid()};
}

TargetSites sites_2d(const ConvexBody& body, int n_req, uint64_t seed, int lloyd_steps) {
  double xlo = body.vertices[0][0], xhi = xlo, ylo = body.vertices[0][1], yhi = ylo;
  for (const Vec& v : body.vertices) {
    xlo = std::min(xlo, v[0]);
    xhi = std::max(xhi, v[0]);
    ylo = std::min(ylo, v[1]);
    yhi = std::max(yhi, v[1]);
  }
  const double pitch = std::sqrt(body.volume / n_req);
  std::vector<Vec> pts;
  for (double y = ylo + 0.5 * pitch; y < yhi; y += pitch)
    for (double x = xlo + 0.5 * pitch; x < xhi; x += pitch) {
      Vec p(x, y);
      if (body.contains(p, -1e-12)) pts.push_back(p);
    }
  if (static_cast<int>(pts.size()) < std::max(3, n_req / 2)) {
    // thin body or tiny request: sample instead
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
    pts.clear();
    while (static_cast<int>(pts.size()) < n_req) {
      Vec p(ux(rng), uy(rng));
      if (body.contains(p, -1e-12)) pts.push_back(p);
    }
  }

  std::vector<double> areas(pts.size(), 0.0);
  for (int step = 0; step <= lloyd_steps; ++step) {
    bool move = step < lloyd_steps;
    for (size_t j = 0; j < pts.size(); ++j) {
      VorCell c = voronoi_cell(body, pts, static_cast<int>(j));
      areas[j] = c.area;
      if (move && c.area > 0) pts[j] = Vec(c.centroid[0], c.centroid[1]);
    }
  }

  TargetSites s;
  s.sites = pts;
  s.masses = areas;
  for (double a : areas) s.total_mass += a;
  return s;
}

}  // namespace

TargetSites make_target_sites(const ConvexBody& body, int n_sites, uint64_t seed,
                              int lloyd_steps) {
  if (n_sites < 1) throw DomainError("need at least one site");
  if (body.dim > 2) throw UnsupportedDimension("sites implemented for n <= 2");
  TargetSites s = body.dim == 1 ? sites_1d(body, n_sites)
                                : sites_2d(body, n_sites, seed, lloyd_steps);

  // drop degenerate cells (possible for adversarial bodies)
  for (size_t j = s.sites.size(); j-- > 0;) {
    if (s.masses[j] <= 1e-12 * s.total_mass) {
      s.total_mass -= s.masses[j];
      s.sites.erase(s.sites.begin() + j);
      s.masses.erase(s.masses.begin() + j);
    }
  }

  // pin the discrete first moment to the body barycenter so translation
  // identities hold exactly at the quadrature level
  Vec mean = Vec::zero(body.dim);
  for (size_t j = 0; j < s.sites.size(); ++j) mean += s.masses[j] * s.sites[j];
  mean *= 1.0 / s.total_mass;
  const Vec shift = body.barycenter - mean;
  for (Vec& y : s.sites) y += shift;
  return s;
}

}  // namespace maiter
