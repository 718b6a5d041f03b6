#include "maiter/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "maiter/errors.hpp"
#include "maiter/lp.hpp"

namespace maiter {

bool ConvexBody::contains(const Vec& y, double tol) const {
  for (const Halfspace& h : halfspaces)
    if (dot(h.normal, y) + h.offset < -tol) return false;
  return true;
}

double ConvexBody::support(const Vec& u) const {
  double s = -std::numeric_limits<double>::infinity();
  for (const Vec& v : vertices) s = std::max(s, dot(u, v));
  return s;
}

double ErodedBody::inradius_origin() const {
  double r = std::numeric_limits<double>::infinity();
  for (const Halfspace& h : halfspaces) r = std::min(r, h.offset);
  return std::max(0.0, r);
}

bool ErodedBody::contains(const Vec& y, double tol) const {
  for (const Halfspace& h : halfspaces)
    if (dot(h.normal, y) + h.offset < -tol) return false;
  return true;
}

namespace {

ConvexBody build_1d(std::vector<Vec> pts) {
  double lo = pts[0][0], hi = pts[0][0];
  for (const Vec& p : pts) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  if (hi - lo < kCoordTol) throw DegenerateBody("interval has zero length");
  ConvexBody b;
  b.dim = 1;
  b.vertices = {Vec(lo), Vec(hi)};
  b.halfspaces = {{Vec(1.0), -lo}, {Vec(-1.0), hi}};
  b.volume = hi - lo;
  b.barycenter = Vec(0.5 * (lo + hi));
  b.inradius = std::max(0.0, std::min(-lo, hi));
  return b;
}

ConvexBody build_2d(const std::vector<Vec>& pts) {
  std::vector<Vec> hull = convex_hull_2d(pts);
  if (hull.size() < 3) throw DegenerateBody("points span less than 2 dimensions");
  ConvexBody b;
  b.dim = 2;
  b.vertices = hull;
  double area2 = 0, cx = 0, cy = 0;
  const size_t m = hull.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec& p = hull[i];
    const Vec& q = hull[(i + 1) % m];
    const double w = p[0] * q[1] - q[0] * p[1];
    area2 += w;
    cx += (p[0] + q[0]) * w;
    cy += (p[1] + q[1]) * w;
    Vec d = q - p;
    const double len = norm(d);
    Vec n(-d[1] / len, d[0] / len);  // inward for CCW
    b.halfspaces.push_back({n, -dot(n, p)});
  }
  b.volume = 0.5 * area2;
  b.barycenter = Vec(cx / (3 * area2), cy / (3 * area2));
  double r = std::numeric_limits<double>::infinity();
  for (const Halfspace& h : b.halfspaces) r = std::min(r, h.offset);
  b.inradius = std::max(0.0, r);
  return b;
}

ConvexBody build_3d(const std::vector<Vec>& pts) {
  std::vector<HullFacet3> facets = convex_hull_3d(pts);
  ConvexBody b;
  b.dim = 3;

  // hull vertices = referenced points, deduplicated
  std::vector<int> used;
  for (const HullFacet3& f : facets)
    for (int i : f.v) used.push_back(i);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (int i : used) b.vertices.push_back(pts[i]);

  // facet planes merged up to tolerance
  std::vector<Halfspace> planes;
  for (const HullFacet3& f : facets) {
    Halfspace h{(-1.0) * f.normal, f.offset};  // inward normal, <n,y> + off >= 0
    bool dup = false;
    for (const Halfspace& g : planes)
      if (norm(g.normal - h.normal) < 1e-9 && std::abs(g.offset - h.offset) < 1e-9)
        dup = true;
    if (!dup) planes.push_back(h);
  }
  b.halfspaces = planes;

  // signed tetrahedra against the origin
  double vol = 0;
  Vec cen = Vec::zero(3);
  for (const HullFacet3& f : facets) {
    const Vec &p = pts[f.v[0]], &q = pts[f.v[1]], &r = pts[f.v[2]];
    const double det = p[0] * (q[1] * r[2] - q[2] * r[1]) -
                       p[1] * (q[0] * r[2] - q[2] * r[0]) +
                       p[2] * (q[0] * r[1] - q[1] * r[0]);
    const double tv = det / 6.0;
    vol += tv;
    cen += tv * 0.25 * (p + q + r);  // + origin/4 = 0
  }
  b.volume = vol;
  b.barycenter = (1.0 / vol) * cen;
  double r = std::numeric_limits<double>::infinity();
  for (const Halfspace& h : b.halfspaces) r = std::min(r, h.offset);
  b.inradius = std::max(0.0, r);
  return b;
}

}  // namespace

ConvexBody build_body(const std::vector<Vec>& points) {
  if (points.empty()) throw DegenerateBody("no input points");
  const int n = points[0].n;
  if (n < 1 || n > 3) throw UnsupportedDimension("build_body supports n in {1,2,3}");
  if (static_cast<int>(points.size()) < n + 1)
    throw DegenerateBody("need at least n+1 points");
  switch (n) {
    case 1:
      return build_1d(points);
    case 2:
      return build_2d(points);
    default:
      return build_3d(points);
  }
}

void assert_centered(const ConvexBody& body, double tol) {
  if (norm(body.barycenter) > tol) {
    std::ostringstream os;
    os << "barycenter (";
    for (int i = 0; i < body.dim; ++i) os << (i ? ", " : "") << body.barycenter[i];
    os << ") exceeds tolerance " << tol;
    throw BarycenterNotAtOrigin(os.str());
  }
}

ConvexBody polar(const ConvexBody& body) {
  if (body.inradius <= 0) throw OriginNotInterior("polar requires inradius > 0");
  std::vector<Vec> verts;
  for (const Halfspace& h : body.halfspaces) {
    // facet plane <n,y> = -offset maps to the polar vertex -n/offset
    Vec v = (-1.0 / h.offset) * h.normal;
    v.n = body.dim;
    verts.push_back(v);
  }
  return build_body(verts);
}

ErodedBody erode(const ConvexBody& body, double epsilon) {
  if (epsilon <= 0) throw ErosionEmpty("epsilon must be positive");
  if (epsilon >= chebyshev_inradius(body))
    throw ErosionEmpty("epsilon exceeds the Chebyshev inradius");
  ErodedBody e;
  e.parent = body;
  e.epsilon = epsilon;
  for (const Halfspace& h : body.halfspaces)
    e.halfspaces.push_back({h.normal, h.offset - epsilon});
  return e;
}

bool delzant_check(const ConvexBody& body) {
  if (body.dim > 2) throw UnsupportedDimension("Delzant test implemented for n <= 2");
  auto as_int = [](double x) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9) throw NonIntegralVertex("vertex not on the lattice");
    return static_cast<long long>(r);
  };
  if (body.dim == 1) {
    for (const Vec& v : body.vertices) as_int(v[0]);
    return true;
  }
  const size_t m = body.vertices.size();
  std::vector<std::array<long long, 2>> v(m);
  for (size_t i = 0; i < m; ++i) v[i] = {as_int(body.vertices[i][0]), as_int(body.vertices[i][1])};
  auto primitive = [](std::array<long long, 2> d) {
    const long long g = std::gcd(std::abs(d[0]), std::abs(d[1]));
    return std::array<long long, 2>{d[0] / g, d[1] / g};
  };
  for (size_t i = 0; i < m; ++i) {
    const auto& cur = v[i];
    const auto& prev = v[(i + m - 1) % m];
    const auto& next = v[(i + 1) % m];
    const auto e1 = primitive({prev[0] - cur[0], prev[1] - cur[1]});
    const auto e2 = primitive({next[0] - cur[0], next[1] - cur[1]});
    const long long det = e1[0] * e2[1] - e1[1] * e2[0];
    if (det != 1 && det != -1) return false;
  }
  return true;
}

double chebyshev_inradius(const ConvexBody& body) {
  // maximize r subject to <n_i,y> + off_i >= r
  const int d = body.dim + 1;
  std::vector<LinIneq> cons;
  for (const Halfspace& h : body.halfspaces) {
    LinIneq c;
    for (int j = 0; j < body.dim; ++j) c.a[j] = -h.normal[j];
    c.a[body.dim] = 1.0;
    c.b = h.offset;
    cons.push_back(c);
  }
  std::array<double, 4> obj{0, 0, 0, 0};
  obj[body.dim] = 1.0;
  LpResult r = lp_maximize(d, cons, obj, 1e6);
  if (!r.feasible) return 0.0;
  return std::max(0.0, r.x[body.dim]);
}

double growth_slope(const ConvexBody& body) {
  if (body.dim > 2)
    throw UnsupportedDimension("growth_slope implemented for n <= 2");
  if (body.dim == 1) {
    const double a = body.vertices[0][0], b = body.vertices[1][0];
    auto plus_moment = [&](double sgn) {
      const double lo = sgn > 0 ? a : -b, hi = sgn > 0 ? b : -a;
      const double h = std::max(0.0, hi), l = std::max(0.0, lo);
      return 0.5 * (h * h - l * l);
    };
    return std::min(plus_moment(1.0), plus_moment(-1.0)) / (2.0 * body.volume);
  }
  // half-plane moment of the polygon, minimized over directions
  auto moment = [&](double theta) {
    const std::array<double, 2> u{std::cos(theta), std::sin(theta)};
    ClipPoly p;
    for (const Vec& v : body.vertices) p.pt.push_back({v[0], v[1]});
    p.src.assign(p.pt.size(), -1);
    p.clip({-u[0], -u[1]}, 0.0, -1);  // keep <u,y> >= 0
    if (p.empty()) return 0.0;
    const double a = p.area();
    const auto c = p.centroid();
    return a * (u[0] * c[0] + u[1] * c[1]);
  };
  const int samples = 1024;
  double best = std::numeric_limits<double>::infinity(), best_t = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = 2 * M_PI * i / samples;
    const double m = moment(t);
    if (m < best) {
      best = m;
      best_t = t;
    }
  }
  double lo = best_t - 2 * M_PI / samples, hi = best_t + 2 * M_PI / samples;
  for (int it = 0; it < 60; ++it) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (moment(m1) < moment(m2))
      hi = m2;
    else
      lo = m1;
  }
  best = std::min(best, moment(0.5 * (lo + hi)));
  return best / (2.0 * body.volume);
}

}  // namespace maiter
