#include "maiter/geometry.hpp"

#include <algorithm>
#include <limits>

#include "maiter/errors.hpp"

namespace maiter {

ClipPoly ClipPoly::box(double x0, double y0, double x1, double y1, int id) {
  ClipPoly p;
  p.pt = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  p.src = {id, id, id, id};
  return p;
}

void ClipPoly::clip(const std::array<double, 2>& a, double b, int id) {
  if (pt.empty()) return;
  const size_t m = pt.size();
  std::vector<double> f(m);
  bool any_out = false, any_in = false;
  for (size_t i = 0; i < m; ++i) {
    f[i] = b - (a[0] * pt[i][0] + a[1] * pt[i][1]);
    (f[i] >= 0 ? any_in : any_out) = true;
  }
  if (!any_out) return;
  if (!any_in) {
    pt.clear();
    src.clear();
    return;
  }
  std::vector<std::array<double, 2>> out_pt;
  std::vector<int> out_src;
  out_pt.reserve(m + 2);
  out_src.reserve(m + 2);
  for (size_t i = 0; i < m; ++i) {
    const size_t j = (i + 1) % m;
    const bool in_i = f[i] >= 0, in_j = f[j] >= 0;
    if (in_i) {
      out_pt.push_back(pt[i]);
      out_src.push_back(src[i]);
    }
    if (in_i != in_j) {
      const double t = f[i] / (f[i] - f[j]);
      std::array<double, 2> q{pt[i][0] + t * (pt[j][0] - pt[i][0]),
                              pt[i][1] + t * (pt[j][1] - pt[i][1])};
      if (in_i) {
        // leaving: q starts the new cut edge
        out_pt.push_back(q);
        out_src.push_back(id);
      } else {
        // entering: q resumes the old edge i
        out_pt.push_back(q);
        out_src.push_back(src[i]);
      }
    }
  }
  // drop duplicate consecutive points produced by near-tangent cuts
  pt.clear();
  src.clear();
  for (size_t i = 0; i < out_pt.size(); ++i) {
    const size_t j = (i + 1) % out_pt.size();
    const double dx = out_pt[i][0] - out_pt[j][0], dy = out_pt[i][1] - out_pt[j][1];
    if (dx * dx + dy * dy > 1e-28) {
      pt.push_back(out_pt[i]);
      src.push_back(out_src[i]);
    }
  }
  if (pt.size() < 3) {
    pt.clear();
    src.clear();
  }
}

double ClipPoly::area() const {
  double s = 0;
  for (size_t i = 0; i < pt.size(); ++i) {
    const size_t j = (i + 1) % pt.size();
    s += pt[i][0] * pt[j][1] - pt[j][0] * pt[i][1];
  }
  return 0.5 * s;
}

std::array<double, 2> ClipPoly::centroid() const {
  double a = 0, cx = 0, cy = 0;
  for (size_t i = 0; i < pt.size(); ++i) {
    const size_t j = (i + 1) % pt.size();
    const double w = pt[i][0] * pt[j][1] - pt[j][0] * pt[i][1];
    a += w;
    cx += (pt[i][0] + pt[j][0]) * w;
    cy += (pt[i][1] + pt[j][1]) * w;
  }
  a *= 0.5;
  return {cx / (6 * a), cy / (6 * a)};
}

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) {
                          return std::abs(a[0] - b[0]) < kCoordTol &&
                                 std::abs(a[1] - b[1]) < kCoordTol;
                        }),
            pts.end());
  const size_t m = pts.size();
  if (m < 3) return pts;
  auto cr = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> h(2 * m);
  size_t k = 0;
  for (size_t i = 0; i < m; ++i) {
    while (k >= 2 && cr(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
    h[k++] = pts[i];
  }
  for (size_t i = m - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cr(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

namespace {

Vec cross3(const Vec& a, const Vec& b) {
  return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
             a[0] * b[1] - a[1] * b[0]);
}

}  // namespace

std::vector<HullFacet3> convex_hull_3d(const std::vector<Vec>& pts) {
  const int m = static_cast<int>(pts.size());
  if (m < 4) throw DegenerateBody("3-d hull needs at least 4 points");

  // initial non-degenerate tetrahedron
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < m && i1 < 0; ++i)
    if (dist(pts[i], pts[i0]) > 1e-9) i1 = i;
  if (i1 < 0) throw DegenerateBody("all points coincide");
  for (int i = 1; i < m && i2 < 0; ++i) {
    if (i == i1) continue;
    if (norm(cross3(pts[i1] - pts[i0], pts[i] - pts[i0])) > 1e-12) i2 = i;
  }
  if (i2 < 0) throw DegenerateBody("points are collinear");
  Vec nrm = cross3(pts[i1] - pts[i0], pts[i2] - pts[i0]);
  for (int i = 1; i < m && i3 < 0; ++i) {
    if (i == i1 || i == i2) continue;
    if (std::abs(dot(nrm, pts[i] - pts[i0])) > 1e-12) i3 = i;
  }
  if (i3 < 0) throw DegenerateBody("points are coplanar");

  struct Face {
    std::array<int, 3> v;
    Vec n;  // outward, unit
    double off;
    bool alive = true;
  };
  std::vector<Face> faces;
  auto make_face = [&](int a, int b, int c, const Vec& inside) {
    Face f;
    f.v = {a, b, c};
    Vec nn = cross3(pts[b] - pts[a], pts[c] - pts[a]);
    double ln = norm(nn);
    nn *= 1.0 / ln;
    if (dot(nn, inside - pts[a]) > 0) {
      std::swap(f.v[1], f.v[2]);
      nn *= -1.0;
    }
    f.n = nn;
    f.off = dot(nn, pts[a]);
    return f;
  };
  Vec inside = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  faces.push_back(make_face(i0, i1, i2, inside));
  faces.push_back(make_face(i0, i1, i3, inside));
  faces.push_back(make_face(i0, i2, i3, inside));
  faces.push_back(make_face(i1, i2, i3, inside));

  // incremental insertion with horizon re-triangulation
  for (int p = 0; p < m; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && dot(faces[f].n, pts[p]) - faces[f].off > 1e-10)
        visible.push_back(f);
    if (visible.empty()) continue;
    // horizon = edges of visible faces shared with a hidden face
    auto edge_key = [](int a, int b) {
      return (static_cast<int64_t>(std::min(a, b)) << 32) | std::max(a, b);
    };
    std::vector<std::pair<int64_t, std::pair<int, int>>> edges;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) {
        int a = v[e], b = v[(e + 1) % 3];
        edges.push_back({edge_key(a, b), {a, b}});
      }
    }
    std::sort(edges.begin(), edges.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<int, int>> horizon;
    for (size_t e = 0; e < edges.size();) {
      size_t e2 = e;
      while (e2 < edges.size() && edges[e2].first == edges[e].first) ++e2;
      if (e2 - e == 1) horizon.push_back(edges[e].second);
      e = e2;
    }
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : horizon) faces.push_back(make_face(a, b, p, inside));
  }

  std::vector<HullFacet3> out;
  for (const Face& f : faces)
    if (f.alive) out.push_back({f.v, f.n, f.off});
  return out;
}

double dist_to_polygon_boundary(const std::vector<std::array<double, 2>>& poly,
                                const std::array<double, 2>& p) {
  double best = std::numeric_limits<double>::infinity();
  const size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0 ? ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = a[0] + t * ex, qy = a[1] + t * ey;
    best = std::min(best, std::hypot(p[0] - qx, p[1] - qy));
  }
  return best;
}

}  // namespace maiter
