#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace maiter {

/// Point/vector in R^n for n <= 3.  The dimension is carried at runtime so
/// the same code paths serve the 1-d, 2-d and 3-d geometry.
struct Vec {
  int n = 0;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  explicit Vec(double x) : n(1), c{x, 0, 0} {}
  Vec(double x, double y) : n(2), c{x, y, 0} {}
  Vec(double x, double y, double z) : n(3), c{x, y, z} {}
  static Vec zero(int dim) {
    Vec v;
    v.n = dim;
    return v;
  }

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n; ++i) c[i] *= s;
    return *this;
  }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

/// Symmetric positive scale used for "same point" comparisons.
constexpr double kCoordTol = 1e-12;

// ---------------------------------------------------------------------------
// 2-d convex polygon machinery.  Polygons are stored CCW; each edge i runs
// pt[i] -> pt[(i+1)%size] and carries the id of the halfplane that created it
// (negative ids are reserved for clipping boxes).

struct ClipPoly {
  std::vector<std::array<double, 2>> pt;
  std::vector<int> src;  // src[i] labels edge pt[i] -> pt[i+1]

  bool empty() const { return pt.size() < 3; }
  size_t size() const { return pt.size(); }

  static ClipPoly box(double x0, double y0, double x1, double y1, int id = -1);

  /// Intersect with the halfplane {x : a.x <= b}; new boundary edges get
  /// label `id`.
  void clip(const std::array<double, 2>& a, double b, int id);

  double area() const;
  std::array<double, 2> centroid() const;  // area centroid; polygon nonempty
};

// Convex hulls -------------------------------------------------------------

/// Andrew monotone chain; returns hull vertices in CCW order, collinear
/// points dropped.
std::vector<Vec> convex_hull_2d(std::vector<Vec> pts);

/// Triangular facets of the 3-d convex hull, outward oriented.
struct HullFacet3 {
  std::array<int, 3> v;  // indices into the input point list
  Vec normal;            // unit outward normal
  double offset;         // plane is {x : <normal,x> = offset}
};
std::vector<HullFacet3> convex_hull_3d(const std::vector<Vec>& pts);

// Misc small helpers --------------------------------------------------------

inline double cross2(const std::array<double, 2>& o, const std::array<double, 2>& a,
                     const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Distance from a point to the boundary of a CCW convex polygon.
double dist_to_polygon_boundary(const std::vector<std::array<double, 2>>& poly,
                                const std::array<double, 2>& p);

}  // namespace maiter
