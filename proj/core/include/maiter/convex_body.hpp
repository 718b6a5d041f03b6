#pragma once

#include <vector>

#include "maiter/geometry.hpp"

namespace maiter {

/// Halfspace {y : <normal,y> + offset >= 0} with unit inward normal.
struct Halfspace {
  Vec normal;
  double offset = 0;
};

/// Bounded convex polytope in R^n, n in {1,2,3}.  Vertex representation is
/// the source of truth; facets, volume, barycenter and inradius are derived
/// at construction and the value is immutable afterwards.
struct ConvexBody {
  int dim = 0;
  std::vector<Vec> vertices;      // hull vertices (CCW for n = 2)
  std::vector<Halfspace> halfspaces;
  double volume = 0;
  Vec barycenter;
  double inradius = 0;  // largest r with B_r(0) inside; 0 if origin not interior

  bool contains(const Vec& y, double tol = 1e-12) const;
  double support(const Vec& u) const;  // sup_{y in A} <u,y>
};

struct ErodedBody {
  ConvexBody parent;
  double epsilon = 0;
  std::vector<Halfspace> halfspaces;  // parent offsets reduced by epsilon

  /// Inradius of the eroded set about the origin (0 if empty/exterior).
  double inradius_origin() const;
  bool contains(const Vec& y, double tol = 1e-12) const;
};

ConvexBody build_body(const std::vector<Vec>& points);

/// Throws BarycenterNotAtOrigin (message carries the offending barycenter)
/// unless |barycenter| <= tol.
void assert_centered(const ConvexBody& body, double tol);

ConvexBody polar(const ConvexBody& body);

ErodedBody erode(const ConvexBody& body, double epsilon);

/// Vertex test for lattice polytopes, n <= 2: primitive edge directions at
/// every vertex must form a Z^n basis.
bool delzant_check(const ConvexBody& body);

/// Radius of the largest ball contained in the body, about its Chebyshev
/// center (not the origin).
double chebyshev_inradius(const ConvexBody& body);

/// Slope of the coercivity lower bound tau/vol + r|x| satisfied by convex
/// functions whose conjugate has prescribed mean on the body:
/// r = min_u int_A <u,y>^+ dlambda / (2 lambda(A)).  n <= 2.
double growth_slope(const ConvexBody& body);

}  // namespace maiter
