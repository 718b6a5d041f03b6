#include <doctest.h>

#include <cmath>
#include <random>

#include "maiter/convex_body.hpp"
#include "maiter/errors.hpp"

using namespace maiter;

namespace {

// independent centroid/area oracle: fan triangulation with exact simplex
// formulas
struct SimplexQuad {
  double area = 0;
  Vec centroid = Vec(0.0, 0.0);
};

SimplexQuad polygon_quad(const std::vector<Vec>& verts) {
  SimplexQuad q;
  for (size_t i = 1; i + 1 < verts.size(); ++i) {
    const Vec &a = verts[0], &b = verts[i], &c = verts[i + 1];
    const double t =
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    q.area += t;
    q.centroid += t * (1.0 / 3.0) * (a + b + c);
  }
  q.centroid *= 1.0 / q.area;
  return q;
}

std::vector<Vec> square_verts() {
  return {Vec(-1.0, -1.0), Vec(1.0, -1.0), Vec(1.0, 1.0), Vec(-1.0, 1.0)};
}

std::vector<Vec> triangle_verts() {
  return {Vec(0.0, 0.0), Vec(1.0, 0.0), Vec(0.0, 1.0)};
}

}  // namespace

TEST_CASE("interval body") {
  const ConvexBody b = build_body({Vec(-1.0), Vec(1.0)});
  CHECK(b.volume == doctest::Approx(2.0));
  CHECK(b.barycenter[0] == doctest::Approx(0.0));
  CHECK(b.inradius == doctest::Approx(1.0));
}

TEST_CASE("square body") {
  const ConvexBody b = build_body(square_verts());
  CHECK(b.volume == doctest::Approx(4.0));
  CHECK(norm(b.barycenter) < 1e-12);
  CHECK(b.inradius == doctest::Approx(1.0));
  CHECK(b.vertices.size() == 4);
  // every vertex satisfies every halfspace
  for (const Vec& v : b.vertices)
    for (const Halfspace& h : b.halfspaces) CHECK(dot(h.normal, v) + h.offset >= -1e-12);
}

TEST_CASE("triangle matches the simplex quadrature oracle") {
  const SimplexQuad q = polygon_quad(triangle_verts());
  const ConvexBody b = build_body(triangle_verts());
  CHECK(b.volume == doctest::Approx(q.area).epsilon(1e-12));
  CHECK(b.volume == doctest::Approx(0.5));
  CHECK(b.barycenter[0] == doctest::Approx(q.centroid[0]).epsilon(1e-12));
  CHECK(b.barycenter[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("volume agrees with Monte Carlo within 3 sigma") {
  const ConvexBody b = build_body(triangle_verts());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int N = 1000000;
  int inside = 0;
  for (int i = 0; i < N; ++i)
    if (b.contains(Vec(u(rng), u(rng)))) ++inside;
  const double p = b.volume;  // bbox has measure 1
  const double sigma = std::sqrt(p * (1 - p) / N);
  CHECK(std::abs(double(inside) / N - p) < 3 * sigma + 1e-9);
}

TEST_CASE("assert_centered") {
  CHECK_NOTHROW(assert_centered(build_body(square_verts()), 1e-10));
  CHECK_THROWS_AS(assert_centered(build_body(triangle_verts()), 1e-10),
                  BarycenterNotAtOrigin);
  // recentering by the centroid oracle fixes it
  const SimplexQuad q = polygon_quad(triangle_verts());
  std::vector<Vec> moved;
  for (const Vec& v : triangle_verts()) moved.push_back(v - q.centroid);
  CHECK_NOTHROW(assert_centered(build_body(moved), 1e-10));
}

TEST_CASE("polar bodies") {
  SUBCASE("interval is self-polar") {
    const ConvexBody p = polar(build_body({Vec(-1.0), Vec(1.0)}));
    CHECK(p.volume == doctest::Approx(2.0));
    CHECK(p.vertices[0][0] == doctest::Approx(-1.0));
    CHECK(p.vertices[1][0] == doctest::Approx(1.0));
  }
  SUBCASE("square gives the cross-polytope") {
    const ConvexBody p = polar(build_body(square_verts()));
    CHECK(p.vertices.size() == 4);
    for (const Vec& v : p.vertices)
      CHECK(std::abs(v[0]) + std::abs(v[1]) == doctest::Approx(1.0));
    // <x,y> <= 1 on all vertex pairs
    for (const Vec& x : square_verts())
      for (const Vec& y : p.vertices) CHECK(dot(x, y) <= 1.0 + 1e-12);
  }
  SUBCASE("polar of a big 64-gon is a small one") {
    std::vector<Vec> verts;
    for (int k = 0; k < 64; ++k)
      verts.push_back(Vec(2 * std::cos(2 * M_PI * k / 64), 2 * std::sin(2 * M_PI * k / 64)));
    const ConvexBody p = polar(build_body(verts));
    for (const Vec& v : p.vertices) CHECK(norm(v) == doctest::Approx(0.5).epsilon(3e-3));
  }
  SUBCASE("origin must be interior") {
    CHECK_THROWS_AS(polar(build_body(triangle_verts())), OriginNotInterior);
  }
  SUBCASE("involution") {
    std::vector<Vec> verts = {Vec(-1.0, -0.5), Vec(1.5, -0.5), Vec(0.5, 1.0),
                              Vec(-0.8, 0.9)};
    const ConvexBody b = build_body(verts);
    const ConvexBody pp = polar(polar(b));
    REQUIRE(pp.vertices.size() == b.vertices.size());
    for (const Vec& v : b.vertices) {
      double best = 1e9;
      for (const Vec& w : pp.vertices) best = std::min(best, dist(v, w));
      CHECK(best < 1e-9);
    }
  }
}

TEST_CASE("erosion") {
  const ConvexBody sq = build_body(square_verts());
  SUBCASE("axis-aligned offsets") {
    const ErodedBody e = erode(sq, 0.5);
    CHECK(e.inradius_origin() == doctest::Approx(0.5));
    CHECK(e.contains(Vec(0.49, 0.49)));
    CHECK(!e.contains(Vec(0.51, 0.0)));
    // eroded then dilated stays between A_eps and A
    for (const Halfspace& h : e.halfspaces) CHECK(h.offset == doctest::Approx(0.5));
  }
  SUBCASE("interval") {
    const ErodedBody e = erode(build_body({Vec(-1.0), Vec(1.0)}), 0.25);
    CHECK(e.inradius_origin() == doctest::Approx(0.75));
  }
  SUBCASE("too large") { CHECK_THROWS_AS(erode(sq, 1.5), ErosionEmpty); }
}

TEST_CASE("erode then dilate sandwich") {
  const ConvexBody sq = build_body(square_verts());
  const double eps = 0.3;
  const ErodedBody e = erode(sq, eps);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec y(u(rng), u(rng));
    if (!e.contains(y)) continue;
    // y + eps B stays in A, so the dilation of A_eps is inside A
    for (int d = 0; d < 16; ++d) {
      const double t = 2 * M_PI * d / 16;
      CHECK(sq.contains(y + Vec(eps * std::cos(t), eps * std::sin(t)), 1e-9));
    }
  }
}

TEST_CASE("delzant") {
  CHECK(delzant_check(build_body(square_verts())));
  CHECK(delzant_check(build_body(triangle_verts())));
  CHECK(!delzant_check(build_body({Vec(0.0, 0.0), Vec(2.0, 0.0), Vec(1.0, 3.0)})));
  CHECK(delzant_check(build_body({Vec(-2.0), Vec(3.0)})));
  CHECK_THROWS_AS(delzant_check(build_body({Vec(0.0, 0.0), Vec(0.5, 0.0), Vec(0.0, 0.5)})),
                  NonIntegralVertex);
  const ConvexBody cube = build_body({Vec(0, 0, 0), Vec(1, 0, 0), Vec(0, 1, 0),
                                      Vec(0, 0, 1), Vec(1, 1, 0), Vec(1, 0, 1),
                                      Vec(0, 1, 1), Vec(1, 1, 1)});
  CHECK_THROWS_AS(delzant_check(cube), UnsupportedDimension);
}

TEST_CASE("3-d body") {
  const ConvexBody cube = build_body({Vec(-1, -1, -1), Vec(1, -1, -1), Vec(-1, 1, -1),
                                      Vec(-1, -1, 1), Vec(1, 1, -1), Vec(1, -1, 1),
                                      Vec(-1, 1, 1), Vec(1, 1, 1)});
  CHECK(cube.volume == doctest::Approx(8.0));
  CHECK(norm(cube.barycenter) < 1e-12);
  CHECK(cube.inradius == doctest::Approx(1.0));
  const ConvexBody oct = polar(cube);
  CHECK(oct.volume == doctest::Approx(8.0 / 6));  // cross-polytope
  CHECK_THROWS_AS(build_body({Vec(0, 0, 0), Vec(1, 0, 0), Vec(2, 0, 0), Vec(3, 0, 0)}),
                  DegenerateBody);
}

TEST_CASE("degenerate input") {
  CHECK_THROWS_AS(build_body({Vec(0.0, 0.0), Vec(1.0, 1.0), Vec(2.0, 2.0)}),
                  DegenerateBody);
  CHECK_THROWS_AS(build_body({Vec(0.5), Vec(0.5)}), DegenerateBody);
}

TEST_CASE("growth slope") {
  // hinge-moment extremal: interval (-1,1) gives exactly 1/8
  CHECK(growth_slope(build_body({Vec(-1.0), Vec(1.0)})) == doctest::Approx(0.125));
  // square: the diagonal direction is extremal, int <u,y>^+ = 4/(3 sqrt 2)
  CHECK(growth_slope(build_body(square_verts())) ==
        doctest::Approx(std::sqrt(2.0) / 12).epsilon(1e-4));
}

TEST_CASE("chebyshev inradius") {
  CHECK(chebyshev_inradius(build_body(square_verts())) == doctest::Approx(1.0));
  // right triangle with legs 3,4: r = (3+4-5)/2 = 1
  const ConvexBody tri = build_body({Vec(0.0, 0.0), Vec(4.0, 0.0), Vec(0.0, 3.0)});
  CHECK(chebyshev_inradius(tri) == doctest::Approx(1.0).epsilon(1e-9));
}
