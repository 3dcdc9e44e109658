#include <catch2/catch_amalgamated.hpp>

#include "defeature/mesh/generate.hpp"
#include "defeature/mesh/quadrature.hpp"

using namespace defeature;
using geom::Point;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

geom::MeshSpec square_spec() {
  geom::MeshSpec spec;
  spec.outline = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Ring r = geom::make_rect(0, 0, 1, 1);
  for (size_t i = 0; i < 4; ++i) {
    geom::TaggedPolyline pl;
    pl.arc_id = static_cast<int>(i);
    pl.points = {r[i], r[(i + 1) % 4]};
    spec.polylines.push_back(pl);
  }
  return spec;
}

}  // namespace

TEST_CASE("segment quadrature integrates monomials exactly") {
  for (int order : {1, 3, 5, 7, 9}) {
    auto rule = quad::segment_rule(order);
    for (int k = 0; k <= order; ++k) {
      double s = 0.0;
      for (const auto& qp : rule) s += qp.w * std::pow(qp.t, k);
      INFO("order " << order << " monomial t^" << k);
      CHECK(s == Catch::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle quadrature integrates monomials exactly") {
  // integral of r^a s^b over the reference triangle: a! b! / (a+b+2)!
  for (int order : {1, 2, 4, 5, 8}) {
    auto rule = quad::triangle_rule(order);
    for (int a = 0; a + 0 <= order; ++a)
      for (int b = 0; a + b <= order; ++b) {
        double s = 0.0;
        for (const auto& qp : rule) s += qp.w * std::pow(qp.r, a) * std::pow(qp.s, b);
        double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        INFO("order " << order << " monomial r^" << a << " s^" << b);
        CHECK(s == Catch::Approx(exact).epsilon(1e-12));
      }
  }
  CHECK_THROWS_AS(quad::triangle_rule(9), UnsupportedOrder);
  CHECK_THROWS_AS(quad::segment_rule(20), UnsupportedOrder);
}

TEST_CASE("unit square mesh invariants") {
  mesh::MeshOptions opt;
  opt.h_max = 0.1;
  mesh::Mesh m = mesh::triangulate(square_spec(), opt);

  REQUIRE(!m.tris.empty());
  CHECK(m.total_area() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(m.min_angle_deg() >= opt.min_angle_deg - 1e-9);
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t)
    CHECK(m.tri_area(t) > 0.0);  // ccw orientation

  // conformity: every edge belongs to one or two triangles; boundary tagged
  // edges to exactly one
  auto adj = m.edge_tris();
  for (const auto& [key, ts] : adj) CHECK(ts[0] >= 0);
  double boundary_len = 0.0;
  for (const mesh::TaggedEdge& e : m.tagged_edges) {
    auto it = adj.find(mesh::edge_key(e.a, e.b));
    REQUIRE(it != adj.end());
    CHECK(it->second[1] == -1);
    boundary_len += geom::dist(m.points[e.a], m.points[e.b]);
  }
  CHECK(boundary_len == Catch::Approx(4.0).epsilon(1e-12));

  // every target size respected up to a constant factor
  for (const auto& tr : m.tris) {
    for (int i = 0; i < 3; ++i) {
      double len = geom::dist(m.points[tr[i]], m.points[tr[(i + 1) % 3]]);
      CHECK(len <= 2.0 * opt.h_max);
    }
  }
}

TEST_CASE("constrained interior curve survives refinement") {
  geom::MeshSpec spec = square_spec();
  geom::Ring circ = geom::make_circle(0.5, 0.5, 0.2, 48);
  geom::TaggedPolyline pl;
  pl.arc_id = 10;
  pl.points = circ;
  pl.points.push_back(circ.front());  // closed chain
  pl.internal = true;
  pl.feature = true;
  spec.polylines.push_back(pl);

  mesh::MeshOptions opt;
  opt.h_max = 0.1;
  mesh::Mesh m = mesh::triangulate(spec, opt);
  CHECK(m.total_area() == Catch::Approx(1.0).epsilon(1e-12));

  // the tagged chain covers the circle and each of its edges is interior
  auto adj = m.edge_tris();
  double len = 0.0;
  for (const mesh::TaggedEdge& e : m.edges_on(10)) {
    CHECK(e.internal);
    CHECK(adj.at(mesh::edge_key(e.a, e.b))[1] >= 0);
    len += geom::dist(m.points[e.a], m.points[e.b]);
  }
  double circ_len = geom::ring_length(circ);
  CHECK(len == Catch::Approx(circ_len).epsilon(1e-9));
}

TEST_CASE("size field grading and near-feature override") {
  mesh::SizeField sf;
  sf.h_max = 0.5;
  sf.grading = 0.5;
  sf.sources.push_back({{0, 0}, {1, 0}, 0.01});
  CHECK(sf({0.5, 0.0}) == Catch::Approx(0.01));
  CHECK(sf({0.5, 0.1}) == Catch::Approx(0.01 + 0.5 * 0.1));
  CHECK(sf({0.5, 5.0}) == Catch::Approx(0.5));  // capped at h_max

  // h_near overrides the fractional rule on feature polylines only
  geom::MeshSpec spec = square_spec();
  geom::Ring circ = geom::make_circle(0.5, 0.5, 0.1, 32);
  geom::TaggedPolyline pl;
  pl.arc_id = 7;
  pl.points = circ;
  pl.points.push_back(circ.front());
  pl.internal = true;
  pl.feature = true;
  spec.polylines.push_back(pl);

  mesh::MeshOptions coarse, fine;
  coarse.h_max = fine.h_max = 0.2;
  fine.h_near = 0.005;
  mesh::Mesh mc = mesh::triangulate(spec, coarse);
  mesh::Mesh mf = mesh::triangulate(spec, fine);
  CHECK(mf.tris.size() > 2 * mc.tris.size());
  CHECK(mf.edges_on(7).size() > 2 * mc.edges_on(7).size());
  CHECK(mf.total_area() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mesh refuses impossible budgets") {
  mesh::MeshOptions opt;
  opt.h_max = 0.001;
  opt.max_insertions = 50;  // cannot reach h_max on the unit square
  CHECK_THROWS_AS(mesh::triangulate(square_spec(), opt), NonconvergentRefinement);
}
