#include <catch2/catch_amalgamated.hpp>

#include "defeature/geometry/model.hpp"

using namespace defeature;
using geom::Point;
using geom::Ring;

TEST_CASE("shoelace area and perimeter of primitive shapes") {
  Ring rect = geom::make_rect(0.25, -1.0, 1.75, 0.5);
  CHECK(geom::signed_area(rect) == Catch::Approx(1.5 * 1.5));
  CHECK(geom::ring_length(rect) == Catch::Approx(6.0));

  // inscribed regular n-gon: area (n/2) r^2 sin(2 pi / n)
  int n = 64;
  double r = 0.37;
  Ring circ = geom::make_circle(0.1, -2.0, r, n);
  double ngon_area = 0.5 * n * r * r * std::sin(2.0 * M_PI / n);
  double ngon_perim = 2.0 * n * r * std::sin(M_PI / n);
  CHECK(geom::signed_area(circ) == Catch::Approx(ngon_area).epsilon(1e-12));
  CHECK(geom::ring_length(circ) == Catch::Approx(ngon_perim).epsilon(1e-12));
}

TEST_CASE("boolean operations match closed-form areas") {
  auto sq = geom::make_set(geom::make_rect(0, 0, 1, 1));
  auto small = geom::make_set(geom::make_rect(0.25, 0.25, 0.75, 0.75));
  auto shifted = geom::make_set(geom::make_rect(0.5, 0.0, 1.5, 1.0));

  CHECK(geom::area(geom::set_difference(sq, small)) == Catch::Approx(1.0 - 0.25));
  CHECK(geom::area(geom::set_union(sq, shifted)) == Catch::Approx(1.5));
  CHECK(geom::area(geom::set_intersection(sq, shifted)) == Catch::Approx(0.5));
  CHECK(geom::area(geom::set_symmetric_difference(sq, shifted)) == Catch::Approx(1.0));

  auto with_hole = geom::set_difference(sq, small);
  REQUIRE(with_hole.size() == 1);
  CHECK(with_hole[0].holes.size() == 1);
  CHECK(geom::contains(with_hole, {0.1, 0.1}));
  CHECK_FALSE(geom::contains(with_hole, {0.5, 0.5}));
  CHECK_FALSE(geom::contains(with_hole, {2.0, 0.5}));
  CHECK(geom::covers(sq, {0.0, 0.5}));       // boundary point
  CHECK_FALSE(geom::contains(sq, {0.0, 0.5}));
}

TEST_CASE("point/boundary distances") {
  auto sq = geom::make_set(geom::make_rect(0, 0, 1, 1));
  CHECK(geom::distance_to_boundary({0.5, 0.5}, sq) == Catch::Approx(0.5));
  CHECK(geom::distance_to_boundary({0.5, 0.2}, sq) == Catch::Approx(0.2));
  CHECK(geom::distance_to_boundary({2.0, 0.5}, sq) == Catch::Approx(1.0));
  auto far = geom::make_set(geom::make_rect(3, 0, 4, 1));
  CHECK(geom::closure_distance(sq, far) == Catch::Approx(2.0));
}

TEST_CASE("halfplane clip") {
  Ring sq = geom::make_rect(0, 0, 1, 1);
  // keep x <= 0.3
  Ring left = geom::clip_halfplane(sq, {0.3, 0.0}, {1.0, 0.0});
  CHECK(geom::signed_area(left) == Catch::Approx(0.3));
}

TEST_CASE("interior hole classifies as a pure gamma_n loop") {
  auto omega0 = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Feature f;
  f.id = 1;
  f.negative = geom::make_set(geom::make_circle(0.5, 0.5, 0.1, 32));
  auto exact = geom::exact_from_defeatured(omega0, {f});
  CHECK(geom::area(exact) == Catch::Approx(1.0 - geom::area(f.negative)));

  auto model = geom::build_model(exact, {f}, [](Point p) { return p.y < 1e-9; });
  double perim = geom::perimeter(f.negative);
  CHECK(model.arc_length(geom::BoundaryTag::GammaN, 1) == Catch::Approx(perim).epsilon(1e-9));
  CHECK(model.arc_length(geom::BoundaryTag::Gamma0N, 1) == 0.0);
  CHECK(geom::area(model.defeatured) == Catch::Approx(1.0));
  CHECK(geom::area(model.omega_star) == Catch::Approx(geom::area(exact)));

  // outer boundary split: bottom side dirichlet, rest neumann
  double dir = 0.0, neu = 0.0;
  for (const auto& a : model.arcs) {
    if (a.tag == geom::BoundaryTag::DirichletOuter) dir += a.length;
    if (a.tag == geom::BoundaryTag::NeumannOuter) neu += a.length;
  }
  CHECK(dir == Catch::Approx(1.0));
  CHECK(neu == Catch::Approx(3.0));
}

TEST_CASE("boundary protrusion classifies into gamma_0p and gamma_s") {
  // bump [0.45,0.55]x[1,1.1] on top of the unit square, extension = bump itself
  auto bump = geom::make_set(geom::make_rect(0.45, 1.0, 0.55, 1.1));
  auto exact = geom::set_union(geom::make_set(geom::make_rect(0, 0, 1, 1)), bump);
  geom::Feature f;
  f.id = 3;
  f.positive = bump;
  auto model = geom::build_model(exact, {f}, [](Point) { return true; },
                                 geom::ExtensionPolicy::Identity);

  CHECK(model.arc_length(geom::BoundaryTag::Gamma0P, 3) == Catch::Approx(0.1).epsilon(1e-9));
  CHECK(model.arc_length(geom::BoundaryTag::GammaS, 3) == Catch::Approx(0.3).epsilon(1e-9));
  CHECK(model.arc_length(geom::BoundaryTag::GammaR, 3) == 0.0);
  CHECK(model.arc_length(geom::BoundaryTag::GammaTilde, 3) == 0.0);
  CHECK(geom::area(model.omega_star) == Catch::Approx(1.0));
  CHECK(geom::area(model.defeatured) == Catch::Approx(1.0));

  // bounding-box extension of a triangular bump exposes gamma_r and gamma_tilde
  geom::Feature tri;
  tri.id = 4;
  tri.positive = geom::make_set({{0.4, 1.0}, {0.6, 1.0}, {0.4, 1.2}});
  auto exact2 = geom::set_union(geom::make_set(geom::make_rect(0, 0, 1, 1)), tri.positive);
  auto m2 = geom::build_model(exact2, {tri}, [](Point) { return true; },
                              geom::ExtensionPolicy::BoundingBox);
  double hyp = std::hypot(0.2, 0.2);
  CHECK(m2.arc_length(geom::BoundaryTag::Gamma0P, 4) == Catch::Approx(0.2).epsilon(1e-9));
  CHECK(m2.arc_length(geom::BoundaryTag::GammaS, 4) == Catch::Approx(0.2).epsilon(1e-9));
  CHECK(m2.arc_length(geom::BoundaryTag::GammaR, 4) == Catch::Approx(hyp).epsilon(1e-9));
  CHECK(m2.arc_length(geom::BoundaryTag::GammaTilde, 4) == Catch::Approx(0.4).epsilon(1e-9));
  CHECK(geom::area(m2.feature(4).gap()) == Catch::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("feature insertion restores the exact domain") {
  auto omega0 = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Feature hole;
  hole.id = 1;
  hole.negative = geom::make_set(geom::make_rect(0.1, 0.1, 0.2, 0.2));
  geom::Feature bump;
  bump.id = 2;
  bump.positive = geom::make_set(geom::make_rect(0.7, 1.0, 0.8, 1.05));
  auto exact = geom::exact_from_defeatured(omega0, {hole, bump});

  auto model = geom::build_model(exact, {hole, bump}, [](Point) { return true; },
                                 geom::ExtensionPolicy::Identity);
  CHECK(model.removed_ids() == std::vector<int>{1, 2});

  auto m1 = geom::insert_features(model, {1});
  CHECK(m1.iteration == 1);
  CHECK(m1.removed_ids() == std::vector<int>{2});
  CHECK(geom::area(m1.defeatured) == Catch::Approx(1.0 - 0.01));

  auto m2 = geom::insert_features(m1, {2});
  CHECK(geom::area(m2.defeatured) == Catch::Approx(geom::area(exact)).epsilon(1e-12));
  CHECK(m2.removed_ids().empty());
  CHECK_THROWS_AS(geom::insert_features(m2, {1}), AlreadyInserted);
}

TEST_CASE("separation validation flags touching features") {
  auto omega0 = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Feature a, b;
  a.id = 1;
  a.negative = geom::make_set(geom::make_rect(0.1, 0.1, 0.3, 0.3));
  b.id = 2;
  b.negative = geom::make_set(geom::make_rect(0.3, 0.1, 0.5, 0.3));  // shares an edge with a
  auto exact = geom::exact_from_defeatured(omega0, {a, b});
  auto model = geom::build_model(exact, {a, b}, [](Point) { return true; });
  auto rep = geom::validate_separation(model);
  CHECK_FALSE(rep.pairwise_ok);
  REQUIRE(rep.overlap_pairs.size() == 1);
  CHECK(rep.overlap_pairs[0] == std::pair<int, int>(1, 2));

  // well separated variant
  geom::Feature c = b;
  c.negative = geom::make_set(geom::make_rect(0.6, 0.6, 0.8, 0.8));
  auto exact2 = geom::exact_from_defeatured(omega0, {a, c});
  auto model2 = geom::build_model(exact2, {a, c}, [](Point) { return true; });
  auto rep2 = geom::validate_separation(model2);
  CHECK(rep2.pairwise_ok);
  CHECK(rep2.min_gap == Catch::Approx(std::hypot(0.3, 0.3)));
}

TEST_CASE("degenerate feature inputs are rejected") {
  auto omega0 = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Feature empty;
  empty.id = 1;
  auto exact = geom::exact_from_defeatured(omega0, {empty});
  CHECK_THROWS_AS(geom::build_model(exact, {empty}, [](Point) { return true; }),
                  InvalidPolygon);

  geom::Feature bowtie;
  bowtie.id = 2;
  bowtie.negative = {{ {{ {0.1, 0.1}, {0.3, 0.3}, {0.3, 0.1}, {0.1, 0.3} }}, {} }};
  CHECK_THROWS_AS(geom::build_model(omega0, {bowtie}, [](Point) { return true; }),
                  InvalidPolygon);
}
