#include <catch2/catch_amalgamated.hpp>

#include "defeature/adaptive/adaptive.hpp"

using namespace defeature;
using geom::Point;

namespace {

geom::GeometryModel holes_model() {
  auto omega0 = geom::make_set(geom::make_rect(0, 0, 1, 1));
  geom::Feature a, b, c;
  a.id = 1;
  a.negative = geom::make_set(geom::make_circle(0.25, 0.25, 0.08, 24));
  b.id = 2;
  b.negative = geom::make_set(geom::make_circle(0.75, 0.7, 0.02, 24));
  c.id = 3;
  c.negative = geom::make_set(geom::make_circle(0.5, 0.85, 0.01, 16));
  auto exact = geom::exact_from_defeatured(omega0, {a, b, c});
  return geom::build_model(exact, {a, b, c}, [](Point p) { return p.y < 1e-9; });
}

pipeline::ProblemData data() {
  pipeline::ProblemData d;
  d.f[0] = [](Point p) { return -18.0 * std::exp(-3.0 * (p.x + p.y)); };
  d.g_dir[0] = [](Point p) { return std::exp(-3.0 * (p.x + p.y)); };
  d.g_neu[0] = [](Point p) { return -3.0 * std::exp(-3.0 * (p.x + p.y)); };
  d.g_feat[0] = [](Point) { return 0.0; };
  d.g_zero[0] = [](Point) { return 0.0; };
  d.g_tilde[0] = [](Point) { return 0.0; };
  return d;
}

}  // namespace

TEST_CASE("maximum marking") {
  std::map<int, double> ind{{1, 1.0}, {2, 0.5}, {3, 0.94}};
  CHECK(adaptive::mark(ind, 0.95) == std::set<int>{1});
  CHECK(adaptive::mark(ind, 0.9) == std::set<int>{1, 3});
  CHECK(adaptive::mark(ind, 0.5) == std::set<int>{1, 2, 3});
  CHECK(adaptive::mark(ind, 1.0) == std::set<int>{1});

  // a flat zero landscape cannot discriminate: everything is marked
  std::map<int, double> flat{{4, 0.0}, {7, 0.0}};
  CHECK(adaptive::mark(flat, 0.9) == std::set<int>{4, 7});
  CHECK_THROWS_AS(adaptive::mark({}, 0.9), NoFeatures);
}

TEST_CASE("adaptive loop inserts features until the estimate vanishes") {
  adaptive::Options opt;
  opt.theta = 0.95;
  opt.tol = 0.0;
  opt.mesh.h_max = 0.1;
  auto res = adaptive::run(holes_model(), data(), opt);

  REQUIRE(!res.iterations.empty());
  CHECK(res.converged);
  CHECK(res.final_model.removed_ids().empty());

  // iteration bookkeeping: cumulative insertions match the marked sets
  int inserted = 0;
  double prev_total = kInf;
  for (const auto& rec : res.iterations) {
    CHECK(rec.n_inserted_total == inserted);
    inserted += static_cast<int>(rec.marked.size());
    if (!rec.report.per_feature.empty()) {
      CHECK(rec.report.total > 0);
      CHECK(rec.report.total < prev_total);  // dominant-hole model: monotone here
      prev_total = rec.report.total;
      CHECK(!rec.marked.empty());
    }
  }
  CHECK(inserted == 3);
  // the big hole dominates and must be marked first
  CHECK(res.iterations.front().marked == std::set<int>{1});
}

TEST_CASE("tolerance stop leaves small features out") {
  adaptive::Options opt;
  opt.theta = 0.95;
  opt.mesh.h_max = 0.1;

  auto probe = adaptive::run(holes_model(), data(), opt);
  REQUIRE(probe.iterations.size() >= 2);
  // stop once the first insertion has happened: tolerance above the second total
  opt.tol = probe.iterations[1].report.total * 1.0001;
  auto res = adaptive::run(holes_model(), data(), opt);
  CHECK(res.converged);
  CHECK(res.iterations.size() == 2);
  CHECK(res.final_model.removed_ids().size() == 2);

  // iteration cap without tolerance: not converged
  opt.tol = 0.0;
  opt.max_iterations = 1;
  auto capped = adaptive::run(holes_model(), data(), opt);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations.size() == 1);
}

TEST_CASE("runs are deterministic") {
  adaptive::Options opt;
  opt.theta = 0.95;
  opt.mesh.h_max = 0.12;
  auto r1 = adaptive::run(holes_model(), data(), opt);
  auto r2 = adaptive::run(holes_model(), data(), opt);
  REQUIRE(r1.iterations.size() == r2.iterations.size());
  for (size_t i = 0; i < r1.iterations.size(); ++i) {
    CHECK(r1.iterations[i].report.total == r2.iterations[i].report.total);  // bitwise
    CHECK(r1.iterations[i].marked == r2.iterations[i].marked);
  }
}

TEST_CASE("error hook is sampled every iteration") {
  adaptive::Options opt;
  opt.theta = 0.5;
  opt.mesh.h_max = 0.15;
  int calls = 0;
  auto res = adaptive::run(holes_model(), data(), opt,
                           [&calls](const geom::GeometryModel&,
                                    const pipeline::DefeaturedResult&) {
                             ++calls;
                             return 1.0;
                           });
  CHECK(calls == static_cast<int>(res.iterations.size()));
  for (const auto& rec : res.iterations) CHECK(rec.true_error == 1.0);
}
