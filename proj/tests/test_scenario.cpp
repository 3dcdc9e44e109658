#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "defeature/cli/runner.hpp"

using namespace defeature;
using geom::Point;

TEST_CASE("expression evaluator") {
  auto e = expr::Expression::parse("2*x + y^2 - 1");
  CHECK(e(3.0, 2.0) == Catch::Approx(9.0));
  CHECK(expr::Expression::parse("exp(0)")(0, 0) == Catch::Approx(1.0));
  CHECK(expr::Expression::parse("sin(x)*sin(x) + cos(x)*cos(x)")(0.37, 0) ==
        Catch::Approx(1.0));
  CHECK(expr::Expression::parse("max(0, 1 - abs(y - 1))")(0, 1.25) == Catch::Approx(0.75));
  CHECK(expr::Expression::parse("-x^2")(2, 0) == Catch::Approx(4.0));  // unary minus binds tightest
  CHECK(expr::Expression::parse("2^1^2")(0, 0) == Catch::Approx(2.0));  // ^ is right-associative
  CHECK(expr::Expression::parse("sqrt(min(4, 9))")(0, 0) == Catch::Approx(2.0));

  CHECK_THROWS_AS(expr::Expression::parse("2*"), ExpressionError);
  CHECK_THROWS_AS(expr::Expression::parse("exp("), ExpressionError);
  CHECK_THROWS_AS(expr::Expression::parse("foo(x)"), ExpressionError);
  CHECK_THROWS_AS(expr::Expression::parse("x + z"), ExpressionError);
  CHECK_THROWS_AS(expr::Expression::parse(""), ExpressionError);
}

TEST_CASE("built-in scenarios round-trip through the text format") {
  auto names = {"two_holes_circular", "two_holes_square", "random_27",
                "shapes_stokes", "lid_cavity"};
  for (const char* name : names) {
    auto s = cli::builtin_scenario(name);
    REQUIRE(s);
    CHECK(s->name == name);
    auto back = cli::parse_scenario(cli::serialize(*s));
    CHECK(back == *s);
  }
  for (const std::string& name : cli::distance_delta_names()) {
    auto s = cli::builtin_scenario(name);
    REQUIRE(s);
    auto back = cli::parse_scenario(cli::serialize(*s));
    CHECK(back == *s);
  }
  CHECK(cli::distance_delta_names().size() == 5);
  CHECK(cli::builtin_scenarios().size() == 10);
  CHECK_FALSE(cli::builtin_scenario("no_such_scenario"));
}

TEST_CASE("scenario parser rejects malformed input") {
  std::string good =
      "[scenario]\nname = t\n[domain]\noutline = rect 0 0 1 1\ndirichlet = all\n"
      "[problem]\ntype = poisson\n[data]\nf = 1\ng_d = 0\ng = 0\n[mesh]\nh = 0.25\n";
  CHECK_NOTHROW(cli::parse_scenario(good));

  // syntax errors
  CHECK_THROWS_AS(cli::parse_scenario("[scenario\nname = t\n"), ParseError);
  CHECK_THROWS_AS(cli::parse_scenario("[scenario]\nname t\n"), ParseError);
  CHECK_THROWS_AS(cli::parse_scenario(good + "h = oops\n"), ParseError);
  CHECK_THROWS_AS(cli::parse_scenario("f = 1\n"), ParseError);  // key before section

  // schema errors
  CHECK_THROWS_AS(cli::parse_scenario(good + "[nonsense]\n"), SchemaError);
  CHECK_THROWS_AS(cli::parse_scenario(good + "[mesh]\nwidth = 1\n"), SchemaError);
  CHECK_THROWS_AS(cli::parse_scenario("[domain]\noutline = rect 0 0 1 1\n"), SchemaError);
  std::string no_mesh = good.substr(0, good.find("[mesh]"));
  CHECK_THROWS_AS(cli::parse_scenario(no_mesh), SchemaError);
  CHECK_THROWS_AS(cli::parse_scenario(good + "[feature]\nid = 1\n"), SchemaError);  // no shapes
  CHECK_THROWS_AS(
      cli::parse_scenario(good + "[feature]\nnegative = rect 0.5 0.5 0.2 0.6\n"),
      SchemaError);  // degenerate rect
  CHECK_THROWS_AS(cli::parse_scenario(good + "[data]\nq = 1\n"), SchemaError);  // stranger key

  // vector data keys do not apply to scalar problems and vice versa
  CHECK_THROWS_AS(cli::parse_scenario(good + "[data]\nf_x = 1\n"), SchemaError);
  std::string missing_g =
      "[scenario]\nname = t\n[domain]\noutline = rect 0 0 1 1\ndirichlet = all\n"
      "[problem]\ntype = poisson\n[data]\nf = 1\ng_d = 0\n[mesh]\nh = 0.25\n";
  CHECK_THROWS_AS(cli::parse_scenario(missing_g), SchemaError);

  // expression errors surface from data validation
  CHECK_THROWS_AS(cli::parse_scenario(good + "[data]\ng_feature = exp(\n"), ExpressionError);

  // comments and blank lines are fine
  CHECK_NOTHROW(cli::parse_scenario("# header\n\n" + good + "\n# trailing\n"));
}

TEST_CASE("scenario to geometry and data") {
  auto s = *cli::builtin_scenario("two_holes_circular");
  auto model = cli::geometry_model(s);
  REQUIRE(model.features.size() == 2);
  CHECK(model.arc_length(geom::BoundaryTag::GammaN, 1) > 0);
  CHECK(model.arc_length(geom::BoundaryTag::GammaN, 2) > 0);
  CHECK(geom::area(model.defeatured) == Catch::Approx(1.0));

  auto d = cli::problem_data(s);
  CHECK(d.coefs.type == fem::ProblemType::Poisson);
  // f = -128 exp(-8(x+y)) at the origin
  CHECK(d.f[0]({0, 0}) == Catch::Approx(-128.0));
  CHECK(d.g_dir[0]({0, 0}) == Catch::Approx(1.0));
  CHECK(d.g_feat[0]({0.5, 0.5}) == 0.0);  // "0" short-circuits to the zero function

  auto st = *cli::builtin_scenario("lid_cavity");
  auto dst = cli::problem_data(st);
  CHECK(dst.coefs.type == fem::ProblemType::Stokes);
  CHECK(dst.g_dir[0]({0.5, 1.0}) == Catch::Approx(1.0));   // lid moves
  CHECK(dst.g_dir[0]({0.5, 0.5}) == 0.0);                  // interior of the hat is zero
  CHECK(dst.g_dir[1]({0.5, 1.0}) == 0.0);
}

TEST_CASE("runner writes the report artifacts") {
  // tiny non-builtin scenario to keep this fast
  std::string text =
      "[scenario]\nname = smoke\n[domain]\noutline = rect 0 0 1 1\ndirichlet = bottom\n"
      "[problem]\ntype = poisson\n[data]\nf = -8*exp(-2*(x+y))\ng_d = exp(-2*(x+y))\n"
      "g = -2*exp(-2*(x+y))\n[feature]\nid = 1\nnegative = circle 0.4 0.4 0.08 24\n"
      "[mesh]\nh = 0.12\n";
  auto s = cli::parse_scenario(text);
  cli::RunOptions opt;
  opt.out_dir = "/tmp/defeature_test_out/smoke";
  auto rep = cli::run_scenario(s, opt);

  CHECK(rep.total > 0);
  CHECK(rep.true_error > 0);
  CHECK(rep.eta_eff == Catch::Approx(rep.total / rep.true_error).epsilon(1e-12));
  for (const std::string& f : rep.files) CHECK(std::filesystem::exists(f));

  std::ifstream est(std::filesystem::path(opt.out_dir) / "estimator.csv");
  std::string header;
  std::getline(est, header);
  CHECK(header == "gamma_id,feature_id,label,measure,c_gamma,fluct_term,avg_term,estimate");
  int rows = 0;
  for (std::string line; std::getline(est, line);) ++rows;
  CHECK(rows == 1);  // a single interior hole: one gamma_n arc

  // determinism: byte-identical CSV on a rerun
  cli::RunOptions opt2 = opt;
  opt2.out_dir = "/tmp/defeature_test_out/smoke2";
  cli::run_scenario(s, opt2);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(std::filesystem::path(opt.out_dir) / "estimator.csv") ==
        slurp(std::filesystem::path(opt2.out_dir) / "estimator.csv"));
  CHECK(slurp(std::filesystem::path(opt.out_dir) / "adaptive_trace.csv") ==
        slurp(std::filesystem::path(opt2.out_dir) / "adaptive_trace.csv"));
}
