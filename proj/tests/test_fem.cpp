#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace defeature;
using geom::Point;
using testsup::square_model;
using testsup::solve_square;

namespace {

const double kPi = 3.14159265358979323846;

fem::BC dirichlet(std::array<fem::ScalarFun, 2> f) { return {fem::BCType::Dirichlet, f}; }
fem::BC neumann(std::array<fem::ScalarFun, 2> f) { return {fem::BCType::Neumann, f}; }

}  // namespace

TEST_CASE("P2 reproduces a quadratic Poisson solution to roundoff") {
  auto model = square_model([](Point) { return true; });
  auto u = [](Point p) { return p.x * p.x + p.y * p.y - p.x * p.y; };
  fem::Coefs coefs;  // poisson
  fem::VolumeData vol{{[](Point) { return -4.0; }, nullptr}, nullptr};
  auto sol = solve_square(model, 0.2, coefs, vol, dirichlet({u, nullptr}), {});
  CHECK(testsup::nodal_error(sol, [&](Point p, int) { return u(p); }) < 1e-10);
}

TEST_CASE("Poisson H1 convergence is quadratic") {
  auto model = square_model([](Point) { return true; });
  auto u = [](Point p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  auto f = [](Point p) { return 2 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  auto grad = [](Point p, double (*g)[2]) {
    g[0][0] = kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y);
    g[0][1] = kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y);
  };
  fem::Coefs coefs;
  fem::VolumeData vol{{f, nullptr}, nullptr};
  double prev = 0.0;
  std::vector<double> errs;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    auto sol = solve_square(model, h, coefs, vol, dirichlet({u, nullptr}), {});
    errs.push_back(testsup::h1_error(sol, grad));
  }
  double rate1 = std::log2(errs[0] / errs[1]);
  double rate2 = std::log2(errs[1] / errs[2]);
  INFO("H1 errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(rate1 >= 1.8);
  CHECK(rate2 >= 1.8);
  (void)prev;
}

TEST_CASE("mixed Dirichlet/Neumann data recover a harmonic field") {
  // u = x^2 - y^2; Dirichlet on the left side, flux data elsewhere
  auto model = square_model([](Point p) { return p.x < 1e-9; });
  auto u = [](Point p) { return p.x * p.x - p.y * p.y; };
  auto g = [](Point p) -> double {
    if (std::abs(p.x - 1.0) < 1e-9) return 2.0 * p.x;    // right, n = (1,0)
    if (std::abs(p.y - 1.0) < 1e-9) return -2.0 * p.y;   // top, n = (0,1): du/dy = -2y
    return 2.0 * p.y;                                    // bottom, n = (0,-1)
  };
  fem::Coefs coefs;
  fem::VolumeData vol{{[](Point) { return 0.0; }, nullptr}, nullptr};
  auto sol = solve_square(model, 0.15, coefs, vol, dirichlet({u, nullptr}), neumann({g, nullptr}));
  CHECK(testsup::nodal_error(sol, [&](Point p, int) { return u(p); }) < 1e-9);
}

TEST_CASE("elasticity reproduces a quadratic displacement field") {
  auto model = square_model([](Point) { return true; });
  double mu = 0.7, lam = 1.3;
  auto u = [](Point p, int c) { return c == 0 ? p.x * p.x : p.y * p.y; };
  // sigma = 2 mu diag(2x, 2y) + lam (2x + 2y) I -> f = -div sigma constant
  fem::Coefs coefs{fem::ProblemType::Elasticity, mu, lam};
  fem::VolumeData vol{{[&](Point) { return -(4 * mu + 2 * lam); },
                       [&](Point) { return -(4 * mu + 2 * lam); }},
                      nullptr};
  auto sol = solve_square(model, 0.2, coefs, vol,
                          dirichlet({[&](Point p) { return u(p, 0); },
                                     [&](Point p) { return u(p, 1); }}),
                          {});
  CHECK(testsup::nodal_error(sol, u) < 1e-9);
}

TEST_CASE("elasticity H1 convergence is quadratic") {
  auto model = square_model([](Point) { return true; });
  double mu = 1.0, lam = 0.5;
  // divergence-free displacement: f = 2 pi^2 mu u
  auto u = [](Point p, int c) {
    return c == 0 ? std::sin(kPi * p.x) * std::sin(kPi * p.y)
                  : std::cos(kPi * p.x) * std::cos(kPi * p.y);
  };
  auto grad = [](Point p, double (*g)[2]) {
    g[0][0] = kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y);
    g[0][1] = kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y);
    g[1][0] = -kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y);
    g[1][1] = -kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y);
  };
  fem::Coefs coefs{fem::ProblemType::Elasticity, mu, lam};
  fem::VolumeData vol{{[&](Point p) { return 2 * kPi * kPi * mu * u(p, 0); },
                       [&](Point p) { return 2 * kPi * kPi * mu * u(p, 1); }},
                      nullptr};
  std::vector<double> errs;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    auto sol = solve_square(model, h, coefs, vol,
                            dirichlet({[&](Point p) { return u(p, 0); },
                                       [&](Point p) { return u(p, 1); }}),
                            {});
    errs.push_back(testsup::h1_error(sol, grad));
  }
  INFO("H1 errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}

TEST_CASE("Taylor-Hood reproduces quadratic velocity and linear pressure") {
  auto model = square_model([](Point) { return true; });
  double mu = 2.0;
  auto u = [](Point p, int c) { return c == 0 ? p.y * p.y : p.x * p.x; };
  // p = x + y - 1 (zero mean); f = -mu lap u + grad p
  fem::Coefs coefs{fem::ProblemType::Stokes, mu, 0.0};
  fem::VolumeData vol{{[&](Point) { return 1.0 - 2 * mu; },
                       [&](Point) { return 1.0 - 2 * mu; }},
                      nullptr};
  auto sol = solve_square(model, 0.2, coefs, vol,
                          dirichlet({[&](Point p) { return u(p, 0); },
                                     [&](Point p) { return u(p, 1); }}),
                          {});
  CHECK(testsup::nodal_error(sol, u) < 1e-9);
  double pworst = 0.0;
  for (int i = 0; i < sol.pspace.n_dofs(); ++i) {
    Point x = sol.pspace.dof_points[static_cast<size_t>(i)];
    pworst = std::max(pworst, std::abs(sol.p[i] - (x.x + x.y - 1.0)));
  }
  CHECK(pworst < 1e-8);
  CHECK(testsup::divergence_residual(sol, nullptr) < 1e-10);
}

TEST_CASE("discrete divergence residual vanishes for driven flow") {
  // regularized lid: no manufactured solution, the divergence rows must
  // still be satisfied to solver precision
  auto model = square_model([](Point) { return true; });
  auto lid = [](Point p) { return std::abs(p.y - 1.0) < 1e-9 ? 4.0 * p.x * (1.0 - p.x) : 0.0; };
  fem::Coefs coefs{fem::ProblemType::Stokes, 1.0, 0.0};
  fem::VolumeData vol{{[](Point) { return 0.0; }, [](Point) { return 0.0; }}, nullptr};
  auto sol = solve_square(model, 0.1, coefs, vol,
                          dirichlet({lid, [](Point) { return 0.0; }}), {});
  CHECK(testsup::divergence_residual(sol, nullptr) < 1e-10);
  // pure Dirichlet pressure gauge: zero mean
  double mean = 0.0, area = 0.0;
  auto rule = quad::triangle_rule(5);
  for (int t = 0; t < static_cast<int>(sol.mesh.tris.size()); ++t) {
    fem::CellMap cm = fem::CellMap::build(sol.mesh, t);
    for (const auto& qp : rule) {
      mean += qp.w * std::abs(cm.detJ) * sol.pressure_at(t, qp.r, qp.s);
      area += qp.w * std::abs(cm.detJ);
    }
  }
  CHECK(std::abs(mean / area) < 1e-10);
}

TEST_CASE("boundary traction matches finite differences of the exact field") {
  mesh::MeshOptions opt;
  opt.h_max = 0.2;
  auto model = square_model([](Point) { return true; });
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_exact(model), opt);

  // elasticity with quadratic displacement: the P2 interpolant is exact, so
  // traction_at must match the FD stress of the analytic field
  double mu = 1.1, lam = 0.6;
  auto u = [](Point p, int c) { return c == 0 ? p.x * p.x + p.x * p.y : p.y * p.y - p.x * p.y; };
  auto sol = testsup::interpolate(std::move(m), {fem::ProblemType::Elasticity, mu, lam}, u);

  auto fd_grad = [&](Point p, int c, int d) {
    double h = 1e-6;
    Point a = p, b = p;
    (d == 0 ? a.x : a.y) += h;
    (d == 0 ? b.x : b.y) -= h;
    return (u(a, c) - u(b, c)) / (2 * h);
  };
  auto rule = quad::triangle_rule(2);
  double worst = 0.0;
  for (int t = 0; t < std::min<int>(64, static_cast<int>(sol.mesh.tris.size())); ++t) {
    fem::CellMap cm = fem::CellMap::build(sol.mesh, t);
    for (const auto& qp : rule) {
      Point x = cm.to_physical(qp.r, qp.s);
      Point n{0.6, 0.8};
      double trac[2];
      sol.traction_at(t, qp.r, qp.s, n, trac);
      double exx = fd_grad(x, 0, 0), eyy = fd_grad(x, 1, 1);
      double exy = 0.5 * (fd_grad(x, 0, 1) + fd_grad(x, 1, 0));
      double tr = lam * (exx + eyy);
      double tx = (2 * mu * exx + tr) * n.x + 2 * mu * exy * n.y;
      double ty = 2 * mu * exy * n.x + (2 * mu * eyy + tr) * n.y;
      worst = std::max({worst, std::abs(trac[0] - tx), std::abs(trac[1] - ty)});
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("missing boundary conditions and bad data are reported") {
  auto model = square_model([](Point) { return true; });
  mesh::MeshOptions opt;
  opt.h_max = 0.3;
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_exact(model), opt);
  fem::Coefs coefs;
  fem::VolumeData vol{{[](Point) { return 1.0; }, nullptr}, nullptr};
  CHECK_THROWS_AS(fem::solve(std::move(m), coefs, vol, {}), MissingSide);
}
