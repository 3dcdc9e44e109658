#pragma once

// Shared helpers for the test binaries: plain-square solves and error norms
// against manufactured fields.

#include <functional>

#include "defeature/fem/solve.hpp"
#include "defeature/geometry/model.hpp"
#include "defeature/mesh/generate.hpp"

namespace testsup {

using defeature::geom::Point;
namespace geom = defeature::geom;
namespace mesh = defeature::mesh;
namespace fem = defeature::fem;
namespace quad = defeature::quad;

// Unit square model without features; the outer boundary splits into a
// Dirichlet arc and a Neumann arc per the predicate.
inline geom::GeometryModel square_model(const std::function<bool(Point)>& is_dirichlet) {
  auto sq = geom::make_set(geom::make_rect(0, 0, 1, 1));
  return geom::build_model(sq, {}, is_dirichlet);
}

inline fem::Solution solve_square(const geom::GeometryModel& model, double h,
                                  const fem::Coefs& coefs, const fem::VolumeData& vol,
                                  const fem::BC& dir, const fem::BC& neu) {
  mesh::MeshOptions opt;
  opt.h_max = h;
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_exact(model), opt);
  fem::BCMap bcs;
  for (const geom::BoundaryArc& a : model.arcs)
    bcs[a.id] = a.tag == geom::BoundaryTag::DirichletOuter ? dir : neu;
  return fem::solve(std::move(m), coefs, vol, bcs);
}

// H1 seminorm distance between a discrete solution and an analytic gradient
// field grad[c][d] = d u_c / d x_d.
inline double h1_error(const fem::Solution& sol,
                       const std::function<void(Point, double (*)[2])>& grad_exact) {
  auto rule = quad::triangle_rule(8);
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(sol.mesh.tris.size()); ++t) {
    fem::CellMap cm = fem::CellMap::build(sol.mesh, t);
    for (const auto& qp : rule) {
      double gh[2][2], ge[2][2];
      sol.grad_at(t, qp.r, qp.s, gh);
      grad_exact(cm.to_physical(qp.r, qp.s), ge);
      double w = qp.w * std::abs(cm.detJ);
      for (int c = 0; c < sol.ncomp; ++c)
        for (int d = 0; d < 2; ++d) {
          double e = gh[c][d] - ge[c][d];
          acc += w * e * e;
        }
    }
  }
  return std::sqrt(acc);
}

// Max nodal error of the primary field against analytic components.
inline double nodal_error(const fem::Solution& sol,
                          const std::function<double(Point, int)>& exact) {
  double worst = 0.0;
  for (int i = 0; i < sol.space.n_dofs(); ++i)
    for (int c = 0; c < sol.ncomp; ++c)
      worst = std::max(worst, std::abs(sol.u[sol.dof(c, i)] -
                                       exact(sol.space.dof_points[static_cast<size_t>(i)], c)));
  return worst;
}

// Residual of the discrete divergence equations: for every pressure shape q,
// integral q (div u_h - f_c) must vanish.
inline double divergence_residual(const fem::Solution& sol, const fem::ScalarFun& f_c) {
  std::vector<double> r(static_cast<size_t>(sol.pspace.n_dofs()), 0.0);
  auto rule = quad::triangle_rule(5);
  for (int t = 0; t < static_cast<int>(sol.mesh.tris.size()); ++t) {
    fem::CellMap cm = fem::CellMap::build(sol.mesh, t);
    const auto& cd = sol.space.cells[static_cast<size_t>(t)];
    const auto& pd = sol.pspace.cells[static_cast<size_t>(t)];
    for (const auto& qp : rule) {
      double w = qp.w * std::abs(cm.detJ);
      double g[2][2];
      sol.grad_at(t, qp.r, qp.s, g);
      double div = g[0][0] + g[1][1];
      double fc = f_c ? f_c(cm.to_physical(qp.r, qp.s)) : 0.0;
      double Np[3];
      fem::shape_values(1, qp.r, qp.s, Np);
      for (int j = 0; j < 3; ++j) r[static_cast<size_t>(pd[j])] += w * Np[j] * (div - fc);
      (void)cd;
    }
  }
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v));
  return worst;
}

// Interpolate an analytic field into the P2 space of a solved problem's mesh
// (for traction checks independent of any solve).
inline fem::Solution interpolate(mesh::Mesh m, const fem::Coefs& coefs,
                                 const std::function<double(Point, int)>& exact) {
  fem::Solution sol;
  sol.mesh = std::move(m);
  sol.coefs = coefs;
  sol.ncomp = fem::n_components(coefs.type);
  sol.space = fem::FeSpace::build(sol.mesh, 2);
  sol.u.resize(sol.ncomp * sol.space.n_dofs());
  for (int i = 0; i < sol.space.n_dofs(); ++i)
    for (int c = 0; c < sol.ncomp; ++c)
      sol.u[sol.dof(c, i)] = exact(sol.space.dof_points[static_cast<size_t>(i)], c);
  return sol;
}

}  // namespace testsup
