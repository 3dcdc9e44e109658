#pragma once

// Orchestration of the defeatured computation: solve on the simplified
// domain, solve the extension problems on the feature extensions, and expose
// the composed field plus its distance to a reference solution on the exact
// domain.

#include <map>
#include <memory>

#include "defeature/fem/solve.hpp"
#include "defeature/geometry/model.hpp"
#include "defeature/mesh/generate.hpp"

namespace defeature::pipeline {

using fem::ScalarFun;
using geom::GeometryModel;
using geom::Point;

// All data of one differential problem. Boundary pieces draw from these by
// role; components beyond ncomp are ignored.
struct ProblemData {
  fem::Coefs coefs;
  std::array<ScalarFun, 2> f;        // body load
  ScalarFun f_c;                     // divergence source (Stokes)
  std::array<ScalarFun, 2> g_dir;    // Dirichlet value on the outer boundary
  std::array<ScalarFun, 2> g_neu;    // Neumann datum on the outer boundary
  std::array<ScalarFun, 2> g_feat;   // Neumann datum on feature boundaries (gamma)
  std::array<ScalarFun, 2> g_zero;   // substituted datum on gamma_0 (g_0)
  std::array<ScalarFun, 2> g_tilde;  // datum on the extension boundary (g tilde)

  int ncomp() const { return fem::n_components(coefs.type); }
};

inline ScalarFun zero_fun() {
  return [](Point) { return 0.0; };
}

namespace detail {

inline void require(const std::array<ScalarFun, 2>& f, int ncomp, const char* what) {
  for (int c = 0; c < ncomp; ++c)
    if (!f[static_cast<size_t>(c)]) throw IncompatibleData(std::string("missing data: ") + what);
}

}  // namespace detail

inline void validate(const ProblemData& d) {
  int nc = d.ncomp();
  detail::require(d.f, nc, "f");
  detail::require(d.g_dir, nc, "g_D");
  detail::require(d.g_neu, nc, "g");
  detail::require(d.g_feat, nc, "g on features");
  detail::require(d.g_zero, nc, "g_0");
}

// Boundary conditions of the solve on the defeatured domain.
inline fem::BCMap defeatured_bcs(const GeometryModel& model, const ProblemData& d) {
  fem::BCMap bcs;
  for (const geom::BoundaryArc& a : model.arcs) {
    switch (a.tag) {
      case geom::BoundaryTag::DirichletOuter:
        bcs[a.id] = {fem::BCType::Dirichlet, d.g_dir};
        break;
      case geom::BoundaryTag::NeumannOuter:
        bcs[a.id] = {fem::BCType::Neumann, d.g_neu};
        break;
      case geom::BoundaryTag::Gamma0N:
      case geom::BoundaryTag::Gamma0P:
        // boundary only while the feature is removed
        bcs[a.id] = {fem::BCType::Neumann, d.g_zero};
        break;
      case geom::BoundaryTag::GammaN:
      case geom::BoundaryTag::GammaS:
      case geom::BoundaryTag::GammaR:
        // boundary only once the feature is inserted
        bcs[a.id] = {fem::BCType::Neumann, d.g_feat};
        break;
      default:
        break;
    }
  }
  return bcs;
}

inline fem::Solution solve_defeatured(const GeometryModel& model, const ProblemData& d,
                                      const mesh::MeshOptions& opt) {
  validate(d);
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_defeatured(model), opt);
  return fem::solve(std::move(m), d.coefs, {d.f, d.f_c}, defeatured_bcs(model, d));
}

// Extension solve on tilde F_p^k: Dirichlet trace of the defeatured solution
// on gamma_0p, Neumann data elsewhere.
inline fem::Solution solve_extension(const GeometryModel& model, int k,
                                     const fem::Solution& base, const ProblemData& d,
                                     const mesh::MeshOptions& opt) {
  const geom::Feature& feat = model.feature(k);
  if (feat.positive.empty()) throw EmptyPositivePart("feature " + std::to_string(k));
  if (feat.extension.empty()) throw MissingExtension("feature " + std::to_string(k));
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_extension(model, k), opt);
  fem::BCMap bcs;
  const fem::Solution* basep = &base;
  for (const geom::BoundaryArc& a : model.arcs) {
    if (a.feature_id != k) continue;
    switch (a.tag) {
      case geom::BoundaryTag::Gamma0P: {
        fem::BC bc;
        bc.type = fem::BCType::Dirichlet;
        for (int c = 0; c < d.ncomp(); ++c)
          bc.f[static_cast<size_t>(c)] = [basep, c](Point p) {
            double v[2];
            basep->value(p, v);
            return v[c];
          };
        bcs[a.id] = bc;
        break;
      }
      case geom::BoundaryTag::GammaS:
        bcs[a.id] = {fem::BCType::Neumann, d.g_feat};
        break;
      case geom::BoundaryTag::GammaTilde:
        bcs[a.id] = {fem::BCType::Neumann, d.g_tilde};
        break;
      default:
        break;  // gamma_r is internal here
    }
  }
  return fem::solve(std::move(m), d.coefs, {d.f, d.f_c}, bcs);
}

// Reference solve on the exact domain.
inline fem::Solution solve_exact(const GeometryModel& model, const ProblemData& d,
                                 const mesh::MeshOptions& opt) {
  validate(d);
  mesh::Mesh m = mesh::triangulate(geom::mesh_spec_exact(model), opt);
  fem::BCMap bcs;
  for (const geom::BoundaryArc& a : model.arcs) {
    switch (a.tag) {
      case geom::BoundaryTag::DirichletOuter:
        bcs[a.id] = {fem::BCType::Dirichlet, d.g_dir};
        break;
      case geom::BoundaryTag::NeumannOuter:
        bcs[a.id] = {fem::BCType::Neumann, d.g_neu};
        break;
      case geom::BoundaryTag::GammaN:
      case geom::BoundaryTag::GammaS:
      case geom::BoundaryTag::GammaR:
        bcs[a.id] = {fem::BCType::Neumann, d.g_feat};
        break;
      default:
        break;  // gamma_0 / gamma_tilde are not part of the exact boundary
    }
  }
  return fem::solve(std::move(m), d.coefs, {d.f, d.f_c}, bcs);
}

// The defeatured field on the exact domain: the base solution on Omega_star
// and the extension solutions on the removed positive components.
struct CompositeField {
  const fem::Solution* base = nullptr;
  struct Layer {
    geom::PolygonSet region;  // F_p^k
    const fem::Solution* sol = nullptr;
    int feature_id = -1;
  };
  std::vector<Layer> layers;

  const fem::Solution& resolve(const Point& p) const {
    for (const Layer& l : layers)
      if (geom::covers(l.region, p)) return *l.sol;
    return *base;
  }

  void value(const Point& p, double* out) const { resolve(p).value(p, out); }
  void grad(const Point& p, double (*out)[2]) const { resolve(p).grad(p, out); }
  double pressure(const Point& p) const { return resolve(p).pressure(p); }
};

struct DefeaturedResult {
  fem::Solution base;
  std::map<int, fem::Solution> extensions;  // removed positive features only

  CompositeField compose(const GeometryModel& model) const {
    CompositeField f;
    f.base = &base;
    for (const auto& [k, sol] : extensions)
      f.layers.push_back({model.feature(k).positive, &sol, k});
    return f;
  }
};

inline DefeaturedResult solve_all(const GeometryModel& model, const ProblemData& d,
                                  const mesh::MeshOptions& opt) {
  DefeaturedResult r;
  r.base = solve_defeatured(model, d, opt);
  for (const geom::Feature& f : model.features)
    if (f.status == geom::FeatureStatus::Removed && !f.positive.empty())
      r.extensions.emplace(f.id, solve_extension(model, f.id, r.base, d, opt));
  return r;
}

// Energy-norm distance between the reference solution and the composed
// defeatured field, integrated on the reference mesh. The Stokes norm is
// viscous part plus mu^{-1/2} times the absolute pressure misfit; the
// defeatured pressure carries the zero-mean gauge of its own solve.
inline double energy_error(const fem::Solution& ref, const CompositeField& ud) {
  auto rule = quad::triangle_rule(5);
  double visc = 0.0, pr = 0.0;
  fem::ProblemType type = ref.coefs.type;
  double mu = ref.coefs.mu, lam = ref.coefs.lambda;
  for (int t = 0; t < static_cast<int>(ref.mesh.tris.size()); ++t) {
    fem::CellMap cm = fem::CellMap::build(ref.mesh, t);
    for (const auto& qp : rule) {
      double w = qp.w * std::abs(cm.detJ);
      Point x = cm.to_physical(qp.r, qp.s);
      double gr[2][2], gd[2][2];
      ref.grad_at(t, qp.r, qp.s, gr);
      ud.grad(x, gd);
      if (type == fem::ProblemType::Poisson) {
        double ex = gr[0][0] - gd[0][0], ey = gr[0][1] - gd[0][1];
        visc += w * (ex * ex + ey * ey);
        continue;
      }
      double exx = gr[0][0] - gd[0][0];
      double eyy = gr[1][1] - gd[1][1];
      double exy = 0.5 * (gr[0][1] - gd[0][1] + gr[1][0] - gd[1][0]);
      double eps2 = exx * exx + eyy * eyy + 2 * exy * exy;
      double tr = exx + eyy;
      visc += w * (2 * mu * eps2 + (type == fem::ProblemType::Elasticity ? lam * tr * tr : 0.0));
      if (type == fem::ProblemType::Stokes) {
        double dp = ref.pressure_at(t, qp.r, qp.s) - ud.pressure(x);
        pr += w * dp * dp;
      }
    }
  }
  if (type != fem::ProblemType::Stokes) return std::sqrt(std::max(visc, 0.0));
  return std::sqrt(std::max(visc, 0.0)) + std::sqrt(std::max(pr, 0.0)) / std::sqrt(mu);
}

}  // namespace defeature::pipeline
