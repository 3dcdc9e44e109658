#pragma once

// The defeaturing error estimator. Each boundary piece of a removed feature
// contributes a fluctuation term and a data-compatibility (average) term of
// the Neumann defect, scaled by a measure-dependent logarithmic constant.

#include <map>
#include <set>

#include "defeature/pipeline/pipeline.hpp"

namespace defeature::estimator {

using geom::BoundaryArc;
using geom::BoundaryTag;
using geom::GeometryModel;
using geom::Point;

// Fixed point of x = -log(x); floor for the logarithmic constant.
inline double log_floor_constant() {
  static const double eta = [] {
    double x = 0.5;
    for (int i = 0; i < 64; ++i) {
      double f = x + std::log(x);
      double df = 1.0 + 1.0 / x;
      double step = f / df;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    return x;
  }();
  return eta;
}

inline double c_gamma(double measure) {
  if (!(measure > 0)) throw NonpositiveMeasure("boundary piece with measure <= 0");
  return std::sqrt(std::max(-std::log(measure), log_floor_constant()));
}

struct Options {
  double stokes_prefactor = 3.0;  // constant in front of mu^{-1/2}
};

// Leading weight of the estimator for the given problem.
inline double weight(const fem::Coefs& c, const Options& o) {
  switch (c.type) {
    case fem::ProblemType::Poisson: return 1.0;
    case fem::ProblemType::Elasticity: {
      double rho = c.lambda >= 0 ? c.mu : std::min(c.mu, 1.5 * (c.lambda + c.mu));
      return 1.0 / std::sqrt(rho);
    }
    case fem::ProblemType::Stokes: return o.stokes_prefactor / std::sqrt(c.mu);
  }
  return 1.0;
}

struct GammaTerm {
  int arc_id = -1;
  int feature_id = -1;
  BoundaryTag tag = BoundaryTag::GammaN;
  double measure = 0.0;
  double c = 0.0;                   // c_gamma
  double fluct_term = 0.0;          // |g| ||d - dbar||^2
  double avg_term = 0.0;            // c^2 |g|^2 ||dbar||^2
  double estimate = 0.0;            // weight * sqrt(fluct + avg)
  double tilde_sq = 0.0;            // c^2 |g| ||d||^2 (unweighted)
  std::array<double, 2> dbar{0.0, 0.0};
};

struct FluxResidual {
  std::array<double, 2> negative{0.0, 0.0};   // gamma_n balance
  std::array<double, 2> positive{0.0, 0.0};   // gamma_0p balance
  std::array<double, 2> extension{0.0, 0.0};  // gamma_r balance
  bool has_negative = false;
  bool has_positive = false;
};

struct Report {
  std::vector<GammaTerm> gammas;
  std::map<int, double> per_feature;  // feature id -> contribution
  double total = 0.0;
  double tilde_total = 0.0;
  std::map<int, FluxResidual> flux;
};

namespace detail {

using EdgeTris = std::unordered_map<std::uint64_t, std::array<int, 2>>;

inline Point tri_centroid(const mesh::Mesh& m, int t) {
  const auto& tr = m.tris[static_cast<size_t>(t)];
  return {(m.points[tr[0]].x + m.points[tr[1]].x + m.points[tr[2]].x) / 3.0,
          (m.points[tr[0]].y + m.points[tr[1]].y + m.points[tr[2]].y) / 3.0};
}

// Accumulate the defect integrals of one arc. `side_in_region`: if
// non-empty, evaluate from the adjacent triangle whose centroid is NOT in
// the region when `avoid` is true (or IS in it when false); boundary edges
// use their only triangle. The normal points away from the chosen triangle.
struct DefectAccum {
  double measure = 0.0;
  std::array<double, 2> int_d{0.0, 0.0};
  double int_d2 = 0.0;
};

template <typename DefectFun>
DefectAccum accumulate_defect(const fem::Solution& sol, const EdgeTris& adj, int arc_id,
                              const geom::PolygonSet& side_region, bool avoid_region,
                              int ncomp, DefectFun defect) {
  DefectAccum acc;
  auto rule = quad::segment_rule(9);
  for (const mesh::TaggedEdge& e : sol.mesh.tagged_edges) {
    if (e.arc_id != arc_id) continue;
    auto it = adj.find(mesh::edge_key(e.a, e.b));
    if (it == adj.end()) throw LabelNotInSigma("tagged edge missing from the mesh");
    int t = it->second[0];
    if (it->second[1] >= 0 && !side_region.empty()) {
      bool first_in = geom::contains(side_region, tri_centroid(sol.mesh, it->second[0]));
      bool pick_second = avoid_region ? first_in : !first_in;
      if (pick_second) t = it->second[1];
    }
    const Point& pa = sol.mesh.points[static_cast<size_t>(e.a)];
    const Point& pb = sol.mesh.points[static_cast<size_t>(e.b)];
    double len = geom::dist(pa, pb);
    if (len <= 0) continue;
    // unit normal pointing away from the chosen triangle
    Point n{(pb.y - pa.y) / len, -(pb.x - pa.x) / len};
    Point c = tri_centroid(sol.mesh, t);
    Point mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
    if (n.x * (c.x - mid.x) + n.y * (c.y - mid.y) > 0) { n.x = -n.x; n.y = -n.y; }

    fem::CellMap cm = fem::CellMap::build(sol.mesh, t);
    acc.measure += len;
    for (const auto& qp : rule) {
      Point x{pa.x + qp.t * (pb.x - pa.x), pa.y + qp.t * (pb.y - pa.y)};
      double r, s;
      cm.to_reference(x, r, s);
      double trac[2] = {0, 0};
      sol.traction_at(t, r, s, n, trac);
      double d[2] = {0, 0};
      defect(x, trac, d);
      double w = qp.w * len;
      for (int cdx = 0; cdx < ncomp; ++cdx) {
        acc.int_d[static_cast<size_t>(cdx)] += w * d[cdx];
        acc.int_d2 += w * d[cdx] * d[cdx];
      }
    }
  }
  return acc;
}

inline double line_integral(const std::vector<Point>& poly, const fem::ScalarFun& f) {
  if (!f) return 0.0;
  double s = 0.0;
  auto rule = quad::segment_rule(9);
  for (size_t i = 0; i + 1 < poly.size(); ++i) {
    double len = geom::dist(poly[i], poly[i + 1]);
    for (const auto& qp : rule) {
      Point x{poly[i].x + qp.t * (poly[i + 1].x - poly[i].x),
              poly[i].y + qp.t * (poly[i + 1].y - poly[i].y)};
      s += qp.w * len * f(x);
    }
  }
  return s;
}

inline double arcs_integral(const GeometryModel& model, int feature_id, BoundaryTag tag,
                            const fem::ScalarFun& f) {
  double s = 0.0;
  for (const BoundaryArc& a : model.arcs)
    if (a.feature_id == feature_id && a.tag == tag) s += line_integral(a.vertices, f);
  return s;
}

// Integral of f over the part of the mesh inside (or outside) a region whose
// boundary is constrained in that mesh.
inline double region_integral(const mesh::Mesh& m, const geom::PolygonSet& region, bool inside,
                              const fem::ScalarFun& f) {
  if (!f) return 0.0;
  double s = 0.0;
  auto rule = quad::triangle_rule(5);
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
    if (geom::contains(region, tri_centroid(m, t)) != inside) continue;
    fem::CellMap cm = fem::CellMap::build(m, t);
    for (const auto& qp : rule) {
      Point x = cm.to_physical(qp.r, qp.s);
      s += qp.w * std::abs(cm.detJ) * f(x);
    }
  }
  return s;
}

}  // namespace detail

inline Report estimate(const GeometryModel& model, const pipeline::DefeaturedResult& result,
                       const pipeline::ProblemData& data, const Options& opt = {}) {
  Report rep;
  int nc = data.ncomp();
  double w = weight(data.coefs, opt);
  double tilde_w = data.coefs.type == fem::ProblemType::Stokes
                       ? 1.0 / std::sqrt(data.coefs.mu)
                       : (data.coefs.type == fem::ProblemType::Elasticity
                              ? weight(data.coefs, opt)
                              : 1.0);

  detail::EdgeTris base_adj = result.base.mesh.edge_tris();
  std::map<int, detail::EdgeTris> ext_adj;
  for (const auto& [k, sol] : result.extensions) ext_adj.emplace(k, sol.mesh.edge_tris());

  bool any = false;
  double total_sq = 0.0, tilde_sq = 0.0;

  for (const geom::Feature& feat : model.features) {
    if (feat.status != geom::FeatureStatus::Removed) continue;
    any = true;
    double feat_sq = 0.0;
    const fem::Solution* ext = nullptr;
    const detail::EdgeTris* ext_edges = nullptr;
    if (!feat.positive.empty()) {
      auto it = result.extensions.find(feat.id);
      if (it == result.extensions.end())
        throw MissingExtension("feature " + std::to_string(feat.id));
      ext = &it->second;
      ext_edges = &ext_adj.at(feat.id);
    }

    for (const BoundaryArc& a : model.arcs) {
      if (a.feature_id != feat.id) continue;
      detail::DefectAccum acc;
      switch (a.tag) {
        case BoundaryTag::GammaN:
          acc = detail::accumulate_defect(
              result.base, base_adj, a.id, feat.negative, /*avoid=*/true, nc,
              [&](const Point& x, const double* trac, double* d) {
                for (int c = 0; c < nc; ++c)
                  d[c] = data.g_feat[static_cast<size_t>(c)](x) - trac[c];
              });
          break;
        case BoundaryTag::GammaR:
          acc = detail::accumulate_defect(
              *ext, *ext_edges, a.id, feat.positive, /*avoid=*/false, nc,
              [&](const Point& x, const double* trac, double* d) {
                for (int c = 0; c < nc; ++c)
                  d[c] = data.g_feat[static_cast<size_t>(c)](x) - trac[c];
              });
          break;
        case BoundaryTag::Gamma0P:
          acc = detail::accumulate_defect(
              *ext, *ext_edges, a.id, {}, true, nc,
              [&](const Point& x, const double* trac, double* d) {
                for (int c = 0; c < nc; ++c)
                  d[c] = -(data.g_zero[static_cast<size_t>(c)](x) + trac[c]);
              });
          break;
        default:
          continue;  // gamma_0n, gamma_s, gamma_tilde carry no defect
      }
      if (!(acc.measure > 0))
        throw NonpositiveMeasure("arc " + std::to_string(a.id) + " has zero measure");

      GammaTerm g;
      g.arc_id = a.id;
      g.feature_id = feat.id;
      g.tag = a.tag;
      g.measure = acc.measure;
      g.c = c_gamma(acc.measure);
      double dbar2 = 0.0;
      for (int c = 0; c < nc; ++c) {
        g.dbar[static_cast<size_t>(c)] = acc.int_d[static_cast<size_t>(c)] / acc.measure;
        dbar2 += g.dbar[static_cast<size_t>(c)] * g.dbar[static_cast<size_t>(c)];
      }
      double fluct_l2 = std::max(acc.int_d2 - acc.measure * dbar2, 0.0);  // ||d - dbar||^2
      g.fluct_term = acc.measure * fluct_l2;
      g.avg_term = g.c * g.c * acc.measure * acc.measure * dbar2;
      g.estimate = w * std::sqrt(g.fluct_term + g.avg_term);
      g.tilde_sq = g.c * g.c * acc.measure * acc.int_d2;
      rep.gammas.push_back(g);

      feat_sq += g.estimate * g.estimate;
      tilde_sq += g.tilde_sq;
    }
    rep.per_feature[feat.id] = std::sqrt(feat_sq);
    total_sq += feat_sq;

    // data flux balances (zero when the data satisfy flux compatibility)
    FluxResidual fr;
    const mesh::Mesh& bm = result.base.mesh;
    for (int c = 0; c < nc; ++c) {
      size_t ci = static_cast<size_t>(c);
      if (!feat.negative.empty()) {
        fr.has_negative = true;
        fr.negative[ci] = detail::arcs_integral(model, feat.id, BoundaryTag::GammaN, data.g_feat[ci]) -
                          detail::arcs_integral(model, feat.id, BoundaryTag::Gamma0N, data.g_zero[ci]) -
                          detail::region_integral(bm, feat.negative, true, data.f[ci]);
      }
      if (ext != nullptr) {
        fr.has_positive = true;
        double g_on_p = detail::arcs_integral(model, feat.id, BoundaryTag::GammaS, data.g_feat[ci]) +
                        detail::arcs_integral(model, feat.id, BoundaryTag::GammaR, data.g_feat[ci]);
        fr.positive[ci] = detail::arcs_integral(model, feat.id, BoundaryTag::Gamma0P, data.g_zero[ci]) -
                          g_on_p -
                          detail::region_integral(ext->mesh, feat.positive, true, data.f[ci]);
        fr.extension[ci] = detail::arcs_integral(model, feat.id, BoundaryTag::GammaR, data.g_feat[ci]) -
                           detail::arcs_integral(model, feat.id, BoundaryTag::GammaTilde, data.g_tilde[ci]) -
                           detail::region_integral(ext->mesh, feat.positive, false, data.f[ci]);
      }
    }
    rep.flux[feat.id] = fr;
  }

  if (!any) {
    rep.total = 0.0;
    rep.tilde_total = 0.0;
    return rep;
  }
  rep.total = std::sqrt(total_sq);
  rep.tilde_total = tilde_w * std::sqrt(tilde_sq);
  return rep;
}

}  // namespace defeature::estimator
