#pragma once

// Exact/defeatured domains, features with negative and positive components,
// and the classification of feature boundaries into the pieces that drive the
// defeaturing estimator. Boundary pieces are held as tagged polylines so the
// mesher can carry them through as constrained edge chains.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "defeature/common.hpp"
#include "defeature/geometry/polygon.hpp"

namespace defeature::geom {

enum class BoundaryTag {
  DirichletOuter,
  NeumannOuter,
  GammaN,      // \partial F_n on \partial Omega
  Gamma0N,     // replaced by \partial Omega_0 when the hole is filled
  Gamma0P,     // interface where the protrusion attaches
  GammaR,      // part of gamma_p interior to the extension
  GammaS,      // part of gamma_p shared with the extension boundary
  GammaTilde,  // extension boundary away from the feature
};

inline bool is_outer(BoundaryTag t) {
  return t == BoundaryTag::DirichletOuter || t == BoundaryTag::NeumannOuter;
}

inline std::string tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::DirichletOuter: return "dirichlet";
    case BoundaryTag::NeumannOuter: return "neumann";
    case BoundaryTag::GammaN: return "gamma_n";
    case BoundaryTag::Gamma0N: return "gamma_0n";
    case BoundaryTag::Gamma0P: return "gamma_0p";
    case BoundaryTag::GammaR: return "gamma_r";
    case BoundaryTag::GammaS: return "gamma_s";
    case BoundaryTag::GammaTilde: return "gamma_tilde";
  }
  return "?";
}

struct BoundaryArc {
  int id = -1;
  BoundaryTag tag = BoundaryTag::NeumannOuter;
  int feature_id = -1;                  // required for feature tags
  std::vector<Point> vertices;          // open polyline; closed loops repeat the first point
  double length = 0.0;

  bool closed() const {
    return vertices.size() > 2 && dist(vertices.front(), vertices.back()) == 0.0;
  }
};

enum class FeatureStatus { Removed, Inserted };

struct Feature {
  int id = 0;
  PolygonSet negative;   // F_n^k
  PolygonSet positive;   // F_p^k
  PolygonSet extension;  // tilde F_p^k (empty iff positive empty)
  FeatureStatus status = FeatureStatus::Removed;

  PolygonSet whole() const { return set_union(negative, positive); }
  PolygonSet gap() const { return set_difference(extension, positive); }  // G_p^k
};

enum class ExtensionPolicy { BoundingBox, Identity };

struct SeparationReport {
  bool pairwise_ok = true;
  double min_gap = kInf;
  std::vector<std::pair<int, int>> overlap_pairs;  // (k, l); l = 0 flags a clash with Omega_star
};

struct GeometryModel {
  PolygonSet exact;       // Omega
  PolygonSet defeatured;  // Omega_0^(i)
  PolygonSet omega_star;  // Omega \ cl F_p(remaining)
  std::vector<Feature> features;
  std::vector<BoundaryArc> arcs;
  int iteration = 0;
  double snap_tol = 1e-12;

  const Feature& feature(int k) const {
    for (const Feature& f : features)
      if (f.id == k) return f;
    throw Error("unknown feature id " + std::to_string(k));
  }

  Feature& feature(int k) {
    for (Feature& f : features)
      if (f.id == k) return f;
    throw Error("unknown feature id " + std::to_string(k));
  }

  std::vector<int> removed_ids() const {
    std::vector<int> out;
    for (const Feature& f : features)
      if (f.status == FeatureStatus::Removed) out.push_back(f.id);
    return out;
  }

  const BoundaryArc* find_arc(BoundaryTag tag, int feature_id) const {
    for (const BoundaryArc& a : arcs)
      if (a.tag == tag && a.feature_id == feature_id) return &a;
    return nullptr;
  }

  std::vector<const BoundaryArc*> arcs_of(int feature_id) const {
    std::vector<const BoundaryArc*> out;
    for (const BoundaryArc& a : arcs)
      if (a.feature_id == feature_id) out.push_back(&a);
    return out;
  }

  double arc_length(BoundaryTag tag, int feature_id) const {
    double s = 0.0;
    for (const BoundaryArc& a : arcs)
      if (a.tag == tag && a.feature_id == feature_id) s += a.length;
    return s;
  }
};

namespace detail {

// Split one segment [a,b] at the parameters where vertices of the test
// boundary land on it, so each piece is either fully on or fully off.
inline std::vector<double> split_params(const Point& a, const Point& b,
                                        const std::vector<const Ring*>& test_rings,
                                        double tol) {
  std::vector<double> ts{0.0, 1.0};
  double vx = b.x - a.x, vy = b.y - a.y;
  double vv = vx * vx + vy * vy;
  if (vv == 0.0) return ts;
  for (const Ring* r : test_rings) {
    for (const Point& p : *r) {
      double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / vv;
      if (t <= 1e-12 || t >= 1.0 - 1e-12) continue;
      double dx = a.x + t * vx - p.x, dy = a.y + t * vy - p.y;
      if (std::hypot(dx, dy) < tol) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double u, double v) { return std::abs(u - v) < 1e-12; }),
           ts.end());
  return ts;
}

inline std::vector<const Ring*> all_rings(const PolygonSet& s) {
  std::vector<const Ring*> out;
  for (const auto& p : s) {
    out.push_back(&p.outer);
    for (const Ring& h : p.holes) out.push_back(&h);
  }
  return out;
}

inline bool on_boundary(const Point& p, const PolygonSet& s, double tol) {
  return distance_to_boundary(p, s) < tol;
}

// A ring chopped into classified pieces, later stitched into maximal arcs.
struct ClassifiedPiece {
  Point a, b;
  int cls = 0;
};

template <typename Classify>
std::vector<ClassifiedPiece> classify_ring(const Ring& ring,
                                           const std::vector<const Ring*>& split_against,
                                           double tol, Classify classify) {
  std::vector<ClassifiedPiece> out;
  size_t n = ring.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    if (dist(a, b) < tol) continue;
    std::vector<double> ts = split_params(a, b, split_against, tol);
    for (size_t j = 0; j + 1 < ts.size(); ++j) {
      Point pa{a.x + ts[j] * (b.x - a.x), a.y + ts[j] * (b.y - a.y)};
      Point pb{a.x + ts[j + 1] * (b.x - a.x), a.y + ts[j + 1] * (b.y - a.y)};
      Point mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
      out.push_back({pa, pb, classify(mid)});
    }
  }
  return out;
}

// Stitch consecutive pieces with equal class into polyline arcs. Pieces come
// from walking a ring in order, so consecutive pieces share endpoints; the
// wrap-around run is merged.
inline std::vector<std::pair<int, std::vector<Point>>> stitch(
    const std::vector<ClassifiedPiece>& pieces, double tol) {
  std::vector<std::pair<int, std::vector<Point>>> arcs;
  for (const ClassifiedPiece& pc : pieces) {
    if (!arcs.empty() && arcs.back().first == pc.cls &&
        dist(arcs.back().second.back(), pc.a) < tol) {
      arcs.back().second.push_back(pc.b);
    } else {
      arcs.push_back({pc.cls, {pc.a, pc.b}});
    }
  }
  // merge the final run into the first when the ring closes with the same class
  if (arcs.size() > 1 && arcs.front().first == arcs.back().first &&
      dist(arcs.back().second.back(), arcs.front().second.front()) < tol) {
    std::vector<Point>& head = arcs.front().second;
    std::vector<Point>& tail = arcs.back().second;
    tail.insert(tail.end(), head.begin() + 1, head.end());
    head = std::move(tail);
    arcs.pop_back();
  }
  return arcs;
}

}  // namespace detail

// Axis-aligned (or general convex) clip of a ring by the half plane
// {p : n.(p - q) <= 0}.
inline Ring clip_halfplane(const Ring& ring, Point q, Point normal) {
  Ring out;
  size_t n = ring.size();
  auto side = [&](const Point& p) {
    return normal.x * (p.x - q.x) + normal.y * (p.y - q.y);
  };
  for (size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    double sa = side(a), sb = side(b);
    if (sa <= 0) out.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) {
      double t = sa / (sa - sb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

// Choose the extension domain tilde F_p^k for a positive component.
inline Feature make_extension(Feature f, ExtensionPolicy policy, double tol) {
  if (area(f.positive) <= 0.0)
    throw EmptyPositivePart("feature " + std::to_string(f.id) + " has no positive part");
  if (policy == ExtensionPolicy::Identity) {
    f.extension = f.positive;
    return f;
  }
  Point lo, hi;
  bounding_box(f.positive, lo, hi);
  Ring box = make_rect(lo.x, lo.y, hi.x, hi.y);
  f.extension = make_set(box);
  return f;
}

// Everything needed to drop one mesh on a domain: the outline for the
// inside/outside test and tagged polylines covering the boundary plus the
// internal constrained curves.
struct TaggedPolyline {
  int arc_id = -1;
  std::vector<Point> points;
  bool internal = false;
  bool feature = false;  // feature boundary (eligible for near-size override)
};

struct MeshSpec {
  PolygonSet outline;
  std::vector<TaggedPolyline> polylines;
};

class ModelBuilder;

// Build a geometry model from the exact domain and its features. The
// dirichlet predicate decides, for outer-boundary midpoints, whether the
// piece carries Dirichlet data.
GeometryModel build_model(const PolygonSet& exact, std::vector<Feature> features,
                          const std::function<bool(Point)>& is_dirichlet,
                          ExtensionPolicy policy = ExtensionPolicy::BoundingBox);

// Exact domain recovered from a defeatured base and the feature set:
// Omega = int(cl(Omega_0 \ cl F_n) cup cl F_p).
inline PolygonSet exact_from_defeatured(const PolygonSet& defeatured,
                                        const std::vector<Feature>& features) {
  PolygonSet fn, fp;
  for (const Feature& f : features) {
    fn = set_union(fn, f.negative);
    fp = set_union(fp, f.positive);
  }
  return set_union(set_difference(defeatured, fn), fp);
}

inline SeparationReport validate_separation(const GeometryModel& model) {
  SeparationReport rep;
  const auto& fs = model.features;
  double tol = model.snap_tol;
  for (size_t i = 0; i < fs.size(); ++i) {
    for (size_t j = i + 1; j < fs.size(); ++j) {
      double d = closure_distance(fs[i].whole(), fs[j].whole());
      rep.min_gap = std::min(rep.min_gap, d);
      bool touch = d <= tol;
      if (!touch && !fs[i].extension.empty() && !fs[j].extension.empty())
        touch = area(set_intersection(fs[i].extension, fs[j].extension)) > kSliverArea;
      if (touch) rep.overlap_pairs.push_back({fs[i].id, fs[j].id});
    }
    if (!fs[i].extension.empty() &&
        area(set_intersection(fs[i].extension, model.omega_star)) > 1e3 * kSliverArea)
      rep.overlap_pairs.push_back({fs[i].id, 0});
  }
  rep.pairwise_ok = rep.overlap_pairs.empty();
  return rep;
}

namespace detail {

inline void append_arcs(std::vector<BoundaryArc>& arcs,
                        std::vector<std::pair<int, std::vector<Point>>> stitched,
                        const std::vector<BoundaryTag>& cls_tag, int feature_id) {
  for (auto& [cls, pts] : stitched) {
    if (cls < 0) continue;  // skipped class
    BoundaryArc a;
    a.id = static_cast<int>(arcs.size());
    a.tag = cls_tag[static_cast<size_t>(cls)];
    a.feature_id = feature_id;
    a.length = polyline_length(pts);
    a.vertices = std::move(pts);
    if (a.length > 0) arcs.push_back(std::move(a));
  }
}

}  // namespace detail

inline GeometryModel build_model(const PolygonSet& exact, std::vector<Feature> features,
                                 const std::function<bool(Point)>& is_dirichlet,
                                 ExtensionPolicy policy) {
  GeometryModel m;
  m.exact = exact;
  m.snap_tol = 1e-9 * diameter(exact);
  double tol = m.snap_tol;

  for (Feature& f : features) {
    for (const Ring* r : detail::all_rings(f.negative))
      if (!is_simple_ring(*r)) throw InvalidPolygon("negative part of feature " + std::to_string(f.id));
    for (const Ring* r : detail::all_rings(f.positive))
      if (!is_simple_ring(*r)) throw InvalidPolygon("positive part of feature " + std::to_string(f.id));
    if (f.negative.empty() && f.positive.empty())
      throw InvalidPolygon("feature " + std::to_string(f.id) + " has no components");
    if (!f.positive.empty() && f.extension.empty())
      f = make_extension(std::move(f), policy, tol);
    f.status = FeatureStatus::Removed;
  }

  PolygonSet fn, fp;
  for (const Feature& f : features) {
    fn = set_union(fn, f.negative);
    fp = set_union(fp, f.positive);
  }
  double dom_area = area(exact);
  if (area(set_difference(fp, exact)) > 1e-12 * std::max(dom_area, 1.0))
    throw FeatureOutsideDomain("positive parts must lie inside the exact domain");
  if (area(set_intersection(fn, exact)) > 1e-12 * std::max(dom_area, 1.0))
    throw FeatureOutsideDomain("negative parts must not overlap the exact domain");

  m.omega_star = set_difference(exact, fp);
  m.defeatured = set_union(m.omega_star, fn);
  if (area(m.defeatured) <= 0) throw BooleanOpFailure("empty defeatured domain");
  m.features = std::move(features);
  m.iteration = 0;

  // Feature boundary pieces.
  for (const Feature& f : m.features) {
    // negative component: on d(Omega_star) -> gamma_n, else gamma_0n
    {
      auto star_rings = detail::all_rings(m.omega_star);
      for (const Ring* r : detail::all_rings(f.negative)) {
        auto pieces = detail::classify_ring(*r, star_rings, tol, [&](Point mid) {
          return detail::on_boundary(mid, m.omega_star, tol) ? 0 : 1;
        });
        detail::append_arcs(m.arcs, detail::stitch(pieces, tol),
                            {BoundaryTag::GammaN, BoundaryTag::Gamma0N}, f.id);
      }
    }
    // positive component: off dOmega -> gamma_0p; on dOmega and on d(tilde F) -> gamma_s;
    // on dOmega but interior to the extension -> gamma_r
    if (!f.positive.empty()) {
      auto ex_rings = detail::all_rings(m.exact);
      auto ext_rings = detail::all_rings(f.extension);
      std::vector<const Ring*> split_against = ex_rings;
      split_against.insert(split_against.end(), ext_rings.begin(), ext_rings.end());
      for (const Ring* r : detail::all_rings(f.positive)) {
        auto pieces = detail::classify_ring(*r, split_against, tol, [&](Point mid) {
          if (!detail::on_boundary(mid, m.exact, tol)) return 0;  // gamma_0p
          return detail::on_boundary(mid, f.extension, tol) ? 1 : 2;
        });
        detail::append_arcs(m.arcs, detail::stitch(pieces, tol),
                            {BoundaryTag::Gamma0P, BoundaryTag::GammaS, BoundaryTag::GammaR},
                            f.id);
      }
      // extension boundary away from the feature: tilde gamma
      auto pos_rings = detail::all_rings(f.positive);
      for (const Ring* r : detail::all_rings(f.extension)) {
        auto pieces = detail::classify_ring(*r, pos_rings, tol, [&](Point mid) {
          return detail::on_boundary(mid, f.positive, tol) ? -1 : 0;
        });
        detail::append_arcs(m.arcs, detail::stitch(pieces, tol), {BoundaryTag::GammaTilde}, f.id);
      }
      // required by the extension construction: gamma_0p on the extension boundary
      for (const BoundaryArc& a : m.arcs) {
        if (a.feature_id != f.id || a.tag != BoundaryTag::Gamma0P) continue;
        for (size_t i = 0; i + 1 < a.vertices.size(); ++i) {
          Point mid{0.5 * (a.vertices[i].x + a.vertices[i + 1].x),
                    0.5 * (a.vertices[i].y + a.vertices[i + 1].y)};
          if (!detail::on_boundary(mid, f.extension, tol))
            throw ExtensionViolation("gamma_0p of feature " + std::to_string(f.id) +
                                     " does not lie on the extension boundary");
        }
      }
    }
  }

  // Permanent outer boundary: dOmega minus all feature boundaries.
  {
    PolygonSet fbound = set_union(fn, fp);
    auto fb_rings = detail::all_rings(fbound);
    for (const Ring* r : detail::all_rings(m.exact)) {
      auto pieces = detail::classify_ring(*r, fb_rings, tol, [&](Point mid) {
        if (!fbound.empty() && detail::on_boundary(mid, fbound, tol)) return -1;  // feature piece
        return is_dirichlet(mid) ? 0 : 1;
      });
      detail::append_arcs(m.arcs, detail::stitch(pieces, tol),
                          {BoundaryTag::DirichletOuter, BoundaryTag::NeumannOuter}, -1);
    }
  }
  return m;
}

// Arcs for feature k, grouped per the boundary taxonomy.
inline std::vector<BoundaryArc> classify_boundaries(const GeometryModel& model, int k) {
  const Feature& f = model.feature(k);
  if (f.status != FeatureStatus::Removed)
    throw AlreadyInserted("feature " + std::to_string(k) + " is already inserted");
  std::vector<BoundaryArc> out;
  for (const BoundaryArc& a : model.arcs)
    if (a.feature_id == k) out.push_back(a);
  if (out.empty()) throw UnclassifiableArc("feature " + std::to_string(k) + " has no arcs");
  return out;
}

// Geometric refinement: insert the marked features into the defeatured model.
inline GeometryModel insert_features(const GeometryModel& model, const std::set<int>& marked) {
  GeometryModel next = model;
  next.iteration = model.iteration + 1;
  if (marked.empty()) return next;

  PolygonSet fn, fp;
  for (int k : marked) {
    const Feature& f = next.feature(k);
    if (f.status != FeatureStatus::Removed)
      throw AlreadyInserted("feature " + std::to_string(k));
    fn = set_union(fn, f.negative);
    fp = set_union(fp, f.positive);
  }
  PolygonSet half = set_difference(next.defeatured, fn);
  next.defeatured = set_union(half, fp);
  for (int k : marked) next.feature(k).status = FeatureStatus::Inserted;

  PolygonSet fp_remaining;
  for (const Feature& f : next.features)
    if (f.status == FeatureStatus::Removed) fp_remaining = set_union(fp_remaining, f.positive);
  next.omega_star = set_difference(next.exact, fp_remaining);
  return next;
}

// --- Mesh specs -----------------------------------------------------------

namespace detail {

inline void push_tagged(std::vector<TaggedPolyline>& out, const BoundaryArc& a, bool internal) {
  out.push_back({a.id, a.vertices, internal, !is_outer(a.tag)});
}

}  // namespace detail

// Mesh of the (partially) defeatured domain Omega_0^(i). Boundaries of
// removed negative components are constrained internal curves; boundaries of
// inserted features are genuine domain boundary.
inline MeshSpec mesh_spec_defeatured(const GeometryModel& m) {
  MeshSpec spec;
  spec.outline = m.defeatured;
  for (const BoundaryArc& a : m.arcs) {
    if (is_outer(a.tag)) {
      detail::push_tagged(spec.polylines, a, false);
      continue;
    }
    const Feature& f = m.feature(a.feature_id);
    bool removed = f.status == FeatureStatus::Removed;
    switch (a.tag) {
      case BoundaryTag::GammaN:
        detail::push_tagged(spec.polylines, a, removed);  // internal while removed
        break;
      case BoundaryTag::Gamma0N:
      case BoundaryTag::Gamma0P:
        if (removed) detail::push_tagged(spec.polylines, a, false);
        break;
      case BoundaryTag::GammaS:
      case BoundaryTag::GammaR:
        if (!removed) detail::push_tagged(spec.polylines, a, false);
        break;
      default:
        break;  // gamma_tilde never bounds Omega_0
    }
  }
  return spec;
}

// Mesh of the extension domain tilde F_p^k (feature must be removed).
inline MeshSpec mesh_spec_extension(const GeometryModel& m, int k) {
  const Feature& f = m.feature(k);
  if (f.positive.empty()) throw EmptyPositivePart("feature " + std::to_string(k));
  MeshSpec spec;
  spec.outline = f.extension;
  for (const BoundaryArc& a : m.arcs) {
    if (a.feature_id != k) continue;
    switch (a.tag) {
      case BoundaryTag::Gamma0P:
      case BoundaryTag::GammaS:
      case BoundaryTag::GammaTilde:
        detail::push_tagged(spec.polylines, a, false);
        break;
      case BoundaryTag::GammaR:
        detail::push_tagged(spec.polylines, a, true);
        break;
      default:
        break;
    }
  }
  return spec;
}

// Mesh of the exact domain Omega (reference/overkill solves).
inline MeshSpec mesh_spec_exact(const GeometryModel& m) {
  MeshSpec spec;
  spec.outline = m.exact;
  for (const BoundaryArc& a : m.arcs) {
    if (is_outer(a.tag)) {
      detail::push_tagged(spec.polylines, a, false);
      continue;
    }
    switch (a.tag) {
      case BoundaryTag::GammaN:
      case BoundaryTag::GammaS:
      case BoundaryTag::GammaR:
        detail::push_tagged(spec.polylines, a, false);
        break;
      default:
        break;  // gamma_0 / gamma_tilde are not part of dOmega
    }
  }
  return spec;
}

}  // namespace defeature::geom
