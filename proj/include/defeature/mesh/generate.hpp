#pragma once

// Constrained Delaunay triangulation (Bowyer-Watson insertion + segment
// recovery by flipping) followed by Ruppert-style refinement against a size
// field. Exact-sign predicates keep the connectivity decisions safe; the
// refinement loop is bounded so pathological inputs fail loudly instead of
// spinning.

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "defeature/geometry/model.hpp"
#include "defeature/geometry/predicates.hpp"
#include "defeature/mesh/mesh.hpp"

namespace defeature::mesh {

namespace detail {

struct EdgeTag {
  int arc_id = -1;
  bool internal = false;
};

class Triangulator {
 public:
  Triangulator(const geom::MeshSpec& spec, const MeshOptions& opt)
      : spec_(spec), opt_(opt) {
    geom::bounding_box(spec.outline, lo_, hi_);
    diam_ = std::hypot(hi_.x - lo_.x, hi_.y - lo_.y);
    if (!(diam_ > 0)) throw InvalidPolygon("empty mesh outline");
    snap_ = 1e-9 * diam_;
    len_floor_ = 1e-7 * diam_;
    build_size_field();
    init_super();
    insert_polyline_vertices();
    recover_all_segments();
    classify_regions();
    refine();
  }

  Mesh take() {
    Mesh out;
    std::vector<int> remap(pts_.size(), -1);
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      if (!tris_[t].alive || !tris_[t].inside) continue;
      for (int vi : tris_[t].v)
        if (remap[vi] < 0) {
          remap[vi] = static_cast<int>(out.points.size());
          out.points.push_back(pts_[vi]);
        }
      out.tris.push_back({remap[tris_[t].v[0]], remap[tris_[t].v[1]], remap[tris_[t].v[2]]});
    }
    for (const auto& [key, tag] : constraints_) {
      int a = static_cast<int>(key >> 32);
      int b = static_cast<int>(key & 0xffffffffu);
      if (remap[a] < 0 || remap[b] < 0)
        throw NonconvergentRefinement("constrained edge lost from the interior mesh");
      TaggedEdge e;
      e.a = std::min(remap[a], remap[b]);
      e.b = std::max(remap[a], remap[b]);
      e.arc_id = tag.arc_id;
      e.internal = tag.internal;
      out.tagged_edges.push_back(e);
    }
    return out;
  }

 private:
  struct Tri {
    int v[3];
    int n[3];  // neighbor opposite v[i], -1 = none
    bool alive = true;
    bool inside = false;
  };

  const geom::MeshSpec& spec_;
  MeshOptions opt_;
  Point lo_, hi_;
  double diam_ = 0, snap_ = 0, len_floor_ = 0;
  SizeField size_;

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vert_tri_;  // one incident alive triangle per vertex (lazy)
  std::unordered_map<std::uint64_t, EdgeTag> constraints_;
  std::vector<std::vector<int>> polyline_verts_;  // inserted vertex ids per polyline
  int hint_ = 0;
  int inserted_ = 0;
  std::vector<std::uint32_t> cav_mark_;
  std::uint32_t cav_stamp_ = 0;

  // -- basic helpers -------------------------------------------------------

  const Point& P(int v) const { return pts_[static_cast<size_t>(v)]; }

  static int index_of(const Tri& t, int v) {
    for (int i = 0; i < 3; ++i)
      if (t.v[i] == v) return i;
    return -1;
  }

  void set_neighbor(int t, int across_vertex_slot, int nb) {
    tris_[t].n[across_vertex_slot] = nb;
  }

  int neighbor_slot(int t, int nb) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].n[i] == nb) return i;
    return -1;
  }

  bool constrained(int a, int b) const { return constraints_.count(edge_key(a, b)) > 0; }

  void build_size_field() {
    size_.h_max = opt_.h_max;
    size_.grading = opt_.grading;
    for (const auto& pl : spec_.polylines) {
      double len = geom::polyline_length(pl.points);
      double near = pl.feature && opt_.h_near > 0 ? opt_.h_near : len * opt_.near_fraction;
      double h = std::min(opt_.h_max, std::max(near, 4.0 * len_floor_));
      for (size_t i = 0; i + 1 < pl.points.size(); ++i)
        size_.sources.push_back({pl.points[i], pl.points[i + 1], h});
    }
  }

  void init_super() {
    double cx = 0.5 * (lo_.x + hi_.x), cy = 0.5 * (lo_.y + hi_.y);
    double r = 10.0 * diam_;
    pts_.push_back({cx - 2 * r, cy - r});
    pts_.push_back({cx + 2 * r, cy - r});
    pts_.push_back({cx, cy + 2 * r});
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true, false});
    vert_tri_.assign(3, 0);
    cav_mark_.assign(1, 0);
  }

  // -- point location ------------------------------------------------------

  int locate(const Point& p) const {
    int t = hint_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
      t = -1;
      for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
        if (tris_[i].alive) { t = i; break; }
    }
    size_t guard = tris_.size() * 4 + 64;
    while (guard-- > 0) {
      const Tri& tr = tris_[t];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const Point& a = P(tr.v[(i + 1) % 3]);
        const Point& b = P(tr.v[(i + 2) % 3]);
        if (geom::orient2d(a, b, p) < 0) {
          next = tr.n[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    throw NonconvergentRefinement("point location walk did not terminate");
  }

  // -- Bowyer-Watson insertion --------------------------------------------

  int blocked_u_ = -1, blocked_v_ = -1;  // constrained edge that vetoed an insertion

  // Insert p. If split_a >= 0 the insertion splits the (former) constrained
  // edge (split_a, split_b); inside flags are then assigned per side. With
  // reject_encroaching, the insertion is abandoned (returns -1) when p lies
  // inside the diametral circle of a constrained cavity-boundary edge; the
  // edge is reported via blocked_u_/blocked_v_.
  int insert_point(const Point& p, int split_a = -1, int split_b = -1,
                   bool left_inside = false, bool right_inside = false,
                   bool reject_encroaching = false) {
    if (++inserted_ > opt_.max_insertions)
      throw NonconvergentRefinement("refinement exceeded the insertion budget");
    int t0 = locate(p);

    // snap to an existing nearby vertex
    for (int vi : tris_[t0].v)
      if (geom::dist(P(vi), p) < snap_) return vi;

    // cavity: BFS over circumcircle violations, never across constraints
    if (++cav_stamp_ == 0) { cav_mark_.assign(tris_.size(), 0); cav_stamp_ = 1; }
    cav_mark_.resize(tris_.size(), 0);
    std::vector<int> cavity{t0};
    cav_mark_[t0] = cav_stamp_;
    std::vector<std::array<int, 3>> boundary;  // (a, b, outside_tri)
    for (size_t qi = 0; qi < cavity.size(); ++qi) {
      int t = cavity[qi];
      const Tri tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        int nb = tr.n[i];
        bool open = false;
        if (nb >= 0 && !constrained(a, b) && cav_mark_[nb] != cav_stamp_) {
          const Tri& ntr = tris_[nb];
          open = geom::incircle(P(ntr.v[0]), P(ntr.v[1]), P(ntr.v[2]), p) > 0;
          if (open) {
            cav_mark_[nb] = cav_stamp_;
            cavity.push_back(nb);
          }
        }
        if (nb >= 0 && cav_mark_[nb] == cav_stamp_) continue;
        boundary.push_back({a, b, nb});
      }
    }

    if (reject_encroaching) {
      for (const auto& [a, b, nb] : boundary) {
        (void)nb;
        if (constrained(a, b) && encroached(a, b, p)) {
          blocked_u_ = a;
          blocked_v_ = b;
          --inserted_;
          return -1;  // nothing was mutated yet
        }
      }
    }

    bool plain_inside = tris_[t0].inside;
    for (int t : cavity) tris_[t].alive = false;

    int pv = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vert_tri_.push_back(-1);

    // fan: one new triangle per boundary edge, stitched by shared vertices
    std::unordered_map<int, int> by_first, by_second;
    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for (const auto& [a, b, outside] : boundary) {
      Tri nt;
      nt.v[0] = a; nt.v[1] = b; nt.v[2] = pv;
      nt.n[2] = outside;
      nt.n[0] = nt.n[1] = -1;
      bool inside;
      if (split_a >= 0) {
        double sa = geom::orient2d(P(split_a), P(split_b), P(a));
        double sb = geom::orient2d(P(split_a), P(split_b), P(b));
        double side = sa != 0 ? sa : sb;
        inside = side > 0 ? left_inside : right_inside;
      } else {
        inside = plain_inside;
      }
      nt.inside = inside;
      int ti = static_cast<int>(tris_.size());
      tris_.push_back(nt);
      cav_mark_.push_back(0);
      by_first[a] = ti;
      by_second[b] = ti;
      fresh.push_back(ti);
      if (outside >= 0) {
        int slot = neighbor_slot(outside, cavity.size() == 1 ? cavity[0] : -2);
        // the outside triangle pointed at some cavity triangle; find it by edge
        if (slot < 0) {
          for (int s = 0; s < 3; ++s) {
            int oa = tris_[outside].v[(s + 1) % 3], ob = tris_[outside].v[(s + 2) % 3];
            if ((oa == a && ob == b) || (oa == b && ob == a)) { slot = s; break; }
          }
        }
        if (slot < 0) throw NonconvergentRefinement("broken adjacency during insertion");
        tris_[outside].n[slot] = ti;
      }
      vert_tri_[a] = ti;
      vert_tri_[b] = ti;
    }
    for (int ti : fresh) {
      Tri& nt = tris_[ti];
      nt.n[0] = by_first.at(nt.v[1]);   // across (v1, pv)
      nt.n[1] = by_second.at(nt.v[0]);  // across (pv, v0)
    }
    vert_tri_[pv] = fresh.empty() ? -1 : fresh.front();
    hint_ = vert_tri_[pv];
    for (int ti : fresh) pending_.push_back(ti);
    return pv;
  }

  std::deque<int> pending_;  // triangles awaiting a refinement look

  // -- input insertion and segment recovery -------------------------------

  void insert_polyline_vertices() {
    std::map<std::pair<double, double>, int> seen;
    polyline_verts_.resize(spec_.polylines.size());
    for (size_t pi = 0; pi < spec_.polylines.size(); ++pi) {
      for (const Point& p : spec_.polylines[pi].points) {
        auto key = std::make_pair(p.x, p.y);
        auto it = seen.find(key);
        int v;
        if (it != seen.end()) {
          v = it->second;
        } else {
          v = insert_point(p);
          seen[key] = v;
        }
        polyline_verts_[pi].push_back(v);
      }
    }
    pending_.clear();  // refinement queue is rebuilt after region labeling
  }

  bool edge_exists(int a, int b) const {
    int t = vert_tri_[a];
    if (t < 0 || !tris_[t].alive) t = find_incident(a);
    // walk the star of a
    int start = t;
    int guard = 1 << 20;
    do {
      if (guard-- <= 0) break;
      const Tri& tr = tris_[t];
      int ia = index_of(tr, a);
      if (ia < 0) break;
      if (tr.v[(ia + 1) % 3] == b || tr.v[(ia + 2) % 3] == b) return true;
      t = tr.n[(ia + 1) % 3];  // rotate around a
      if (t < 0) return star_scan(a, b);
    } while (t != start);
    return t == start ? false : star_scan(a, b);
  }

  int find_incident(int a) const {
    for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t)
      if (tris_[t].alive && index_of(tris_[t], a) >= 0) return t;
    throw NonconvergentRefinement("vertex lost from triangulation");
  }

  bool star_scan(int a, int b) const {
    for (const Tri& tr : tris_) {
      if (!tr.alive) continue;
      int ia = index_of(tr, a);
      if (ia < 0) continue;
      if (tr.v[(ia + 1) % 3] == b || tr.v[(ia + 2) % 3] == b) return true;
    }
    return false;
  }

  void recover_all_segments() {
    for (size_t pi = 0; pi < spec_.polylines.size(); ++pi) {
      const auto& verts = polyline_verts_[pi];
      for (size_t i = 0; i + 1 < verts.size(); ++i)
        if (verts[i] != verts[i + 1])
          recover_segment(verts[i], verts[i + 1],
                          {spec_.polylines[pi].arc_id, spec_.polylines[pi].internal});
    }
  }

  void recover_segment(int a, int b, EdgeTag tag, int depth = 0) {
    if (depth > 64) throw BooleanOpFailure("segment recovery recursion overflow");
    // a vertex sitting on the open segment splits the recovery
    int mid = vertex_on_segment(a, b);
    if (mid >= 0) {
      recover_segment(a, mid, tag, depth + 1);
      recover_segment(mid, b, tag, depth + 1);
      return;
    }
    int guard = 1 << 16;
    while (!edge_exists(a, b)) {
      if (guard-- <= 0) throw NonconvergentRefinement("segment recovery stalled");
      flip_one_crossing(a, b);
    }
    constraints_[edge_key(a, b)] = tag;
  }

  int vertex_on_segment(int a, int b) const {
    const Point& pa = P(a);
    const Point& pb = P(b);
    double len = geom::dist(pa, pb);
    for (int v = 3; v < static_cast<int>(pts_.size()); ++v) {
      if (v == a || v == b) continue;
      const Point& p = P(v);
      double t = ((p.x - pa.x) * (pb.x - pa.x) + (p.y - pa.y) * (pb.y - pa.y)) / (len * len);
      if (t <= 1e-12 || t >= 1 - 1e-12) continue;
      double dx = pa.x + t * (pb.x - pa.x) - p.x;
      double dy = pa.y + t * (pb.y - pa.y) - p.y;
      if (std::hypot(dx, dy) < snap_) return v;
    }
    return -1;
  }

  // Find one edge crossing segment (a,b) and flip it if the surrounding quad
  // is convex; otherwise try the next crossing along the segment.
  void flip_one_crossing(int a, int b) {
    const Point& pa = P(a);
    const Point& pb = P(b);
    // walk triangles cut by the segment starting from a's star
    int t = -1, ecross_u = -1, ecross_v = -1;
    int ta = find_incident(a);
    // scan a's star for the triangle whose opposite edge crosses (a,b)
    std::vector<int> star;
    collect_star(a, ta, star);
    for (int s : star) {
      const Tri& tr = tris_[s];
      int ia = index_of(tr, a);
      int u = tr.v[(ia + 1) % 3], v = tr.v[(ia + 2) % 3];
      if (segments_cross(pa, pb, P(u), P(v))) { t = s; ecross_u = u; ecross_v = v; break; }
    }
    if (t < 0) throw NonconvergentRefinement("lost track of a constrained segment");

    // advance along the segment until a flippable crossing is found
    int guard = 1 << 16;
    while (guard-- > 0) {
      if (constrained(ecross_u, ecross_v))
        throw BooleanOpFailure("constrained segments cross");
      const Tri& tr = tris_[t];
      int slot = -1;
      for (int i = 0; i < 3; ++i) {
        int u = tr.v[(i + 1) % 3], v = tr.v[(i + 2) % 3];
        if ((u == ecross_u && v == ecross_v) || (u == ecross_v && v == ecross_u)) { slot = i; break; }
      }
      int t2 = tr.n[slot];
      if (t2 < 0) throw NonconvergentRefinement("segment exits the triangulation");
      int apex2 = opposite_vertex(t2, ecross_u, ecross_v);
      // flippable when the union quad is strictly convex
      int apex1 = tr.v[slot];
      if (geom::orient2d(P(ecross_u), P(apex1), P(apex2)) *
              geom::orient2d(P(ecross_v), P(apex1), P(apex2)) < 0) {
        flip(t, slot);
        return;
      }
      // move to the next edge cut by (a,b) inside t2
      const Tri& tr2 = tris_[t2];
      int next_u = -1, next_v = -1;
      for (int i = 0; i < 3; ++i) {
        int u = tr2.v[(i + 1) % 3], v = tr2.v[(i + 2) % 3];
        if ((u == ecross_u && v == ecross_v) || (u == ecross_v && v == ecross_u)) continue;
        if (segments_cross(pa, pb, P(u), P(v))) { next_u = u; next_v = v; break; }
      }
      if (next_u < 0) throw NonconvergentRefinement("crossing chain broke during recovery");
      t = t2;
      ecross_u = next_u;
      ecross_v = next_v;
    }
    throw NonconvergentRefinement("edge flipping stalled");
  }

  static bool strictly_between_sign(double s1, double s2) { return (s1 > 0 && s2 < 0) || (s1 < 0 && s2 > 0); }

  static bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
    double d1 = geom::orient2d(a, b, c);
    double d2 = geom::orient2d(a, b, d);
    double d3 = geom::orient2d(c, d, a);
    double d4 = geom::orient2d(c, d, b);
    return strictly_between_sign(d1, d2) && strictly_between_sign(d3, d4);
  }

  int opposite_vertex(int t, int u, int v) const {
    for (int i = 0; i < 3; ++i)
      if (tris_[t].v[i] != u && tris_[t].v[i] != v) return tris_[t].v[i];
    return -1;
  }

  void collect_star(int a, int seed, std::vector<int>& out) const {
    // seed may not contain a after flips; fall back to a scan
    if (index_of(tris_[seed], a) < 0) seed = find_incident(a);
    out.clear();
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive && index_of(tris_[t], a) >= 0) out.push_back(t);
  }

  // flip edge opposite slot `i` of triangle t with its neighbor
  void flip(int t1, int i1) {
    int t2 = tris_[t1].n[i1];
    int a = tris_[t1].v[i1];                 // apex 1
    int u = tris_[t1].v[(i1 + 1) % 3];
    int v = tris_[t1].v[(i1 + 2) % 3];
    int i2 = -1;
    for (int i = 0; i < 3; ++i)
      if (tris_[t2].v[i] != u && tris_[t2].v[i] != v) { i2 = i; break; }
    int b = tris_[t2].v[i2];                 // apex 2

    int n_t1_u = tris_[t1].n[(i1 + 2) % 3];  // neighbor of t1 across (a,u)
    int n_t1_v = tris_[t1].n[(i1 + 1) % 3];  // across (v,a)
    int j_u = -1, j_v = -1;                  // slots of (b,u)/(v,b) in t2
    for (int i = 0; i < 3; ++i) {
      int eu = tris_[t2].v[(i + 1) % 3], ev = tris_[t2].v[(i + 2) % 3];
      if ((eu == u && ev == b) || (eu == b && ev == u)) j_u = i;
      if ((eu == v && ev == b) || (eu == b && ev == v)) j_v = i;
    }
    int n_t2_u = tris_[t2].n[j_v];  // across (v,b) -> wait: slot names below
    int n_t2_b_u = tris_[t2].n[j_v];
    int n_t2_b_v = tris_[t2].n[j_u];
    (void)n_t2_u;

    // rebuild: t1 = (a, u, b), t2 = (a, b, v); both ccw when quad convex
    tris_[t1].v[0] = a; tris_[t1].v[1] = u; tris_[t1].v[2] = b;
    tris_[t2].v[0] = a; tris_[t2].v[1] = b; tris_[t2].v[2] = v;
    // t1 edges: (u,b) opp a -> neighbor across (u,b) in old t2 = n_t2_b_v? (u,b) slot j_? ...
    // old t2 had edges (u,b) and (b,v) (plus (u,v)); across (u,b) is tris_[t2].n at the slot
    // whose opposite vertex is v -> that is j_u? slot j_u is opposite vertex at j_u...
    // j_u was found as the slot whose EDGE is (u,b); its neighbor is n[j_u].
    tris_[t1].n[0] = n_t2_b_v;  // across (u,b)
    tris_[t1].n[1] = t2;        // across (b,a)
    tris_[t1].n[2] = n_t1_u;    // across (a,u)
    tris_[t2].n[0] = n_t2_b_u;  // across (b,v)
    tris_[t2].n[1] = n_t1_v;    // across (v,a)
    tris_[t2].n[2] = t1;        // across (a,b)

    auto fix = [&](int nb, int oldt, int newt) {
      if (nb < 0) return;
      for (int i = 0; i < 3; ++i)
        if (tris_[nb].n[i] == oldt) { tris_[nb].n[i] = newt; return; }
    };
    fix(n_t2_b_v, t2, t1);
    fix(n_t1_v, t1, t2);
    vert_tri_[a] = t1; vert_tri_[u] = t1; vert_tri_[b] = t1; vert_tri_[v] = t2;
  }

  // -- region labeling -----------------------------------------------------

  void classify_regions() {
    std::vector<int> region(tris_.size(), -1);
    int nregions = 0;
    std::vector<int> stack;
    for (int t0 = 0; t0 < static_cast<int>(tris_.size()); ++t0) {
      if (!tris_[t0].alive || region[t0] >= 0) continue;
      int r = nregions++;
      stack.push_back(t0);
      region[t0] = r;
      bool touches_super = false;
      std::vector<int> members;
      while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        members.push_back(t);
        const Tri& tr = tris_[t];
        for (int i = 0; i < 3; ++i)
          if (tr.v[i] < 3) touches_super = true;
        for (int i = 0; i < 3; ++i) {
          int nb = tr.n[i];
          if (nb < 0 || region[nb] >= 0) continue;
          if (constrained(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
          region[nb] = r;
          stack.push_back(nb);
        }
      }
      bool inside = false;
      if (!touches_super) {
        // probe with the largest member triangle: robust against slivers
        int best = members.front();
        double best_area = -1;
        for (int t : members) {
          const Tri& tr = tris_[t];
          double a2 = std::abs(geom::orient2d(P(tr.v[0]), P(tr.v[1]), P(tr.v[2])));
          if (a2 > best_area) { best_area = a2; best = t; }
        }
        const Tri& tr = tris_[best];
        Point c{(P(tr.v[0]).x + P(tr.v[1]).x + P(tr.v[2]).x) / 3.0,
                (P(tr.v[0]).y + P(tr.v[1]).y + P(tr.v[2]).y) / 3.0};
        inside = geom::contains(spec_.outline, c);
      }
      for (int t : members) tris_[t].inside = inside;
    }
  }

  // -- refinement ----------------------------------------------------------

  struct Geo {
    Point cc;
    double r2;        // squared circumradius
    double short2;    // squared shortest edge
  };

  Geo tri_geo(int t) const {
    const Tri& tr = tris_[t];
    const Point& a = P(tr.v[0]);
    const Point& b = P(tr.v[1]);
    const Point& c = P(tr.v[2]);
    double abx = b.x - a.x, aby = b.y - a.y;
    double acx = c.x - a.x, acy = c.y - a.y;
    double d = 2.0 * (abx * acy - aby * acx);
    double ab2 = abx * abx + aby * aby;
    double ac2 = acx * acx + acy * acy;
    Geo g;
    if (d == 0) {
      g.cc = a;
      g.r2 = kInf;
    } else {
      double ux = (acy * ab2 - aby * ac2) / d;
      double uy = (abx * ac2 - acx * ab2) / d;
      g.cc = {a.x + ux, a.y + uy};
      g.r2 = ux * ux + uy * uy;
    }
    double bc2 = (c.x - b.x) * (c.x - b.x) + (c.y - b.y) * (c.y - b.y);
    g.short2 = std::min({ab2, ac2, bc2});
    return g;
  }

  bool encroached(int u, int v, const Point& p) const {
    // p strictly inside the diametral circle of (u,v)
    return (P(u).x - p.x) * (P(v).x - p.x) + (P(u).y - p.y) * (P(v).y - p.y) < 0;
  }

  // split constrained edge (u,v) at its midpoint
  void split_segment(int u, int v) {
    auto it = constraints_.find(edge_key(u, v));
    if (it == constraints_.end()) return;
    double len = geom::dist(P(u), P(v));
    if (len < 2.0 * len_floor_) return;
    EdgeTag tag = it->second;
    // inside flags either side of the edge before it disappears
    bool left_in = false, right_in = false;
    bool found = false;
    for (int t = 0; t < static_cast<int>(tris_.size()) && !found; ++t) {
      if (!tris_[t].alive) continue;
      const Tri& tr = tris_[t];
      for (int i = 0; i < 3; ++i) {
        int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        if (a == u && b == v) {
          left_in = tr.inside;
          if (tr.n[i] >= 0) right_in = tris_[tr.n[i]].inside;
          found = true;
          break;
        }
        if (a == v && b == u) {
          right_in = tr.inside;
          if (tr.n[i] >= 0) left_in = tris_[tr.n[i]].inside;
          found = true;
          break;
        }
      }
    }
    if (!found) throw NonconvergentRefinement("constrained edge missing before split");
    constraints_.erase(it);
    Point m{0.5 * (P(u).x + P(v).x), 0.5 * (P(u).y + P(v).y)};
    int w = insert_point(m, u, v, left_in, right_in);
    if (w != u && w != v) {
      constraints_[edge_key(u, w)] = tag;
      constraints_[edge_key(w, v)] = tag;
    } else {
      constraints_[edge_key(u, v)] = tag;  // midpoint snapped: give up on this one
    }
  }

  void refine() {
    pending_.clear();
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
      if (tris_[t].alive) pending_.push_back(t);

    double B2 = 1.0 / (4.0 * std::pow(std::sin(opt_.min_angle_deg * 3.14159265358979323846 / 180.0), 2));
    int guard = opt_.max_insertions * 8;
    while (!pending_.empty()) {
      if (guard-- <= 0) throw NonconvergentRefinement("refinement queue did not drain");
      int t = pending_.front();
      pending_.pop_front();
      if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive || !tris_[t].inside) continue;
      const Tri tr = tris_[t];

      // encroached constrained edges first
      bool did = false;
      for (int i = 0; i < 3 && !did; ++i) {
        int u = tr.v[(i + 1) % 3], v = tr.v[(i + 2) % 3];
        if (!constrained(u, v)) continue;
        if (geom::dist(P(u), P(v)) < 2.0 * len_floor_) continue;
        bool enc = encroached(u, v, P(tr.v[i]));
        if (!enc && tr.n[i] >= 0) {
          int apex = opposite_vertex(tr.n[i], u, v);
          if (apex >= 0) enc = encroached(u, v, P(apex));
        }
        if (enc) {
          split_segment(u, v);
          did = true;
        }
      }
      if (did) continue;

      Geo g = tri_geo(t);
      Point centroid{(P(tr.v[0]).x + P(tr.v[1]).x + P(tr.v[2]).x) / 3.0,
                     (P(tr.v[0]).y + P(tr.v[1]).y + P(tr.v[2]).y) / 3.0};
      double h = size_(centroid);
      bool bad_quality = g.r2 > B2 * g.short2;
      bool bad_size = g.r2 > 0.3333 * h * h;  // circumradius above that of an
                                              // equilateral triangle with edge h
      if (!bad_quality && !bad_size) continue;
      if (g.short2 < 4.0 * len_floor_ * len_floor_) continue;  // give up near the floor

      insert_circumcenter(t, g);
    }
  }

  void insert_circumcenter(int t, const Geo& g) {
    // march from the triangle toward the circumcenter; a constrained edge in
    // the way is encroached and gets split instead
    const Tri& tr = tris_[t];
    Point start{(P(tr.v[0]).x + P(tr.v[1]).x + P(tr.v[2]).x) / 3.0,
                (P(tr.v[0]).y + P(tr.v[1]).y + P(tr.v[2]).y) / 3.0};
    int cur = t;
    int guard = 1 << 14;
    while (guard-- > 0) {
      const Tri& c = tris_[cur];
      int exit = -1;
      for (int i = 0; i < 3; ++i) {
        const Point& a = P(c.v[(i + 1) % 3]);
        const Point& b = P(c.v[(i + 2) % 3]);
        if (geom::orient2d(a, b, g.cc) < 0 && segments_cross(start, g.cc, a, b)) {
          exit = i;
          break;
        }
      }
      if (exit < 0) break;  // cc is in cur
      int u = c.v[(exit + 1) % 3], v = c.v[(exit + 2) % 3];
      if (constrained(u, v)) {
        split_segment(u, v);
        pending_.push_back(t);  // revisit the bad triangle afterwards
        return;
      }
      if (c.n[exit] < 0) return;  // cc escaped the hull: drop it
      cur = c.n[exit];
    }
    if (!tris_[cur].inside) return;  // crossed into an excluded region: drop

    // a circumcenter inside the diametral circle of a constrained edge is
    // never inserted; the encroached segment is split instead
    hint_ = cur;
    int w = insert_point(g.cc, -1, -1, false, false, /*reject_encroaching=*/true);
    if (w < 0) {
      split_segment(blocked_u_, blocked_v_);
      pending_.push_back(t);
    }
  }
};

}  // namespace detail

inline Mesh triangulate(const geom::MeshSpec& spec, const MeshOptions& opt = {}) {
  detail::Triangulator tr(spec, opt);
  Mesh m = tr.take();
  if (m.tris.empty()) throw NonconvergentRefinement("triangulation produced no interior cells");
  return m;
}

}  // namespace defeature::mesh
