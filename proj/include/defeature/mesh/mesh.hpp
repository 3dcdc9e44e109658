#pragma once

// Triangle mesh with tagged edge chains. Tags refer back to boundary arc ids
// of the geometry model; internal constrained curves (hole boundaries of the
// defeatured solve) carry tags too so the estimator can find them.

#include <array>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "defeature/common.hpp"
#include "defeature/geometry/polygon.hpp"

namespace defeature::mesh {

using geom::Point;

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct TaggedEdge {
  int a = -1, b = -1;  // vertex indices, a < b
  int arc_id = -1;
  bool internal = false;
};

struct Mesh {
  std::vector<Point> points;
  std::vector<std::array<int, 3>> tris;  // ccw
  std::vector<TaggedEdge> tagged_edges;

  double tri_area(int t) const {
    const auto& tr = tris[static_cast<size_t>(t)];
    const Point& a = points[static_cast<size_t>(tr[0])];
    const Point& b = points[static_cast<size_t>(tr[1])];
    const Point& c = points[static_cast<size_t>(tr[2])];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  }

  double total_area() const {
    double s = 0;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) s += tri_area(t);
    return s;
  }

  std::vector<TaggedEdge> edges_on(int arc_id) const {
    std::vector<TaggedEdge> out;
    for (const TaggedEdge& e : tagged_edges)
      if (e.arc_id == arc_id) out.push_back(e);
    return out;
  }

  // adjacency: for each undirected edge, the triangles containing it (1 or 2)
  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris() const {
    std::unordered_map<std::uint64_t, std::array<int, 2>> m;
    m.reserve(tris.size() * 2);
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const auto& tr = tris[static_cast<size_t>(t)];
      for (int i = 0; i < 3; ++i) {
        auto [it, fresh] = m.try_emplace(edge_key(tr[i], tr[(i + 1) % 3]),
                                         std::array<int, 2>{t, -1});
        if (!fresh) it->second[1] = t;
      }
    }
    return m;
  }

  double min_angle_deg() const {
    double worst = 180.0;
    for (const auto& tr : tris) {
      for (int i = 0; i < 3; ++i) {
        const Point& a = points[static_cast<size_t>(tr[i])];
        const Point& b = points[static_cast<size_t>(tr[(i + 1) % 3])];
        const Point& c = points[static_cast<size_t>(tr[(i + 2) % 3])];
        double ux = b.x - a.x, uy = b.y - a.y;
        double vx = c.x - a.x, vy = c.y - a.y;
        double ang = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
        worst = std::min(worst, ang * 180.0 / 3.14159265358979323846);
      }
    }
    return worst;
  }
};

struct MeshOptions {
  double h_max = 0.05;
  double min_angle_deg = 20.0;  // below the ~20.7 deg termination threshold
                                // of circumcenter refinement
  double grading = 0.5;              // size growth per unit distance from a source
  double near_fraction = 1.0 / 8.0;  // target size near an arc, as a fraction of its length
  double h_near = 0.0;               // absolute target size near feature arcs;
                                     // overrides near_fraction when positive
  int max_insertions = 400000;
};

// Spatially graded target edge length: h_max far away, finer near arcs.
struct SizeField {
  struct Source {
    Point a, b;
    double h;
  };
  double h_max = kInf;
  double grading = 0.5;
  std::vector<Source> sources;

  double operator()(const Point& p) const {
    double h = h_max;
    for (const Source& s : sources) {
      double vx = s.b.x - s.a.x, vy = s.b.y - s.a.y;
      double vv = vx * vx + vy * vy;
      double t = vv > 0 ? std::clamp(((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / vv, 0.0, 1.0)
                        : 0.0;
      double d = std::hypot(p.x - s.a.x - t * vx, p.y - s.a.y - t * vy);
      h = std::min(h, s.h + grading * d);
      if (h <= 0) return h;
    }
    return h;
  }
};

}  // namespace defeature::mesh
