#pragma once

// Scalar Lagrange spaces on a triangle mesh: P1 (vertices) and P2 (vertices +
// edge midpoints). Vector problems reuse a scalar space per component with
// block dof layout comp * n_dofs + scalar_dof.

#include <array>
#include <unordered_map>
#include <vector>

#include "defeature/mesh/mesh.hpp"

namespace defeature::fem {

using geom::Point;
using mesh::Mesh;

struct FeSpace {
  int order = 2;
  int n_vertex_dofs = 0;
  int n_edge_dofs = 0;
  std::vector<std::array<int, 6>> cells;  // per-cell dofs; P1 uses the first 3
  std::vector<Point> dof_points;
  std::unordered_map<std::uint64_t, int> edge_dofs;  // vertex pair -> edge dof id

  int n_dofs() const { return n_vertex_dofs + n_edge_dofs; }
  int dofs_per_cell() const { return order == 1 ? 3 : 6; }

  int edge_dof(int a, int b) const {
    auto it = edge_dofs.find(mesh::edge_key(a, b));
    if (it == edge_dofs.end()) throw UnknownLabel("edge has no midpoint dof");
    return it->second;
  }

  static FeSpace build(const Mesh& m, int order) {
    if (order != 1 && order != 2) throw UnsupportedOrder("element order " + std::to_string(order));
    FeSpace s;
    s.order = order;
    s.n_vertex_dofs = static_cast<int>(m.points.size());
    s.dof_points = m.points;
    s.cells.resize(m.tris.size());
    for (size_t t = 0; t < m.tris.size(); ++t) {
      const auto& tr = m.tris[t];
      s.cells[t] = {tr[0], tr[1], tr[2], -1, -1, -1};
      if (order == 2) {
        for (int e = 0; e < 3; ++e) {
          int a = tr[e], b = tr[(e + 1) % 3];
          auto [it, fresh] =
              s.edge_dofs.try_emplace(mesh::edge_key(a, b), s.n_vertex_dofs + s.n_edge_dofs);
          if (fresh) {
            ++s.n_edge_dofs;
            s.dof_points.push_back({0.5 * (m.points[a].x + m.points[b].x),
                                    0.5 * (m.points[a].y + m.points[b].y)});
          }
          s.cells[t][3 + e] = it->second;
        }
      }
    }
    return s;
  }
};

// Shape values at reference coordinates (r, s); l0 = 1 - r - s.
// Local ordering: vertices 0,1,2 then midpoints of edges (0,1), (1,2), (2,0).
inline void shape_values(int order, double r, double s, double* N) {
  double l0 = 1.0 - r - s, l1 = r, l2 = s;
  if (order == 1) {
    N[0] = l0; N[1] = l1; N[2] = l2;
    return;
  }
  N[0] = l0 * (2 * l0 - 1);
  N[1] = l1 * (2 * l1 - 1);
  N[2] = l2 * (2 * l2 - 1);
  N[3] = 4 * l0 * l1;
  N[4] = 4 * l1 * l2;
  N[5] = 4 * l2 * l0;
}

// Reference gradients d/dr, d/ds of the shapes.
inline void shape_grads(int order, double r, double s, double (*dN)[2]) {
  double l0 = 1.0 - r - s, l1 = r, l2 = s;
  if (order == 1) {
    dN[0][0] = -1; dN[0][1] = -1;
    dN[1][0] = 1;  dN[1][1] = 0;
    dN[2][0] = 0;  dN[2][1] = 1;
    return;
  }
  dN[0][0] = 1 - 4 * l0; dN[0][1] = 1 - 4 * l0;
  dN[1][0] = 4 * l1 - 1; dN[1][1] = 0;
  dN[2][0] = 0;          dN[2][1] = 4 * l2 - 1;
  dN[3][0] = 4 * (l0 - l1); dN[3][1] = -4 * l1;
  dN[4][0] = 4 * l2;        dN[4][1] = 4 * l1;
  dN[5][0] = -4 * l2;       dN[5][1] = 4 * (l0 - l2);
}

// 1D quadratic shapes along an edge (t in [0,1]); order: endpoint a,
// endpoint b, midpoint.
inline void edge_shape_values(int order, double t, double* N) {
  if (order == 1) {
    N[0] = 1 - t; N[1] = t; N[2] = 0;
    return;
  }
  N[0] = (1 - t) * (1 - 2 * t);
  N[1] = t * (2 * t - 1);
  N[2] = 4 * t * (1 - t);
}

// Affine map data of a cell.
struct CellMap {
  Point a;             // first vertex
  double J[2][2];      // [dx/dr dx/ds; dy/dr dy/ds]
  double Jinv[2][2];   // inverse
  double detJ;

  static CellMap build(const Mesh& m, int t) {
    const auto& tr = m.tris[static_cast<size_t>(t)];
    const Point& p0 = m.points[static_cast<size_t>(tr[0])];
    const Point& p1 = m.points[static_cast<size_t>(tr[1])];
    const Point& p2 = m.points[static_cast<size_t>(tr[2])];
    CellMap c;
    c.a = p0;
    c.J[0][0] = p1.x - p0.x; c.J[0][1] = p2.x - p0.x;
    c.J[1][0] = p1.y - p0.y; c.J[1][1] = p2.y - p0.y;
    c.detJ = c.J[0][0] * c.J[1][1] - c.J[0][1] * c.J[1][0];
    if (c.detJ == 0) throw SingularSystem("degenerate cell in the mesh");
    double inv = 1.0 / c.detJ;
    c.Jinv[0][0] = c.J[1][1] * inv;  c.Jinv[0][1] = -c.J[0][1] * inv;
    c.Jinv[1][0] = -c.J[1][0] * inv; c.Jinv[1][1] = c.J[0][0] * inv;
    return c;
  }

  Point to_physical(double r, double s) const {
    return {a.x + J[0][0] * r + J[0][1] * s, a.y + J[1][0] * r + J[1][1] * s};
  }

  void to_reference(const Point& p, double& r, double& s) const {
    double dx = p.x - a.x, dy = p.y - a.y;
    r = Jinv[0][0] * dx + Jinv[0][1] * dy;
    s = Jinv[1][0] * dx + Jinv[1][1] * dy;
  }

  // physical gradient of a shape with reference gradient (gr, gs)
  void grad_physical(double gr, double gs, double& gx, double& gy) const {
    gx = Jinv[0][0] * gr + Jinv[1][0] * gs;
    gy = Jinv[0][1] * gr + Jinv[1][1] * gs;
  }
};

}  // namespace defeature::fem
