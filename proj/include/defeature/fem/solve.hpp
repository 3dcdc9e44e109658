#pragma once

// Assembly and direct solution of the three supported problems on a tagged
// mesh. P2 primary field, P1 pressure (Taylor-Hood) for Stokes. Dirichlet
// conditions are imposed by nodal interpolation and row/column elimination; a
// pure-Dirichlet Stokes solve gets a scalar multiplier pinning the pressure
// mean to zero.

#include <functional>
#include <map>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "defeature/fem/solution.hpp"
#include "defeature/mesh/quadrature.hpp"

namespace defeature::fem {

using ScalarFun = std::function<double(Point)>;

enum class BCType { Dirichlet, Neumann };

struct BC {
  BCType type = BCType::Neumann;
  std::array<ScalarFun, 2> f;  // one entry per component
};

using BCMap = std::map<int, BC>;  // boundary arc id -> condition

struct VolumeData {
  std::array<ScalarFun, 2> f;  // body load; [0] only for scalar problems
  ScalarFun f_c;               // divergence source (Stokes); null means zero
};

inline Solution solve(Mesh mesh, const Coefs& coefs, const VolumeData& data,
                      const BCMap& bcs) {
  Solution sol;
  sol.mesh = std::move(mesh);
  sol.coefs = coefs;
  sol.ncomp = n_components(coefs.type);
  sol.space = FeSpace::build(sol.mesh, 2);
  bool stokes = coefs.type == ProblemType::Stokes;
  if (stokes) sol.pspace = FeSpace::build(sol.mesh, 1);

  const Mesh& m = sol.mesh;
  const FeSpace& V = sol.space;
  int nu = sol.ncomp * V.n_dofs();
  int np = stokes ? sol.pspace.n_dofs() : 0;

  // boundary conditions per edge
  bool any_neumann = false;
  std::vector<char> dirichlet(static_cast<size_t>(nu), 0);
  Eigen::VectorXd uD = Eigen::VectorXd::Zero(nu);
  struct NeumannEdge {
    int a, b, mid;
    const BC* bc;
  };
  std::vector<NeumannEdge> neumann;
  for (const mesh::TaggedEdge& e : m.tagged_edges) {
    if (e.internal) continue;
    auto it = bcs.find(e.arc_id);
    if (it == bcs.end())
      throw MissingSide("no boundary condition for arc " + std::to_string(e.arc_id));
    const BC& bc = it->second;
    int mid = V.edge_dof(e.a, e.b);
    if (bc.type == BCType::Neumann) {
      any_neumann = true;
      neumann.push_back({e.a, e.b, mid, &bc});
      continue;
    }
    for (int c = 0; c < sol.ncomp; ++c) {
      for (int sd : {e.a, e.b, mid}) {
        int d = sol.dof(c, sd);
        dirichlet[static_cast<size_t>(d)] = 1;
        uD[d] = bc.f[static_cast<size_t>(c)](V.dof_points[static_cast<size_t>(sd)]);
      }
    }
  }

  bool need_mean = stokes && !any_neumann;
  int n = nu + np + (need_mean ? 1 : 0);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(m.tris.size()) * 80);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  auto rule = quad::triangle_rule(5);
  int ndc = V.dofs_per_cell();

  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
    CellMap cm = CellMap::build(m, t);
    const auto& cd = V.cells[static_cast<size_t>(t)];
    double ke[12][12] = {};
    double fe[12] = {};
    double be[3][12] = {};  // pressure coupling (Stokes)
    double ce[3] = {};      // pressure rhs / mean row

    for (const auto& qp : rule) {
      double w = qp.w * std::abs(cm.detJ);
      Point x = cm.to_physical(qp.r, qp.s);
      double dN[6][2];
      shape_grads(2, qp.r, qp.s, dN);
      double gx[6], gy[6];
      for (int i = 0; i < ndc; ++i) cm.grad_physical(dN[i][0], dN[i][1], gx[i], gy[i]);
      double N[6];
      shape_values(2, qp.r, qp.s, N);

      if (coefs.type == ProblemType::Poisson) {
        for (int i = 0; i < ndc; ++i) {
          for (int j = 0; j < ndc; ++j) ke[i][j] += w * (gx[i] * gx[j] + gy[i] * gy[j]);
          fe[i] += w * N[i] * data.f[0](x);
        }
      } else {
        double mu = coefs.mu;
        double lam = coefs.type == ProblemType::Elasticity ? coefs.lambda : 0.0;
        // block (c_i, c_j): integral 2 mu eps(phi_i e_ci) : eps(phi_j e_cj)
        //                   + lam div div
        for (int i = 0; i < ndc; ++i) {
          double gi[2] = {gx[i], gy[i]};
          for (int j = 0; j < ndc; ++j) {
            double gj[2] = {gx[j], gy[j]};
            for (int ci = 0; ci < 2; ++ci)
              for (int cj = 0; cj < 2; ++cj) {
                double eps2 = 0.5 * (gi[cj] * gj[ci]);  // cross term of eps:eps
                if (ci == cj) eps2 += 0.5 * (gi[0] * gj[0] + gi[1] * gj[1]);
                double v = 2 * mu * eps2 + lam * gi[ci] * gj[cj];
                ke[ci * ndc + i][cj * ndc + j] += w * v;
              }
          }
          for (int c = 0; c < 2; ++c) fe[c * ndc + i] += w * N[i] * data.f[static_cast<size_t>(c)](x);
        }
        if (stokes) {
          double Np[3];
          shape_values(1, qp.r, qp.s, Np);
          double fc = data.f_c ? data.f_c(x) : 0.0;
          for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < ndc; ++i) {
              be[j][0 * ndc + i] += -w * Np[j] * gx[i];
              be[j][1 * ndc + i] += -w * Np[j] * gy[i];
            }
            ce[j] += -w * Np[j] * fc;
          }
        }
      }
    }

    // scatter with Dirichlet elimination
    int nloc = sol.ncomp * ndc;
    int gdof[12];
    for (int c = 0; c < sol.ncomp; ++c)
      for (int i = 0; i < ndc; ++i) gdof[c * ndc + i] = sol.dof(c, cd[i]);
    for (int i = 0; i < nloc; ++i) {
      int gi = gdof[i];
      if (dirichlet[static_cast<size_t>(gi)]) continue;
      b[gi] += fe[i];
      for (int j = 0; j < nloc; ++j) {
        int gj = gdof[j];
        if (dirichlet[static_cast<size_t>(gj)])
          b[gi] -= ke[i][j] * uD[gj];
        else
          trips.emplace_back(gi, gj, ke[i][j]);
      }
    }
    if (stokes) {
      const auto& pd = sol.pspace.cells[static_cast<size_t>(t)];
      for (int j = 0; j < 3; ++j) {
        int gp = nu + pd[j];
        b[gp] += ce[j];
        for (int i = 0; i < nloc; ++i) {
          int gi = gdof[i];
          if (dirichlet[static_cast<size_t>(gi)]) {
            b[gp] -= be[j][i] * uD[gi];
          } else {
            trips.emplace_back(gp, gi, be[j][i]);
            trips.emplace_back(gi, gp, be[j][i]);
          }
        }
      }
      if (need_mean) {
        // mean-pressure constraint row: integral of each P1 shape
        double a3 = std::abs(CellMap::build(m, t).detJ) / 6.0;
        for (int j = 0; j < 3; ++j) {
          int gp = nu + sol.pspace.cells[static_cast<size_t>(t)][j];
          trips.emplace_back(n - 1, gp, a3);
          trips.emplace_back(gp, n - 1, a3);
        }
      }
    }
  }

  // Neumann loads
  auto erule = quad::segment_rule(5);
  for (const NeumannEdge& ne : neumann) {
    const Point& pa = V.dof_points[static_cast<size_t>(ne.a)];
    const Point& pb = V.dof_points[static_cast<size_t>(ne.b)];
    double len = geom::dist(pa, pb);
    int sd[3] = {ne.a, ne.b, ne.mid};
    for (const auto& qp : erule) {
      Point x{pa.x + qp.t * (pb.x - pa.x), pa.y + qp.t * (pb.y - pa.y)};
      double N[3];
      edge_shape_values(2, qp.t, N);
      for (int c = 0; c < sol.ncomp; ++c) {
        double g = ne.bc->f[static_cast<size_t>(c)](x);
        for (int i = 0; i < 3; ++i) {
          int d = sol.dof(c, sd[i]);
          if (!dirichlet[static_cast<size_t>(d)]) b[d] += qp.w * len * g * N[i];
        }
      }
    }
  }

  // identity rows for eliminated dofs
  for (int d = 0; d < nu; ++d)
    if (dirichlet[static_cast<size_t>(d)]) {
      trips.emplace_back(d, d, 1.0);
      b[d] = uD[d];
    }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::VectorXd x;
  if (stokes) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw SingularSystem("saddle-point factorization failed");
    x = lu.solve(b);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("stiffness factorization failed");
    x = ldlt.solve(b);
  }
  double resid = (A * x - b).norm() / std::max(1.0, b.norm());
  if (!(resid < 1e-10)) throw SolverDivergence("linear residual " + std::to_string(resid));

  sol.u = x.head(nu);
  if (stokes) sol.p = x.segment(nu, np);
  return sol;
}

}  // namespace defeature::fem
