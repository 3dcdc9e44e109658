#pragma once

// Discrete solutions and their point evaluation. A Solution owns its mesh and
// spaces; the Locator is a uniform-grid bin over cell bounding boxes so that
// fields can be sampled on foreign meshes (error integration, composition).

#include <memory>

#include <Eigen/Dense>

#include "defeature/fem/space.hpp"
#include "defeature/geometry/polygon.hpp"

namespace defeature::fem {

enum class ProblemType { Poisson, Elasticity, Stokes };

struct Coefs {
  ProblemType type = ProblemType::Poisson;
  double mu = 1.0;      // shear modulus / dynamic viscosity
  double lambda = 0.0;  // first Lame parameter (elasticity only)
};

inline int n_components(ProblemType t) { return t == ProblemType::Poisson ? 1 : 2; }

class Locator {
 public:
  Locator() = default;

  explicit Locator(const Mesh& m) : mesh_(&m) {
    geom::bounding_box({}, lo_, hi_);
    lo_ = {kInf, kInf};
    hi_ = {-kInf, -kInf};
    for (const Point& p : m.points) {
      lo_.x = std::min(lo_.x, p.x); lo_.y = std::min(lo_.y, p.y);
      hi_.x = std::max(hi_.x, p.x); hi_.y = std::max(hi_.y, p.y);
    }
    int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.tris.size()))));
    nx_ = ny_ = n;
    double wx = std::max(hi_.x - lo_.x, 1e-300);
    double wy = std::max(hi_.y - lo_.y, 1e-300);
    sx_ = nx_ / wx;
    sy_ = ny_ / wy;
    bins_.resize(static_cast<size_t>(nx_ * ny_));
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
      const auto& tr = m.tris[static_cast<size_t>(t)];
      double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
      for (int v : tr) {
        x0 = std::min(x0, m.points[v].x); x1 = std::max(x1, m.points[v].x);
        y0 = std::min(y0, m.points[v].y); y1 = std::max(y1, m.points[v].y);
      }
      for (int i = clampx(x0); i <= clampx(x1); ++i)
        for (int j = clampy(y0); j <= clampy(y1); ++j)
          bins_[static_cast<size_t>(j * nx_ + i)].push_back(t);
    }
    diam_ = std::hypot(hi_.x - lo_.x, hi_.y - lo_.y);
  }

  // Containing cell and reference coordinates; tolerance grows on retry so
  // boundary quadrature points on foreign meshes still resolve.
  int find(const Point& p, double& r, double& s) const {
    for (double tol : {1e-12, 1e-9, 1e-6}) {
      int t = try_find(p, r, s, tol * std::max(diam_, 1.0));
      if (t >= 0) return t;
    }
    return -1;
  }

  int find_or_throw(const Point& p, double& r, double& s) const {
    int t = find(p, r, s);
    if (t < 0)
      throw PointOutsideDomain("(" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                               ") is not covered by the mesh");
    return t;
  }

 private:
  int clampx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) * sx_), 0, nx_ - 1); }
  int clampy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) * sy_), 0, ny_ - 1); }

  int try_find(const Point& p, double& r, double& s, double tol) const {
    int best = -1;
    double best_def = -kInf;
    int i = clampx(p.x), j = clampy(p.y);
    for (int t : bins_[static_cast<size_t>(j * nx_ + i)]) {
      CellMap cm = CellMap::build(*mesh_, t);
      double rr, ss;
      cm.to_reference(p, rr, ss);
      double deficit = std::min({rr, ss, 1.0 - rr - ss});
      if (deficit > best_def) {
        best_def = deficit;
        best = t;
        r = rr;
        s = ss;
      }
    }
    // deficit is in reference units; scale tolerance by the cell size
    if (best >= 0 && best_def > -tol) return best;
    return -1;
  }

  const Mesh* mesh_ = nullptr;
  Point lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double sx_ = 1, sy_ = 1, diam_ = 1;
  std::vector<std::vector<int>> bins_;
};

struct Solution {
  Mesh mesh;
  FeSpace space;    // order-2 primary field
  FeSpace pspace;   // order-1 pressure (Stokes only)
  Coefs coefs;
  int ncomp = 1;
  Eigen::VectorXd u;  // ncomp blocks of space.n_dofs()
  Eigen::VectorXd p;  // pressure dofs

  // Built on demand and rebuilt if the owning Solution has moved, so the
  // cached cell bins never point at a stale mesh.
  const Locator& locator() const {
    if (!locator_ || locator_mesh_ != &mesh) {
      locator_ = std::make_shared<Locator>(mesh);
      locator_mesh_ = &mesh;
    }
    return *locator_;
  }

  int dof(int comp, int scalar_dof) const { return comp * space.n_dofs() + scalar_dof; }

  // primary field value at reference point (r,s) of cell t
  void value_at(int t, double r, double s, double* out) const {
    double N[6];
    shape_values(space.order, r, s, N);
    const auto& cd = space.cells[static_cast<size_t>(t)];
    for (int c = 0; c < ncomp; ++c) {
      double v = 0;
      for (int i = 0; i < space.dofs_per_cell(); ++i) v += N[i] * u[dof(c, cd[i])];
      out[c] = v;
    }
  }

  // gradient: out[c][0] = d(u_c)/dx, out[c][1] = d(u_c)/dy
  void grad_at(int t, double r, double s, double (*out)[2]) const {
    double dN[6][2];
    shape_grads(space.order, r, s, dN);
    CellMap cm = CellMap::build(mesh, t);
    const auto& cd = space.cells[static_cast<size_t>(t)];
    for (int c = 0; c < ncomp; ++c) {
      double gx = 0, gy = 0;
      for (int i = 0; i < space.dofs_per_cell(); ++i) {
        double px, py;
        cm.grad_physical(dN[i][0], dN[i][1], px, py);
        gx += px * u[dof(c, cd[i])];
        gy += py * u[dof(c, cd[i])];
      }
      out[c][0] = gx;
      out[c][1] = gy;
    }
  }

  double pressure_at(int t, double r, double s) const {
    if (coefs.type != ProblemType::Stokes) return 0.0;
    double N[3];
    shape_values(1, r, s, N);
    const auto& cd = pspace.cells[static_cast<size_t>(t)];
    double v = 0;
    for (int i = 0; i < 3; ++i) v += N[i] * p[cd[i]];
    return v;
  }

  // traction at reference point (r,s) of cell t against unit normal n:
  //   Poisson:     n . grad u                     (scalar)
  //   Elasticity:  (2 mu eps + lambda tr(eps) I) n
  //   Stokes:      (2 mu eps) n - p n
  void traction_at(int t, double r, double s, const Point& n, double* out) const {
    double g[2][2];
    grad_at(t, r, s, g);
    if (coefs.type == ProblemType::Poisson) {
      out[0] = g[0][0] * n.x + g[0][1] * n.y;
      return;
    }
    double exx = g[0][0], eyy = g[1][1];
    double exy = 0.5 * (g[0][1] + g[1][0]);
    double mu = coefs.mu;
    double sxx = 2 * mu * exx, syy = 2 * mu * eyy, sxy = 2 * mu * exy;
    if (coefs.type == ProblemType::Elasticity) {
      double tr = coefs.lambda * (exx + eyy);
      sxx += tr;
      syy += tr;
    } else {
      double pv = pressure_at(t, r, s);
      sxx -= pv;
      syy -= pv;
    }
    out[0] = sxx * n.x + sxy * n.y;
    out[1] = sxy * n.x + syy * n.y;
  }

  // convenience sampling by physical point
  void value(const Point& pt, double* out) const {
    double r, s;
    int t = locator().find_or_throw(pt, r, s);
    value_at(t, r, s, out);
  }

  void grad(const Point& pt, double (*out)[2]) const {
    double r, s;
    int t = locator().find_or_throw(pt, r, s);
    grad_at(t, r, s, out);
  }

  double pressure(const Point& pt) const {
    double r, s;
    int t = locator().find_or_throw(pt, r, s);
    return pressure_at(t, r, s);
  }

 private:
  mutable std::shared_ptr<Locator> locator_;
  mutable const Mesh* locator_mesh_ = nullptr;
};

}  // namespace defeature::fem
