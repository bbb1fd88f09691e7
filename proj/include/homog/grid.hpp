#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "homog/tensor.hpp"

namespace homog {

// Structured grid with lowest-order tensor-product elements (linear /
// bilinear / trilinear). Per-axis boundary: Dirichlet or periodic.
struct Grid {
  int dim = 2;
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<bool, 3> periodic{false, false, false};

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1..3");
    for (int a = 0; a < dim; ++a) {
      if (cells[a] < 1) throw std::invalid_argument("Grid: need >= 1 cell per axis");
      if (spacing[a] <= 0.0) throw std::invalid_argument("Grid: spacing must be > 0");
    }
  }

  int nodes_axis(int a) const { return periodic[a] ? cells[a] : cells[a] + 1; }

  int n_nodes() const {
    int n = 1;
    for (int a = 0; a < dim; ++a) n *= nodes_axis(a);
    return n;
  }

  int n_elems() const {
    int n = 1;
    for (int a = 0; a < dim; ++a) n *= cells[a];
    return n;
  }

  int n_corners() const { return 1 << dim; }

  double elem_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing[a];
    return v;
  }

  double volume() const { return elem_volume() * n_elems(); }

  int node_index(std::array<int, 3> c) const {
    int idx = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      int ca = c[a];
      if (periodic[a]) ca = ((ca % cells[a]) + cells[a]) % cells[a];
      idx += ca * stride;
      stride *= nodes_axis(a);
    }
    return idx;
  }

  std::array<int, 3> node_coords(int idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      c[a] = idx % nodes_axis(a);
      idx /= nodes_axis(a);
    }
    return c;
  }

  int elem_index(std::array<int, 3> c) const {
    int idx = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      idx += c[a] * stride;
      stride *= cells[a];
    }
    return idx;
  }

  std::array<int, 3> elem_coords(int idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      c[a] = idx % cells[a];
      idx /= cells[a];
    }
    return c;
  }

  // global node indices of the 2^dim corners of an element
  std::array<int, 8> elem_nodes(int e) const {
    std::array<int, 3> c = elem_coords(e);
    std::array<int, 8> out{};
    for (int corner = 0; corner < n_corners(); ++corner) {
      std::array<int, 3> nc = c;
      for (int a = 0; a < dim; ++a) nc[a] += (corner >> a) & 1;
      out[corner] = node_index(nc);
    }
    return out;
  }

  Eigen::VectorXd node_position(int idx) const {
    std::array<int, 3> c = node_coords(idx);
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) x[a] = c[a] * spacing[a];
    return x;
  }

  Eigen::VectorXd elem_center(int e) const {
    std::array<int, 3> c = elem_coords(e);
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) x[a] = (c[a] + 0.5) * spacing[a];
    return x;
  }

  bool node_constrained(int idx) const {
    std::array<int, 3> c = node_coords(idx);
    for (int a = 0; a < dim; ++a)
      if (!periodic[a] && (c[a] == 0 || c[a] == cells[a])) return true;
    return false;
  }

  static Grid dirichlet_box(int dim, int n, double length = 1.0) {
    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
      g.cells[a] = n;
      g.spacing[a] = length / n;
      g.periodic[a] = false;
    }
    return g;
  }

  static Grid periodic_box(int dim, int n, double length = 1.0) {
    Grid g = dirichlet_box(dim, n, length);
    for (int a = 0; a < dim; ++a) g.periodic[a] = true;
    return g;
  }
};

namespace fem {

// Strain-displacement matrix (Mandel rows) at reference point xi in [-1,1]^d.
inline Eigen::MatrixXd strain_matrix(const Grid& g, const Eigen::VectorXd& xi) {
  const int d = g.dim, nc = g.n_corners(), s = sym_dim(d);
  Eigen::MatrixXd dndx(nc, d);
  for (int c = 0; c < nc; ++c) {
    for (int a = 0; a < d; ++a) {
      const double sa = ((c >> a) & 1) ? 1.0 : -1.0;
      double val = sa / g.spacing[a];  // includes 2/h Jacobian and the 1/2 of the shape fn
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        const double sb = ((c >> b) & 1) ? 1.0 : -1.0;
        val *= 0.5 * (1.0 + sb * xi[b]);
      }
      dndx(c, a) = val;
    }
  }
  const double s2 = std::sqrt(2.0) / 2.0;
  Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(s, d * nc);
  for (int c = 0; c < nc; ++c) {
    for (int a = 0; a < d; ++a) bm(a, c * d + a) = dndx(c, a);
    if (d == 2) {
      bm(2, c * d + 0) = s2 * dndx(c, 1);
      bm(2, c * d + 1) = s2 * dndx(c, 0);
    }
    if (d == 3) {
      bm(3, c * d + 1) = s2 * dndx(c, 2);
      bm(3, c * d + 2) = s2 * dndx(c, 1);
      bm(4, c * d + 0) = s2 * dndx(c, 2);
      bm(4, c * d + 2) = s2 * dndx(c, 0);
      bm(5, c * d + 0) = s2 * dndx(c, 1);
      bm(5, c * d + 1) = s2 * dndx(c, 0);
    }
  }
  return bm;
}

// Full (non-symmetrized) gradient matrix rows (d*d) at reference point xi;
// row ordering is (du_i/dx_j) with i major.
inline Eigen::MatrixXd gradient_matrix(const Grid& g, const Eigen::VectorXd& xi) {
  const int d = g.dim, nc = g.n_corners();
  Eigen::MatrixXd dndx(nc, d);
  for (int c = 0; c < nc; ++c) {
    for (int a = 0; a < d; ++a) {
      const double sa = ((c >> a) & 1) ? 1.0 : -1.0;
      double val = sa / g.spacing[a];
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        const double sb = ((c >> b) & 1) ? 1.0 : -1.0;
        val *= 0.5 * (1.0 + sb * xi[b]);
      }
      dndx(c, a) = val;
    }
  }
  Eigen::MatrixXd gm = Eigen::MatrixXd::Zero(d * d, d * nc);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gm(i * d + j, c * d + i) = dndx(c, j);
  return gm;
}

inline std::vector<Eigen::VectorXd> gauss_points(int d) {
  const double gp = 1.0 / std::sqrt(3.0);
  std::vector<Eigen::VectorXd> pts;
  for (int c = 0; c < (1 << d); ++c) {
    Eigen::VectorXd xi(d);
    for (int a = 0; a < d; ++a) xi[a] = ((c >> a) & 1) ? gp : -gp;
    pts.push_back(xi);
  }
  return pts;
}

}  // namespace fem

// Gathers the element-local displacement vector.
inline Eigen::VectorXd elem_dofs(const Grid& g, const Eigen::VectorXd& u_node, int e) {
  const int d = g.dim, nc = g.n_corners();
  const auto nodes = g.elem_nodes(e);
  Eigen::VectorXd ue(d * nc);
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < d; ++a) ue[c * d + a] = u_node[nodes[c] * d + a];
  return ue;
}

// Element-center symmetric gradient, one Mandel vector per element.
inline Eigen::MatrixXd strain(const Grid& g, const Eigen::VectorXd& u_node) {
  const int s = sym_dim(g.dim);
  const Eigen::MatrixXd bc = fem::strain_matrix(g, Eigen::VectorXd::Zero(g.dim));
  Eigen::MatrixXd eps(s, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) eps.col(e) = bc * elem_dofs(g, u_node, e);
  return eps;
}

// Element-center full gradient (d*d rows per element).
inline Eigen::MatrixXd gradient(const Grid& g, const Eigen::VectorXd& u_node) {
  const int d = g.dim;
  const Eigen::MatrixXd gc = fem::gradient_matrix(g, Eigen::VectorXd::Zero(d));
  Eigen::MatrixXd grad(d * d, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) grad.col(e) = gc * elem_dofs(g, u_node, e);
  return grad;
}

// Negative adjoint of the center-strain operator under lumped nodal weights,
// so that <sigma, strain(u)>_elems = -<divergence(sigma), u>_nodes exactly.
inline Eigen::VectorXd divergence(const Grid& g, const Eigen::MatrixXd& sigma_elem) {
  const int d = g.dim;
  if (sigma_elem.cols() != g.n_elems())
    throw std::invalid_argument("divergence: field/grid mismatch");
  const Eigen::MatrixXd bc = fem::strain_matrix(g, Eigen::VectorXd::Zero(d));
  const double ve = g.elem_volume();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(g.n_nodes() * d);
  Eigen::VectorXd wnode = Eigen::VectorXd::Zero(g.n_nodes());
  for (int e = 0; e < g.n_elems(); ++e) {
    const Eigen::VectorXd fe = ve * bc.transpose() * sigma_elem.col(e);
    const auto nodes = g.elem_nodes(e);
    for (int c = 0; c < g.n_corners(); ++c) {
      for (int a = 0; a < d; ++a) acc[nodes[c] * d + a] += fe[c * d + a];
      wnode[nodes[c]] += ve / g.n_corners();
    }
  }
  Eigen::VectorXd div(g.n_nodes() * d);
  for (int i = 0; i < g.n_nodes(); ++i)
    for (int a = 0; a < d; ++a)
      div[i * d + a] = wnode[i] > 0.0 ? -acc[i * d + a] / wnode[i] : 0.0;
  return div;
}

// Lumped nodal quadrature weights.
inline Eigen::VectorXd node_weights(const Grid& g) {
  const double ve = g.elem_volume();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(g.n_nodes());
  for (int e = 0; e < g.n_elems(); ++e) {
    const auto nodes = g.elem_nodes(e);
    for (int c = 0; c < g.n_corners(); ++c) w[nodes[c]] += ve / g.n_corners();
  }
  return w;
}

// Deterministic conjugate gradients with diagonal preconditioner. project is
// applied to iterates/residuals to stay in the constrained subspace (used for
// the translation nullspace of periodic problems).
struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

inline CgResult conjugate_gradient(
    const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
    double rel_tol = 1e-12, int max_iter = -1,
    const std::function<void(Eigen::VectorXd&)>& project = {},
    const Eigen::VectorXd* x0 = nullptr) {
  const int n = static_cast<int>(A.rows());
  if (max_iter < 0) max_iter = 10 * n;
  Eigen::VectorXd diag = A.diagonal();
  for (int i = 0; i < n; ++i)
    if (std::abs(diag[i]) < 1e-300) diag[i] = 1.0;
  CgResult res;
  res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd bp = b;
  if (project) project(bp);
  Eigen::VectorXd r = bp - A * res.x;
  if (project) project(r);
  const double bnorm = std::max(bp.norm(), 1e-300);
  Eigen::VectorXd z = r.cwiseQuotient(diag);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    res.residual = r.norm() / bnorm;
    if (res.residual <= rel_tol) { res.converged = true; return res; }
    Eigen::VectorXd ap = A * p;
    if (project) project(ap);
    const double pap = p.dot(ap);
    if (pap <= 0.0)
      throw std::runtime_error("conjugate_gradient: operator not positive definite on subspace");
    const double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    if (project) project(r);
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.residual = r.norm() / bnorm;
  res.converged = res.residual <= rel_tol;
  if (!res.converged)
    throw std::runtime_error("conjugate_gradient: stagnation, relative residual " +
                             std::to_string(res.residual));
  return res;
}

// Assembled linear elasticity operator for a per-element stiffness field.
class ElasticitySystem {
 public:
  ElasticitySystem(const Grid& grid, std::vector<Eigen::MatrixXd> stiffness_per_elem)
      : grid_(grid), stiffness_(std::move(stiffness_per_elem)) {
    grid_.validate();
    if (static_cast<int>(stiffness_.size()) != grid_.n_elems())
      throw std::invalid_argument("ElasticitySystem: one stiffness per element required");
    build_dof_map();
    assemble();
  }

  const Grid& grid() const { return grid_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const std::vector<Eigen::MatrixXd>& stiffness() const { return stiffness_; }
  int n_free() const { return n_free_; }
  bool fully_periodic() const {
    for (int a = 0; a < grid_.dim; ++a)
      if (!grid_.periodic[a]) return false;
    return true;
  }

  Eigen::VectorXd restrict_free(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(n_free_);
    for (int i = 0; i < static_cast<int>(dof_map_.size()); ++i)
      if (dof_map_[i] >= 0) r[dof_map_[i]] = full[i];
    return r;
  }

  Eigen::VectorXd prolong(const Eigen::VectorXd& reduced) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(dof_map_.size());
    for (int i = 0; i < static_cast<int>(dof_map_.size()); ++i)
      if (dof_map_[i] >= 0) full[i] = reduced[dof_map_[i]];
    return full;
  }

  // RHS contribution of a per-element plastic strain (Mandel columns).
  Eigen::VectorXd plastic_load(const Eigen::MatrixXd& bz_elem) const {
    const int d = grid_.dim;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid_.n_nodes() * d);
    const double wq = grid_.elem_volume() / grid_.n_corners();
    for (int e = 0; e < grid_.n_elems(); ++e) {
      Eigen::VectorXd fe = Eigen::VectorXd::Zero(d * grid_.n_corners());
      for (const auto& bm : gauss_b_)
        fe += wq * bm.transpose() * (stiffness_[e] * bz_elem.col(e));
      const auto nodes = grid_.elem_nodes(e);
      for (int c = 0; c < grid_.n_corners(); ++c)
        for (int a = 0; a < d; ++a) f[nodes[c] * d + a] += fe[c * d + a];
    }
    return f;
  }

  // Nodal body-force load with lumped quadrature; b gives the force at a node.
  Eigen::VectorXd body_load(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& b) const {
    const int d = grid_.dim;
    const Eigen::VectorXd w = node_weights(grid_);
    Eigen::VectorXd f(grid_.n_nodes() * d);
    for (int i = 0; i < grid_.n_nodes(); ++i) {
      const Eigen::VectorXd bi = b(grid_.node_position(i));
      for (int a = 0; a < d; ++a) f[i * d + a] = w[i] * bi[a];
    }
    return f;
  }

  // Solves K u = f (full-size RHS), returning the full-size displacement.
  Eigen::VectorXd solve(const Eigen::VectorXd& f_full, double rel_tol = 1e-12,
                        const Eigen::VectorXd* warm_start_full = nullptr) const {
    Eigen::VectorXd rhs = restrict_free(f_full);
    std::function<void(Eigen::VectorXd&)> project;
    if (fully_periodic()) {
      const int d = grid_.dim;
      const int nn = grid_.n_nodes();
      project = [d, nn](Eigen::VectorXd& v) {
        for (int a = 0; a < d; ++a) {
          double mean = 0.0;
          for (int i = 0; i < nn; ++i) mean += v[i * d + a];
          mean /= nn;
          for (int i = 0; i < nn; ++i) v[i * d + a] -= mean;
        }
      };
    }
    Eigen::VectorXd warm;
    const Eigen::VectorXd* warm_ptr = nullptr;
    if (warm_start_full) {
      warm = restrict_free(*warm_start_full);
      warm_ptr = &warm;
    }
    CgResult cg = conjugate_gradient(matrix_, rhs, rel_tol, -1, project, warm_ptr);
    return prolong(cg.x);
  }

 private:
  void build_dof_map() {
    const int d = grid_.dim;
    dof_map_.assign(grid_.n_nodes() * d, -1);
    n_free_ = 0;
    for (int i = 0; i < grid_.n_nodes(); ++i) {
      const bool fixed = grid_.node_constrained(i);
      for (int a = 0; a < d; ++a)
        if (!fixed) dof_map_[i * d + a] = n_free_++;
    }
  }

  void assemble() {
    const int d = grid_.dim;
    gauss_b_.clear();
    for (const auto& xi : fem::gauss_points(d)) gauss_b_.push_back(fem::strain_matrix(grid_, xi));
    const double wq = grid_.elem_volume() / grid_.n_corners();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(grid_.n_elems()) * d * d * grid_.n_corners() *
                  grid_.n_corners());
    for (int e = 0; e < grid_.n_elems(); ++e) {
      Eigen::MatrixXd ke =
          Eigen::MatrixXd::Zero(d * grid_.n_corners(), d * grid_.n_corners());
      for (const auto& bm : gauss_b_) ke += wq * bm.transpose() * stiffness_[e] * bm;
      const auto nodes = grid_.elem_nodes(e);
      for (int ci = 0; ci < grid_.n_corners(); ++ci)
        for (int ai = 0; ai < d; ++ai) {
          const int gi = dof_map_[nodes[ci] * d + ai];
          if (gi < 0) continue;
          for (int cj = 0; cj < grid_.n_corners(); ++cj)
            for (int aj = 0; aj < d; ++aj) {
              const int gj = dof_map_[nodes[cj] * d + aj];
              if (gj < 0) continue;
              trips.emplace_back(gi, gj, ke(ci * d + ai, cj * d + aj));
            }
        }
    }
    matrix_.resize(n_free_, n_free_);
    matrix_.setFromTriplets(trips.begin(), trips.end());
    // relative symmetry check on the assembled operator
    Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(matrix_.transpose()) - matrix_;
    double asym = 0.0, scale = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
        asym = std::max(asym, std::abs(it.value()));
    for (int k = 0; k < matrix_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, k); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    if (scale > 0.0 && asym > 1e-12 * scale)
      throw std::runtime_error("ElasticitySystem: assembled operator is not symmetric");
  }

  Grid grid_;
  std::vector<Eigen::MatrixXd> stiffness_;
  std::vector<Eigen::MatrixXd> gauss_b_;
  std::vector<int> dof_map_;
  Eigen::SparseMatrix<double> matrix_;
  int n_free_ = 0;
};

struct ElasticitySolution {
  Eigen::VectorXd u;                  // nodal displacement
  std::vector<Eigen::MatrixXd> sigma; // per Gauss point: sigma[gp] is sdim x n_elems
  Eigen::MatrixXd sigma_mean;         // element-average stress, sdim x n_elems

  // L2(Q) inner product of two Gauss-point stress fields
  static double pairing(const Grid& g, const std::vector<Eigen::MatrixXd>& a,
                        const std::vector<Eigen::MatrixXd>& b) {
    const double wq = g.elem_volume() / g.n_corners();
    double s = 0.0;
    for (std::size_t gp = 0; gp < a.size(); ++gp)
      s += wq * a[gp].cwiseProduct(b[gp]).sum();
    return s;
  }
};

// Solves the heterogeneous elasticity problem with a given plastic strain:
// sigma = C (eps(u) - Bz), -div sigma = b weakly, u = 0 on Dirichlet parts.
inline ElasticitySolution solve_elasticity(const ElasticitySystem& sys,
                                           const Eigen::MatrixXd& bz_elem,
                                           const Eigen::VectorXd& body_load_full,
                                           double rel_tol = 1e-12,
                                           const Eigen::VectorXd* warm_start = nullptr) {
  const Grid& g = sys.grid();
  const int s = sym_dim(g.dim);
  if (bz_elem.cols() != g.n_elems() || bz_elem.rows() != s)
    throw std::invalid_argument("solve_elasticity: plastic-strain field mismatch");
  Eigen::VectorXd f = sys.plastic_load(bz_elem) + body_load_full;
  ElasticitySolution sol;
  sol.u = sys.solve(f, rel_tol, warm_start);
  const auto gps = fem::gauss_points(g.dim);
  sol.sigma.assign(gps.size(), Eigen::MatrixXd(s, g.n_elems()));
  std::vector<Eigen::MatrixXd> bmats;
  for (const auto& xi : gps) bmats.push_back(fem::strain_matrix(g, xi));
  for (int e = 0; e < g.n_elems(); ++e) {
    const Eigen::VectorXd ue = elem_dofs(g, sol.u, e);
    for (std::size_t gp = 0; gp < gps.size(); ++gp)
      sol.sigma[gp].col(e) = sys.stiffness()[e] * (bmats[gp] * ue - bz_elem.col(e));
  }
  sol.sigma_mean = Eigen::MatrixXd::Zero(s, g.n_elems());
  for (const auto& sg : sol.sigma) sol.sigma_mean += sg / static_cast<double>(sol.sigma.size());
  return sol;
}

struct CorrectorSolution {
  Eigen::VectorXd u;              // mean-zero periodic corrector, nodal
  Eigen::VectorXd mean_stress;    // volume average of C (E + eps(u)), Mandel
};

// Periodic cell problem: minimize int C (E + eps(v)) : (E + eps(v)) over
// mean-zero periodic v.
inline CorrectorSolution cell_corrector(const ElasticitySystem& sys, const Eigen::VectorXd& mean_strain,
                                        double rel_tol = 1e-12) {
  if (!sys.fully_periodic())
    throw std::invalid_argument("cell_corrector: cell must be periodic on all axes");
  const Grid& g = sys.grid();
  const int s = sym_dim(g.dim);
  Eigen::MatrixXd e_field(s, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) e_field.col(e) = -mean_strain;
  // plastic_load(-E) assembles -int C E : eps(phi), the corrector RHS
  Eigen::VectorXd f = sys.plastic_load(e_field);
  CorrectorSolution sol;
  sol.u = sys.solve(f, rel_tol);
  // subtract the mean so the corrector is unique
  const int d = g.dim;
  for (int a = 0; a < d; ++a) {
    double mean = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i) mean += sol.u[i * d + a];
    mean /= g.n_nodes();
    for (int i = 0; i < g.n_nodes(); ++i) sol.u[i * d + a] -= mean;
  }
  const Eigen::MatrixXd eps = strain(g, sol.u);
  sol.mean_stress = Eigen::VectorXd::Zero(s);
  for (int e = 0; e < g.n_elems(); ++e)
    sol.mean_stress += sys.stiffness()[e] * (mean_strain + eps.col(e));
  sol.mean_stress /= g.n_elems();
  return sol;
}

// Effective tensor of one periodic cell: columns are mean stresses of the
// unit-strain cell problems.
inline Eigen::MatrixXd cell_effective_tensor(const ElasticitySystem& sys, double rel_tol = 1e-12) {
  const int s = sym_dim(sys.grid().dim);
  Eigen::MatrixXd ceff(s, s);
  for (int k = 0; k < s; ++k)
    ceff.col(k) = cell_corrector(sys, Eigen::VectorXd::Unit(s, k), rel_tol).mean_stress;
  return 0.5 * (ceff + ceff.transpose());
}

// --- potential / solenoidal decomposition on a periodic cell ----------------

struct PotSolParts {
  Eigen::VectorXd mean;      // d
  Eigen::MatrixXd potential; // d x n_elems, = grad of a mean-zero periodic scalar
  Eigen::MatrixXd solenoidal;
  Eigen::VectorXd potential_scalar;  // the generating nodal scalar
};

namespace fem {

// scalar gradient operator at the element center: nodal scalars -> d-vector
inline Eigen::MatrixXd scalar_gradient_matrix(const Grid& g) {
  const int d = g.dim, nc = g.n_corners();
  Eigen::MatrixXd gm(d, nc);
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < d; ++a) {
      const double sa = ((c >> a) & 1) ? 1.0 : -1.0;
      double val = sa / g.spacing[a];
      for (int b = 0; b < d; ++b)
        if (b != a) val *= 0.5;
      gm(a, c) = val;
    }
  return gm;
}

}  // namespace fem

// Orthogonal splitting of a per-element vector field on a periodic cell into
// mean + potential + solenoidal parts (center-quadrature duality).
inline PotSolParts pot_sol_project(const Grid& g, const Eigen::MatrixXd& field,
                                   double rel_tol = 1e-12) {
  for (int a = 0; a < g.dim; ++a)
    if (!g.periodic[a]) throw std::invalid_argument("pot_sol_project: cell must be periodic");
  const int d = g.dim;
  if (field.rows() != d || field.cols() != g.n_elems())
    throw std::invalid_argument("pot_sol_project: field/grid mismatch");
  const Eigen::MatrixXd gm = fem::scalar_gradient_matrix(g);
  const double ve = g.elem_volume();
  // Galerkin system A psi = rhs with A = sum_e ve * G^T G
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(g.n_nodes());
  const Eigen::MatrixXd ae = ve * gm.transpose() * gm;
  for (int e = 0; e < g.n_elems(); ++e) {
    const auto nodes = g.elem_nodes(e);
    const Eigen::VectorXd fe = ve * gm.transpose() * field.col(e);
    for (int ci = 0; ci < g.n_corners(); ++ci) {
      rhs[nodes[ci]] += fe[ci];
      for (int cj = 0; cj < g.n_corners(); ++cj)
        trips.emplace_back(nodes[ci], nodes[cj], ae(ci, cj));
    }
  }
  Eigen::SparseMatrix<double> A(g.n_nodes(), g.n_nodes());
  A.setFromTriplets(trips.begin(), trips.end());
  const int nn = g.n_nodes();
  auto project = [nn](Eigen::VectorXd& v) {
    const double mean = v.mean();
    for (int i = 0; i < nn; ++i) v[i] -= mean;
  };
  CgResult cg = conjugate_gradient(A, rhs, rel_tol, -1, project);
  PotSolParts parts;
  parts.potential_scalar = cg.x;
  parts.mean = field.rowwise().mean();
  parts.potential.resize(d, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e)
    parts.potential.col(e) = gm * [&] {
      const auto nodes = g.elem_nodes(e);
      Eigen::VectorXd pe(g.n_corners());
      for (int c = 0; c < g.n_corners(); ++c) pe[c] = cg.x[nodes[c]];
      return pe;
    }();
  parts.solenoidal = field;
  parts.solenoidal.colwise() -= parts.mean;
  parts.solenoidal -= parts.potential;
  return parts;
}

// Element-center gradient of a periodic nodal vector field (d*d rows,
// du_i/dx_j with i major): the discrete potential fields of the Korn check.
inline Eigen::MatrixXd periodic_vector_gradient(const Grid& g, const Eigen::VectorXd& v_node) {
  return gradient(g, v_node);
}

struct KornReport {
  double constant = 0.0;  // max ||grad||_p / ||sym grad||_p over samples
  int degenerate_samples = 0;
};

// Empirical Korn constant over sampled discrete gradients of periodic vector
// fields.
inline KornReport korn_check(const Grid& g, const std::vector<Eigen::MatrixXd>& gradient_samples,
                             double p) {
  const int d = g.dim;
  KornReport rep;
  for (const auto& grad : gradient_samples) {
    double full = 0.0, sym = 0.0;
    for (int e = 0; e < grad.cols(); ++e) {
      Eigen::MatrixXd m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = grad(i * d + j, e);
      const Eigen::MatrixXd ms = 0.5 * (m + m.transpose());
      full += std::pow(m.norm(), p);
      sym += std::pow(ms.norm(), p);
    }
    full = std::pow(full, 1.0 / p);
    sym = std::pow(sym, 1.0 / p);
    if (sym < 1e-14 * (1.0 + full)) {
      ++rep.degenerate_samples;
      continue;
    }
    rep.constant = std::max(rep.constant, full / sym);
  }
  return rep;
}

}  // namespace homog
