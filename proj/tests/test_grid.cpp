#include "doctest.h"

#include <cmath>

#include "homog/grid.hpp"
#include "homog/rng.hpp"
#include "homog/tensor.hpp"

using namespace homog;

namespace {

Eigen::VectorXd random_nodal(const Grid& g, std::uint64_t seed, bool zero_dirichlet) {
  CounterRng rng(seed);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(g.n_nodes() * g.dim);
  for (int i = 0; i < g.n_nodes(); ++i) {
    if (zero_dirichlet && g.node_constrained(i)) continue;
    for (int a = 0; a < g.dim; ++a) u[i * g.dim + a] = rng.uniform(i * 3 + a, -1.0, 1.0);
  }
  return u;
}

}  // namespace

TEST_CASE("linear displacement reproduces a constant strain") {
  for (int d : {1, 2, 3}) {
    Grid g = Grid::dirichlet_box(d, 4);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = 0.1 * (i + 1) + 0.3 * j;
    Eigen::VectorXd u(g.n_nodes() * d);
    for (int n = 0; n < g.n_nodes(); ++n)
      u.segment(n * d, d) = a * g.node_position(n);
    const Eigen::VectorXd expected = mandel_from_matrix(0.5 * (a + a.transpose()));
    const Eigen::MatrixXd eps = strain(g, u);
    for (int e = 0; e < g.n_elems(); ++e)
      CHECK((eps.col(e) - expected).norm() <= 1e-12);
    const Eigen::MatrixXd grad = gradient(g, u);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) CHECK(grad(i * d + j, 0) == doctest::Approx(a(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("divergence is the negative adjoint of the center strain") {
  for (bool periodic : {false, true}) {
    Grid g = periodic ? Grid::periodic_box(2, 5) : Grid::dirichlet_box(2, 5);
    const int s = sym_dim(2);
    CounterRng rng(17);
    Eigen::MatrixXd sigma(s, g.n_elems());
    for (int e = 0; e < g.n_elems(); ++e) sigma.col(e) = rng.gaussian_vec(e, s);
    const Eigen::VectorXd u = random_nodal(g, 99, false);
    const Eigen::MatrixXd eps = strain(g, u);
    double lhs = 0.0;
    for (int e = 0; e < g.n_elems(); ++e)
      lhs += g.elem_volume() * sigma.col(e).dot(eps.col(e));
    const Eigen::VectorXd div = divergence(g, sigma);
    const Eigen::VectorXd w = node_weights(g);
    double rhs = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i)
      for (int a = 0; a < 2; ++a) rhs -= w[i] * div[i * 2 + a] * u[i * 2 + a];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("conjugate gradients matches a dense factorization") {
  Grid g = Grid::dirichlet_box(2, 4);
  std::vector<Eigen::MatrixXd> c(g.n_elems(), isotropic_stiffness(2, 1.0, 1.0));
  // heterogeneous: stiffen half the elements
  for (int e = 0; e < g.n_elems() / 2; ++e) c[e] *= 3.0;
  ElasticitySystem sys(g, c);
  CounterRng rng(55);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.n_nodes() * 2);
  for (int i = 0; i < g.n_nodes(); ++i)
    if (!g.node_constrained(i)) f.segment(i * 2, 2) = rng.gaussian_vec(i, 2);
  const Eigen::VectorXd u = sys.solve(f, 1e-13);
  const Eigen::MatrixXd dense(sys.matrix());
  const Eigen::VectorXd u_dense = sys.prolong(dense.ldlt().solve(sys.restrict_free(f)));
  CHECK((u - u_dense).norm() <= 1e-9 * (1.0 + u_dense.norm()));
}

TEST_CASE("manufactured smooth solution converges at second order") {
  const double lambda = 1.0, mu = 1.0;
  auto exact = [](const Eigen::VectorXd& x) {
    const double f = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    return (f * Eigen::Vector2d::Ones()).eval();
  };
  auto body = [&](const Eigen::VectorXd& x) {
    const double f = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    const double gg = std::cos(M_PI * x[0]) * std::cos(M_PI * x[1]);
    const double v = M_PI * M_PI * ((3.0 * mu + lambda) * f - (lambda + mu) * gg);
    return (v * Eigen::Vector2d::Ones()).eval();
  };
  auto solve_error = [&](int n) {
    Grid g = Grid::dirichlet_box(2, n);
    std::vector<Eigen::MatrixXd> c(g.n_elems(), isotropic_stiffness(2, lambda, mu));
    ElasticitySystem sys(g, c);
    Eigen::VectorXd f = sys.body_load(body);
    Eigen::MatrixXd bz = Eigen::MatrixXd::Zero(sym_dim(2), g.n_elems());
    ElasticitySolution sol = solve_elasticity(sys, bz, f, 1e-13);
    const Eigen::VectorXd w = node_weights(g);
    double err2 = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i) {
      const Eigen::VectorXd d = sol.u.segment(i * 2, 2) - exact(g.node_position(i));
      err2 += w[i] * d.squaredNorm();
    }
    return std::sqrt(err2);
  };
  const double e8 = solve_error(8), e16 = solve_error(16), e32 = solve_error(32);
  CHECK(e8 / e16 > 2.5);
  CHECK(e8 / e16 < 6.0);
  CHECK(e16 / e32 > 2.5);
  CHECK(e16 / e32 < 6.0);
}

TEST_CASE("homogeneous cell: corrector vanishes, effective tensor is the material") {
  Grid g = Grid::periodic_box(2, 4);
  const Eigen::MatrixXd c0 = isotropic_stiffness(2, 1.3, 0.7);
  std::vector<Eigen::MatrixXd> c(g.n_elems(), c0);
  ElasticitySystem sys(g, c);
  CorrectorSolution cor = cell_corrector(sys, Eigen::Vector3d(1.0, -0.5, 0.25));
  CHECK(cor.u.norm() <= 1e-10);
  const Eigen::MatrixXd ceff = cell_effective_tensor(sys);
  CHECK((ceff - c0).norm() <= 1e-9);
}

TEST_CASE("1d laminate cell: effective modulus is the harmonic mean") {
  Grid g = Grid::periodic_box(1, 8);
  std::vector<Eigen::MatrixXd> c(g.n_elems());
  for (int e = 0; e < 8; ++e)
    c[e] = Eigen::MatrixXd::Constant(1, 1, e % 2 == 0 ? 1.0 : 2.0);
  ElasticitySystem sys(g, c);
  const Eigen::MatrixXd ceff = cell_effective_tensor(sys);
  CHECK(ceff(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("potential/solenoidal split: orthogonality, reconstruction, idempotence") {
  Grid g = Grid::periodic_box(2, 6);
  CounterRng rng(31);
  Eigen::MatrixXd f(2, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) f.col(e) = rng.gaussian_vec(e, 2);
  PotSolParts parts = pot_sol_project(g, f);
  const double ve = g.elem_volume();
  // reconstruction
  Eigen::MatrixXd recon = parts.potential + parts.solenoidal;
  recon.colwise() += parts.mean;
  CHECK((recon - f).norm() <= 1e-9 * (1.0 + f.norm()));
  // potential part has zero average (exact telescoping)
  CHECK(parts.potential.rowwise().mean().norm() <= 1e-10);
  // mutual orthogonality under the element quadrature
  CHECK(std::abs(ve * parts.potential.cwiseProduct(parts.solenoidal).sum()) <= 1e-9);
  // projecting a pure discrete gradient returns it unchanged
  Eigen::VectorXd psi(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) psi[i] = rng.uniform(1000 + i, -1.0, 1.0);
  const Eigen::MatrixXd gm = fem::scalar_gradient_matrix(g);
  Eigen::MatrixXd gradpsi(2, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) {
    const auto nodes = g.elem_nodes(e);
    Eigen::VectorXd pe(g.n_corners());
    for (int cc = 0; cc < g.n_corners(); ++cc) pe[cc] = psi[nodes[cc]];
    gradpsi.col(e) = gm * pe;
  }
  PotSolParts p2 = pot_sol_project(g, gradpsi);
  CHECK(p2.mean.norm() <= 1e-10);
  CHECK(p2.solenoidal.norm() <= 1e-8 * (1.0 + gradpsi.norm()));
  // idempotence: re-projecting the potential part reproduces it
  PotSolParts p3 = pot_sol_project(g, parts.potential);
  CHECK((p3.potential - parts.potential).norm() <= 1e-8 * (1.0 + parts.potential.norm()));
}

TEST_CASE("empirical korn constant: bounded, detects pure gradients vs dense oracle") {
  Grid g = Grid::periodic_box(2, 4);
  std::vector<Eigen::MatrixXd> samples;
  CounterRng rng(41);
  for (int s = 0; s < 12; ++s) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g.n_nodes() * 2);
    for (int i = 0; i < g.n_nodes(); ++i) v.segment(i * 2, 2) = rng.gaussian_vec(s * 1000 + i, 2);
    samples.push_back(gradient(g, v));
  }
  KornReport rep = korn_check(g, samples, 2.0);
  CHECK(rep.constant >= 1.0);
  CHECK(rep.degenerate_samples == 0);
  // dense oracle for one sample at p = 2
  {
    const Eigen::MatrixXd& grad = samples[0];
    double full = 0.0, symn = 0.0;
    for (int e = 0; e < grad.cols(); ++e) {
      Eigen::Matrix2d m;
      m << grad(0, e), grad(1, e), grad(2, e), grad(3, e);
      full += m.squaredNorm();
      symn += (0.5 * (m + m.transpose())).squaredNorm();
    }
    KornReport one = korn_check(g, {grad}, 2.0);
    CHECK(one.constant == doctest::Approx(std::sqrt(full / symn)).epsilon(1e-12));
  }
  // a pure rotation gradient is degenerate (sym part zero): flagged, not folded in
  Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(4, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) { rot(1, e) = 1.0; rot(2, e) = -1.0; }
  KornReport deg = korn_check(g, {rot}, 2.0);
  CHECK(deg.degenerate_samples == 1);
}

TEST_CASE("grid validation and periodic wrap") {
  Grid g = Grid::periodic_box(2, 4);
  CHECK(g.n_nodes() == 16);
  CHECK(g.node_index({4, 0, 0}) == g.node_index({0, 0, 0}));
  CHECK(g.node_index({-1, 2, 0}) == g.node_index({3, 2, 0}));
  Grid bad;
  bad.dim = 4;
  CHECK_THROWS(bad.validate());
  bad.dim = 2;
  bad.cells = {0, 1, 1};
  CHECK_THROWS(bad.validate());
}
