#include "doctest.h"

#include <cmath>

#include "homog/twoscale.hpp"

using namespace homog;

namespace {

FieldSpec checkerboard2d() {
  FieldSpec spec;
  spec.kind = FieldKind::checkerboard_iid;
  spec.dim = 2;
  spec.phase_values = {CoefficientSet::scalar(2, 1.0), CoefficientSet::scalar(2, 3.0)};
  spec.phase_probabilities = {0.5, 0.5};
  return spec;
}

}  // namespace

TEST_CASE("dictionary shape and the trivial observable") {
  TestFunctionDictionary dict = TestFunctionDictionary::standard(2);
  CHECK(dict.size() == 24);
  FieldSpec spec = checkerboard2d();
  Realization real(spec, 3);
  auto one = [](const Eigen::VectorXd&) { return 1.0; };
  Eigen::MatrixXd p = pair_against_dictionary(real, 1.0 / 16.0, dict, one);
  Eigen::MatrixXd lim = dictionary_limit(dict, spec, one);
  // observable "one" does not see the microstructure: columns agree already
  for (int bi = 0; bi < 4; ++bi)
    CHECK(p(bi, 0) == doctest::Approx(lim(bi, 0)).epsilon(2e-2));
}

TEST_CASE("pairings converge to the separated limit as eta shrinks") {
  TestFunctionDictionary dict = TestFunctionDictionary::standard(2);
  FieldSpec spec = checkerboard2d();
  auto f = [](const Eigen::VectorXd& x) { return 1.0 + x[0]; };
  Eigen::MatrixXd lim = dictionary_limit(dict, spec, f);
  const double scale = lim.cwiseAbs().maxCoeff();
  double prev_err = -1.0;
  // average several realizations to damp the stochastic part
  for (double eta : {1.0 / 8.0, 1.0 / 32.0}) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(4, 6);
    const int n_seeds = 8;
    for (int s = 0; s < n_seeds; ++s)
      mean += pair_against_dictionary(Realization(spec, 100 + s), eta, dict, f);
    mean /= n_seeds;
    const double err = (mean - lim).cwiseAbs().maxCoeff() / scale;
    if (prev_err >= 0.0) CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 5e-2);
}

TEST_CASE("scale splitting is an exact orthogonal decomposition") {
  Grid g = Grid::periodic_box(2, 32, 1.0);
  CounterRng rng(9);
  Eigen::MatrixXd field(3, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) field.col(e) = rng.gaussian_vec(e, 3);
  const double eta = 1.0 / 32.0;
  GradientSplit sp = split_at_scale(g, field, eta);
  CHECK(sp.block > 1);
  CHECK((sp.coarse + sp.oscillatory - field).norm() <= 1e-12);
  CHECK(std::abs(sp.cross_pairing) <= 1e-10);
  // Pythagoras under the element quadrature
  const double ve = g.elem_volume();
  CHECK(sp.coarse_norm * sp.coarse_norm + sp.oscillatory_norm * sp.oscillatory_norm ==
        doctest::Approx(ve * field.squaredNorm()).epsilon(1e-10));
  // a constant field has no oscillatory part
  Eigen::MatrixXd cf = Eigen::MatrixXd::Constant(3, g.n_elems(), 2.5);
  GradientSplit spc = split_at_scale(g, cf, eta);
  CHECK(spc.oscillatory_norm <= 1e-12);
  // splitting is idempotent on the coarse part
  GradientSplit sp2 = split_at_scale(g, sp.coarse, eta);
  CHECK(sp2.oscillatory_norm <= 1e-10);
}

TEST_CASE("convex lower bound along an oscillating sequence") {
  // phi = |.|^2/2; v_eta = mean + oscillation, w = subgradient at the mean
  ConvexFn phi;
  phi.dim = 2;
  phi.smooth = true;
  phi.f = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  const int n = 64;
  ConvexFnField phis = ConvexFnField::constant(phi, n);
  Eigen::Vector2d mean(1.0, -0.5);
  QuadField w;
  w.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  w.values = mean.replicate(1, n);
  for (double amp : {0.8, 0.4, 0.0}) {
    QuadField v;
    v.weights = w.weights;
    v.values.resize(2, n);
    for (int i = 0; i < n; ++i)
      v.values.col(i) = mean + amp * Eigen::Vector2d(i % 2 ? 1.0 : -1.0, 0.0);
    LiminfCheck chk = liminf_check(phis, v, w, 50.0);
    // slack equals the oscillation energy |amp|^2/2, never below -1e-6
    CHECK(chk.slack() >= -1e-6);
    CHECK(chk.slack() == doctest::Approx(0.5 * amp * amp).epsilon(1e-6));
  }
}

TEST_CASE("time-dependent pairing: trapezoid is exact for affine-in-time data") {
  Grid g = Grid::dirichlet_box(2, 8);
  FieldSpec spec = checkerboard2d();
  Realization real(spec, 4);
  TestFunctionDictionary dict = TestFunctionDictionary::standard(2);
  std::vector<double> times;
  for (int n = 0; n <= 10; ++n) times.push_back(0.1 * n);
  // values(t) = t at every element, theta = 1: integral = T^2/2 * sum psi g
  auto vals = [&](int step) {
    return Eigen::VectorXd::Constant(g.n_elems(), times[step]).eval();
  };
  Eigen::MatrixXd acc = time_dependent_pairing(g, real, 1.0, dict, times, vals,
                                               [](double) { return 1.0; });
  // reference: same pairing with values = 1 scaled by T^2/2
  auto ones = [&](int) { return Eigen::VectorXd::Ones(g.n_elems()).eval(); };
  Eigen::MatrixXd ref = time_dependent_pairing(g, real, 1.0, dict, times, ones,
                                               [](double) { return 1.0; });
  CHECK((acc - 0.5 * ref).norm() <= 1e-12 * (1.0 + ref.norm()));
}
