#include "doctest.h"

#include <cmath>

#include "homog/convex.hpp"
#include "homog/rng.hpp"

using namespace homog;

namespace {

MonotoneLaw nh_law(double yield, double exponent, int dim) {
  NortonHoffParams p;
  p.yield_stress = yield;
  p.exponent = exponent;
  p.dim = dim;
  return MonotoneLaw::norton_hoff(p);
}

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("flow law radial values") {
  MonotoneLaw law = nh_law(1.0, 1.0, 2);
  // below yield: zero
  CHECK(eval_g(law, v2(0.5, 0.3)).norm() == doctest::Approx(0.0));
  // above yield with exponent 1: (|v| - 1) v / |v|
  Eigen::VectorXd v = v2(3.0, 4.0);  // |v| = 5
  Eigen::VectorXd gv = eval_g(law, v);
  CHECK(gv[0] == doctest::Approx(4.0 * 3.0 / 5.0).epsilon(1e-12));
  CHECK(gv[1] == doctest::Approx(4.0 * 4.0 / 5.0).epsilon(1e-12));
  // exponent 3/2
  MonotoneLaw law32 = nh_law(1.0, 1.5, 2);
  Eigen::VectorXd g32 = eval_g(law32, v);
  CHECK(g32.norm() == doctest::Approx(std::pow(4.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("resolvent: hand-computed value, residual, nonexpansiveness") {
  MonotoneLaw law = nh_law(1.0, 1.0, 2);
  // v + 0.5 (|v|-1)+ v/|v| = w along e1: 1.5 v - 0.5 = 1.75  =>  v = 1.5
  Eigen::VectorXd w = v2(1.75, 0.0);
  Eigen::VectorXd v = resolvent(law, 0.5, w);
  CHECK(v[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.0));
  // defining residual
  CHECK((v + 0.5 * eval_g(law, v) - w).norm() <= 1e-10);
  // nonexpansiveness on random pairs
  CounterRng rng(11);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd a = rng.ball(2 * i, 2, 5.0), b = rng.ball(2 * i + 1, 2, 5.0);
    Eigen::VectorXd ra = resolvent(law, 0.7, a), rb = resolvent(law, 0.7, b);
    CHECK((ra - rb).norm() <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("monotonicity of the flow laws on random pairs") {
  std::vector<MonotoneLaw> laws{nh_law(1.0, 1.0, 3), nh_law(0.5, 1.7, 3)};
  Eigen::MatrixXd m(3, 3);
  m << 2, 1, 0, 1, 2, 0, 0, 0, 1;
  laws.push_back(MonotoneLaw::linear_psd(m));
  CounterRng rng(7);
  for (const auto& law : laws)
    for (int i = 0; i < 100; ++i) {
      Eigen::VectorXd a = rng.ball(2 * i, 3, 4.0), b = rng.ball(2 * i + 1, 3, 4.0);
      CHECK((eval_g(law, a) - eval_g(law, b)).dot(a - b) >= -1e-12);
    }
}

TEST_CASE("weighted resolvent: scalar weight matches plain resolvent, defining equation") {
  MonotoneLaw law = nh_law(1.0, 1.3, 2);
  Eigen::VectorXd w = v2(2.5, -1.0);
  Eigen::MatrixXd mu = 0.7 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd a = weighted_resolvent(law, 0.4, mu, w);
  Eigen::VectorXd b = resolvent(law, 0.4 * 0.7, w);
  CHECK((a - b).norm() <= 1e-10);
  Eigen::MatrixXd mgen(2, 2);
  mgen << 1.5, 0.2, 0.2, 0.8;
  Eigen::VectorXd v = weighted_resolvent(law, 0.4, mgen, w);
  CHECK((v + 0.4 * mgen * eval_g(law, v) - w).norm() <= 1e-10 * (1.0 + w.norm()));
}

TEST_CASE("fenchel conjugate of a quadratic") {
  // phi(x) = |x|^2 / 2  =>  phi*(v*) = |v*|^2 / 2
  ConvexFn phi;
  phi.dim = 2;
  phi.smooth = true;
  phi.f = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  SupResult c = fenchel_conjugate(phi, v2(1.0, 0.5), 50.0);
  CHECK(!c.unbounded);
  CHECK(c.value == doctest::Approx(0.625).epsilon(1e-8));
  // double conjugate returns the function value
  ConvexFn conj;
  conj.dim = 2;
  conj.f = [&](const Eigen::VectorXd& y) { return fenchel_conjugate(phi, y, 50.0).value; };
  Eigen::VectorXd x0 = v2(0.7, -0.4);
  SupResult cc = fenchel_conjugate(conj, x0, 50.0);
  CHECK(cc.value == doctest::Approx(phi(x0)).epsilon(1e-4));
}

TEST_CASE("fenchel conjugate flags unbounded suprema") {
  // linear phi: conjugate finite only at its slope
  ConvexFn phi;
  phi.dim = 1;
  phi.f = [](const Eigen::VectorXd& x) { return x[0]; };
  Eigen::VectorXd vs(1);
  vs << 3.0;
  SupResult c = fenchel_conjugate(phi, vs, 100.0);
  CHECK(c.unbounded);
}

TEST_CASE("fitzpatrick of the identity law: closed form") {
  MonotoneLaw id = MonotoneLaw::linear_psd(Eigen::MatrixXd::Identity(2, 2));
  // f(v, v*) = |v + v*|^2 / 4
  Eigen::VectorXd v = v2(1.0, 0.0), vs = v2(0.0, 0.0);
  SupResult f = fitzpatrick(id, v, vs, 100.0);
  CHECK(!f.unbounded);
  CHECK(f.value == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(fitzpatrick_gap(id, v, vs) == doctest::Approx(0.25).epsilon(1e-8));
  // on the graph v* = v: value = <v*, v>, gap clamps to zero
  Eigen::VectorXd u = v2(0.6, -0.2);
  SupResult fg = fitzpatrick(id, u, u, 100.0);
  CHECK(fg.value == doctest::Approx(u.squaredNorm()).epsilon(1e-10));
  CHECK(fitzpatrick_gap(id, u, u) == 0.0);
}

TEST_CASE("fitzpatrick inequality and graph equality for the flow law") {
  MonotoneLaw law = nh_law(1.0, 1.0, 2);
  CounterRng rng(23);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd v = rng.ball(2 * i, 2, 3.0);
    Eigen::VectorXd vs = rng.ball(2 * i + 1, 2, 3.0);
    const double radius = default_fitzpatrick_radius(law, v, vs);
    SupResult f = fitzpatrick(law, v, vs, radius);
    CHECK(f.value >= v.dot(vs) - 1e-6 * (1.0 + std::abs(v.dot(vs))));
  }
  // graph points: gap vanishes
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd v = rng.ball(100 + i, 2, 3.0);
    Eigen::VectorXd vs = eval_g(law, v);
    CHECK(fitzpatrick_gap(law, v, vs) <= 1e-8);
  }
  // off-graph point: gap strictly positive
  CHECK(fitzpatrick_gap(law, v2(3.0, 0.0), v2(0.0, 2.0)) > 1e-2);
}

TEST_CASE("coercivity certificates") {
  MonotoneLaw id = MonotoneLaw::linear_psd(Eigen::MatrixXd::Identity(3, 3));
  // <v, v> = |v|^2 = 0.5 |v|^2 + 0.5 |g(v)|^2 exactly
  CoercivityCertificate half{0.5, 0.5, 0.0};
  CHECK(certificate_holds(id, half, 10.0, 500));
  auto found = certify_coercivity(id, 10.0, 500);
  REQUIRE(found.has_value());
  CHECK(found->m_bound <= 0.0);
  CHECK(certificate_holds(id, *found, 10.0, 500, 101));
  // the zero law admits no certificate with nonnegative offset
  CHECK(!certify_coercivity(MonotoneLaw::zero(3), 10.0, 200, 0.0).has_value());
}

TEST_CASE("subdifferential laws: selection and prox agree with smooth gradient") {
  ConvexFn phi;
  phi.dim = 2;
  phi.smooth = false;  // force the implicit route
  phi.f = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm() + 0.25 * std::pow(x.squaredNorm(), 2); };
  MonotoneLaw law = MonotoneLaw::subdifferential(phi);
  Eigen::VectorXd v = v2(0.8, -0.5);
  Eigen::VectorXd grad = v + v.squaredNorm() * v;  // analytic gradient
  CHECK((eval_g(law, v) - grad).norm() <= 1e-5 * (1.0 + grad.norm()));
  // resolvent solves v + h grad(v) = w
  Eigen::VectorXd w = v2(1.0, 2.0);
  Eigen::VectorXd r = resolvent(law, 0.3, w);
  CHECK((r + 0.3 * (r + r.squaredNorm() * r) - w).norm() <= 1e-6);
}

TEST_CASE("field plumbing: pairing, canonical application, integral functionals") {
  QuadField a, b;
  a.values.resize(2, 3);
  a.values << 1, 0, 2, 0, 1, 1;
  b.values.resize(2, 3);
  b.values << 1, 1, 0, 2, 0, 3;
  a.weights = b.weights = Eigen::VectorXd::Constant(3, 0.5);
  CHECK(field_pairing(a, b) == doctest::Approx(0.5 * (1.0 + 0.0 + 3.0)));

  MonotoneLaw law = nh_law(1.0, 1.0, 2);
  LawField lf = LawField::constant(law, 3);
  QuadField ga = canonical_apply(lf, a);
  for (int i = 0; i < 3; ++i)
    CHECK((ga.values.col(i) - eval_g(law, a.values.col(i))).norm() <= 1e-14);

  ConvexFn phi;
  phi.dim = 2;
  phi.smooth = true;
  phi.f = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  ConvexFnField pf = ConvexFnField::constant(phi, 3);
  double iv = integral_functional(pf, a);
  CHECK(iv == doctest::Approx(0.5 * 0.5 * (1.0 + 1.0 + 5.0)));
  double cv = conjugate_integral_functional(pf, b, 50.0);
  CHECK(cv == doctest::Approx(0.5 * 0.5 * (5.0 + 1.0 + 9.0)).epsilon(1e-7));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(nh_law(-1.0, 1.0, 2));
  CHECK_THROWS(nh_law(1.0, 0.0, 2));
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS(MonotoneLaw::linear_psd(bad));
  MonotoneLaw ok = nh_law(1.0, 1.0, 2);
  CHECK_THROWS(resolvent(ok, -0.1, v2(1, 1)));
}
