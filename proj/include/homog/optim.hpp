#pragma once

#include <functional>
#include <limits>
#include <vector>
#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace homog {

// Small derivative-free maximizers used by the conjugate / Fitzpatrick suprema.
// Problems are low-dimensional (<= 6), so simplex search plus polish suffices.

// Golden-section maximization of a unimodal-near-optimum 1D function.
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12, double* xbest = nullptr) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  double xm = 0.5 * (a + b);
  if (xbest) *xbest = xm;
  return f(xm);
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  int evals = 0;
};

inline NelderMeadResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x0, double scale,
                                        int max_iter = 400, double ftol = 1e-13) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i][i - 1] += scale;
  NelderMeadResult res;
  for (int i = 0; i <= n; ++i) { fs[i] = f(xs[i]); ++res.evals; }
  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] > fs[b]; });
    std::vector<Eigen::VectorXd> nx(n + 1);
    std::vector<double> nf(n + 1);
    for (int i = 0; i <= n; ++i) { nx[i] = xs[idx[i]]; nf[i] = fs[idx[i]]; }
    xs = nx; fs = nf;
  };
  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::abs(fs[0] - fs[n]) < ftol * (1.0 + std::abs(fs[0]))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;
    Eigen::VectorXd xr = centroid + (centroid - xs[n]);
    double fr = f(xr); ++res.evals;
    if (fr > fs[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[n]);
      double fe = f(xe); ++res.evals;
      if (fe > fr) { xs[n] = xe; fs[n] = fe; } else { xs[n] = xr; fs[n] = fr; }
    } else if (fr > fs[n - 1]) {
      xs[n] = xr; fs[n] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs[n] - centroid);
      double fc = f(xc); ++res.evals;
      if (fc > fs[n]) { xs[n] = xc; fs[n] = fc; }
      else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]); ++res.evals;
        }
      }
    }
  }
  order();
  res.x = xs[0];
  res.value = fs[0];
  return res;
}

// Multi-start simplex maximization followed by coordinate golden polish.
inline NelderMeadResult multistart_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const std::vector<Eigen::VectorXd>& starts,
                                       double scale, int max_iter = 400) {
  NelderMeadResult best;
  for (const auto& s : starts) {
    NelderMeadResult r = nelder_mead_max(f, s, scale, max_iter);
    // shrink restart tightens the simplex around the located optimum
    r = nelder_mead_max(f, r.x, scale * 1e-3, max_iter / 2);
    if (r.value > best.value) best = r;
  }
  const int n = static_cast<int>(best.x.size());
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x = best.x;
      double v = golden_max(
          [&](double t) { Eigen::VectorXd y = x; y[i] = t; return f(y); },
          x[i] - scale * 1e-2, x[i] + scale * 1e-2, 1e-13, &x[i]);
      if (v > best.value) { best.value = v; best.x = x; }
    }
  }
  return best;
}

// Damped semismooth Newton for monotone vector equations F(x) = 0.
struct NewtonResult {
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

inline NewtonResult damped_newton(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& J,
    const Eigen::VectorXd& x0, double tol, int max_iter = 200) {
  NewtonResult res;
  res.x = x0;
  Eigen::VectorXd fx = F(res.x);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    res.residual = fx.norm();
    if (res.residual <= tol) { res.converged = true; return res; }
    Eigen::VectorXd dx = J(res.x).partialPivLu().solve(-fx);
    double step = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd xn = res.x + step * dx;
      Eigen::VectorXd fn = F(xn);
      if (fn.norm() < res.residual * (1.0 - 0.25 * step) || fn.norm() < tol) {
        res.x = xn; fx = fn;
        break;
      }
      step *= 0.5;
      if (ls == 59) { res.x += step * dx; fx = F(res.x); }
    }
  }
  res.residual = fx.norm();
  res.converged = res.residual <= tol;
  return res;
}

}  // namespace homog
