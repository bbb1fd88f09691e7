#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>
#include <cmath>

#include <Eigen/Dense>

#include "homog/optim.hpp"
#include "homog/rng.hpp"

namespace homog {

struct NortonHoffParams {
  double yield_stress = 1.0;  // sigma_y > 0
  double exponent = 1.0;      // r > 0
  int dim = 1;                // N

  void validate() const {
    if (yield_stress <= 0.0) throw std::invalid_argument("norton-hoff: yield_stress must be > 0");
    if (exponent <= 0.0) throw std::invalid_argument("norton-hoff: exponent must be > 0");
    if (dim < 1) throw std::invalid_argument("norton-hoff: dim must be >= 1");
  }
};

// Proper convex function given by an evaluator; +inf encodes points outside
// the effective domain.
struct ConvexFn {
  std::function<double(const Eigen::VectorXd&)> f;
  int dim = 1;
  double domain_radius = std::numeric_limits<double>::infinity();
  bool smooth = true;

  double operator()(const Eigen::VectorXd& x) const { return f(x); }
};

struct CoercivityCertificate {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double m_bound = 0.0;
};

// Pointwise maximal monotone law g with dual growth exponents 1<q<=2<=p.
class MonotoneLaw {
 public:
  enum class Kind { norton_hoff, linear_psd, subdifferential };

  static MonotoneLaw norton_hoff(const NortonHoffParams& params, double p = 2.0, double q = 2.0) {
    params.validate();
    MonotoneLaw law;
    law.kind_ = Kind::norton_hoff;
    law.nh_ = params;
    law.dim_ = params.dim;
    law.set_exponents(p, q);
    return law;
  }

  static MonotoneLaw linear_psd(const Eigen::MatrixXd& m, double p = 2.0, double q = 2.0) {
    if (m.rows() != m.cols()) throw std::invalid_argument("linear_psd: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("linear_psd: matrix must be positive semidefinite");
    MonotoneLaw law;
    law.kind_ = Kind::linear_psd;
    law.m_ = m;
    law.dim_ = static_cast<int>(m.rows());
    law.set_exponents(p, q);
    return law;
  }

  static MonotoneLaw subdifferential(const ConvexFn& phi, double p = 2.0, double q = 2.0) {
    MonotoneLaw law;
    law.kind_ = Kind::subdifferential;
    law.phi_ = phi;
    law.dim_ = phi.dim;
    law.set_exponents(p, q);
    return law;
  }

  static MonotoneLaw zero(int dim, double p = 2.0, double q = 2.0) {
    return linear_psd(Eigen::MatrixXd::Zero(dim, dim), p, q);
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double p() const { return p_; }
  double q() const { return q_; }
  const NortonHoffParams& norton_hoff_params() const { return nh_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const ConvexFn& phi() const { return phi_; }

 private:
  void set_exponents(double p, double q) {
    if (!(1.0 < q && q <= 2.0 && 2.0 <= p) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
      throw std::invalid_argument("monotone law: exponents must satisfy 1<q<=2<=p, 1/p+1/q=1");
    p_ = p;
    q_ = q;
  }

  Kind kind_ = Kind::linear_psd;
  NortonHoffParams nh_;
  Eigen::MatrixXd m_;
  ConvexFn phi_;
  int dim_ = 1;
  double p_ = 2.0, q_ = 2.0;
};

namespace detail {

inline double nh_flow(double s, double sigma_y, double r) {
  return s > sigma_y ? std::pow(s - sigma_y, r) : 0.0;
}

// Minimal-norm subgradient via the Moreau-envelope gradient at small lambda.
inline Eigen::VectorXd prox_of(const ConvexFn& phi, double lambda, const Eigen::VectorXd& w,
                               double tol);

inline Eigen::VectorXd subgradient_selection(const ConvexFn& phi, const Eigen::VectorXd& v) {
  if (phi.smooth) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXd grad(n);
    const double h = 1e-6 * (1.0 + v.norm());
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd a = v, b = v;
      a[i] += h;
      b[i] -= h;
      grad[i] = (phi(a) - phi(b)) / (2.0 * h);
    }
    return grad;
  }
  const double lambda = 1e-7 * (1.0 + v.norm());
  Eigen::VectorXd p = prox_of(phi, lambda, v, 1e-14);
  return (v - p) / lambda;
}

}  // namespace detail

// Selection of g(v). Norton-Hoff: [|v|-sigma_y]_+^r v/|v|; linear: Mv;
// subdifferential: minimal-norm subgradient.
inline Eigen::VectorXd eval_g(const MonotoneLaw& law, const Eigen::VectorXd& v) {
  switch (law.kind()) {
    case MonotoneLaw::Kind::linear_psd:
      return law.matrix() * v;
    case MonotoneLaw::Kind::norton_hoff: {
      const auto& nh = law.norton_hoff_params();
      const double s = v.norm();
      if (s <= nh.yield_stress) return Eigen::VectorXd::Zero(v.size());
      return (detail::nh_flow(s, nh.yield_stress, nh.exponent) / s) * v;
    }
    case MonotoneLaw::Kind::subdifferential:
      return detail::subgradient_selection(law.phi(), v);
  }
  throw std::logic_error("unreachable");
}

// Resolvent: the unique v with v + h g(v) = w.
inline Eigen::VectorXd resolvent(const MonotoneLaw& law, double h, const Eigen::VectorXd& w) {
  if (h <= 0.0) throw std::invalid_argument("resolvent: step h must be > 0");
  switch (law.kind()) {
    case MonotoneLaw::Kind::linear_psd: {
      const int n = law.dim();
      return (Eigen::MatrixXd::Identity(n, n) + h * law.matrix()).partialPivLu().solve(w);
    }
    case MonotoneLaw::Kind::norton_hoff: {
      const auto& nh = law.norton_hoff_params();
      const double wn = w.norm();
      if (wn <= nh.yield_stress) return w;
      // radial scalar equation s + h [s - sigma_y]_+^r = |w|, strictly increasing
      double lo = nh.yield_stress, hi = wn;
      auto res = [&](double s) { return s + h * detail::nh_flow(s, nh.yield_stress, nh.exponent) - wn; };
      double s = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double f = res(s);
        if (std::abs(f) <= 1e-14 * (1.0 + wn)) break;
        if (f > 0.0) hi = s; else lo = s;
        const double dfds = 1.0 + (s > nh.yield_stress
                                       ? h * nh.exponent * std::pow(s - nh.yield_stress, nh.exponent - 1.0)
                                       : 0.0);
        double sn = s - f / dfds;
        s = (sn > lo && sn < hi) ? sn : 0.5 * (lo + hi);
        if (it == 199)
          throw std::runtime_error("resolvent: radial root-find did not converge");
      }
      return (s / wn) * w;
    }
    case MonotoneLaw::Kind::subdifferential:
      return detail::prox_of(law.phi(), h, w, 1e-13 * (1.0 + w.norm()));
  }
  throw std::logic_error("unreachable");
}

namespace detail {

inline Eigen::VectorXd prox_of(const ConvexFn& phi, double lambda, const Eigen::VectorXd& w,
                               double tol) {
  // minimize 0.5|v-w|^2 + lambda*phi(v) by damped Newton with numeric derivatives
  const int n = static_cast<int>(w.size());
  auto grad_phi = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd g(n);
    const double h = 1e-6 * (1.0 + v.norm());
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd a = v, b = v;
      a[i] += h;
      b[i] -= h;
      g[i] = (phi(a) - phi(b)) / (2.0 * h);
    }
    return g;
  };
  auto F = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v - w + lambda * grad_phi(v); };
  auto J = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
    const double h = 1e-5 * (1.0 + v.norm());
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd a = v, b = v;
      a[i] += h;
      b[i] -= h;
      jac.col(i) += lambda * (grad_phi(a) - grad_phi(b)) / (2.0 * h);
    }
    return 0.5 * (jac + jac.transpose());
  };
  NewtonResult r = damped_newton(F, J, w, tol, 100);
  return r.x;
}

// analytic Jacobian of the Norton-Hoff selection (semismooth at the yield surface)
inline Eigen::MatrixXd nh_jacobian(const NortonHoffParams& nh, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  const double s = v.norm();
  if (s <= nh.yield_stress || s < 1e-300) return Eigen::MatrixXd::Zero(n, n);
  const double flow = nh_flow(s, nh.yield_stress, nh.exponent);
  const double dflow = nh.exponent * std::pow(s - nh.yield_stress, nh.exponent - 1.0);
  const Eigen::MatrixXd dir = (v / s) * (v / s).transpose();
  return (flow / s) * (Eigen::MatrixXd::Identity(n, n) - dir) + dflow * dir;
}

inline Eigen::MatrixXd g_jacobian(const MonotoneLaw& law, const Eigen::VectorXd& v) {
  switch (law.kind()) {
    case MonotoneLaw::Kind::linear_psd:
      return law.matrix();
    case MonotoneLaw::Kind::norton_hoff:
      return nh_jacobian(law.norton_hoff_params(), v);
    case MonotoneLaw::Kind::subdifferential: {
      const int n = law.dim();
      Eigen::MatrixXd jac(n, n);
      const double h = 1e-5 * (1.0 + v.norm());
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd a = v, b = v;
        a[i] += h;
        b[i] -= h;
        jac.col(i) = (eval_g(law, a) - eval_g(law, b)) / (2.0 * h);
      }
      return jac;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// Weighted resolvent: the unique v solving v + h M g(v) = w for psd weight M.
// This is the kernel of the implicit internal-variable update.
inline Eigen::VectorXd weighted_resolvent(const MonotoneLaw& law, double h,
                                          const Eigen::MatrixXd& weight,
                                          const Eigen::VectorXd& w) {
  if (h <= 0.0) throw std::invalid_argument("weighted_resolvent: step h must be > 0");
  const int n = law.dim();
  const double tol = 1e-13 * (1.0 + w.norm());

  const bool scalar_weight =
      (weight - weight(0, 0) * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-14;
  if (scalar_weight) {
    const double mu = weight(0, 0);
    if (mu <= 0.0) return w;
    return resolvent(law, h * mu, w);
  }
  if (law.kind() == MonotoneLaw::Kind::linear_psd) {
    return (Eigen::MatrixXd::Identity(n, n) + h * weight * law.matrix()).partialPivLu().solve(w);
  }
  auto F = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v + h * weight * eval_g(law, v) - w;
  };
  auto J = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Identity(n, n) + h * weight * detail::g_jacobian(law, v);
  };
  NewtonResult r = damped_newton(F, J, w, tol, 200);
  if (!r.converged)
    throw std::runtime_error("weighted_resolvent: Newton iteration failed, residual " +
                             std::to_string(r.residual));
  return r.x;
}

// Result of a numeric supremum; unbounded means the value was still growing
// at the search-radius boundary.
struct SupResult {
  double value = 0.0;
  bool unbounded = false;
};

// Legendre-Fenchel conjugate phi*(v*) = sup_x <v*,x> - phi(x) over |x| <= radius.
inline SupResult fenchel_conjugate(const ConvexFn& phi, const Eigen::VectorXd& v_star,
                                   double search_radius) {
  const int n = phi.dim;
  auto obj = [&](const Eigen::VectorXd& x) -> double {
    if (x.norm() > search_radius) return -1e300;
    const double fx = phi(x);
    if (!std::isfinite(fx)) return -1e300;
    return v_star.dot(x) - fx;
  };
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Zero(n));
  if (v_star.norm() > 1e-14) {
    starts.push_back(0.25 * search_radius * v_star.normalized());
    starts.push_back(0.75 * search_radius * v_star.normalized());
    starts.push_back(-0.5 * search_radius * v_star.normalized());
  }
  CounterRng rng(0x7e5ca1);
  for (int i = 0; i < 4; ++i) starts.push_back(rng.ball(i, n, 0.9 * search_radius));
  NelderMeadResult best = multistart_max(obj, starts, 0.2 * search_radius);
  SupResult res{best.value, false};
  if (best.x.norm() > 0.97 * search_radius) {
    // still ascending radially at the boundary -> sup likely lives outside
    const Eigen::VectorXd dir = best.x.normalized();
    const double step = 1e-5 * search_radius;
    const double inner = obj(best.x - step * dir);
    if (best.value - inner > 1e-12 * (1.0 + std::abs(best.value))) res.unbounded = true;
  }
  return res;
}

namespace detail {

// Fitzpatrick objective at a graph point v0: <v*, v0> - <g(v0), v0 - v>.
inline double fitz_obj(const MonotoneLaw& law, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& v_star, const Eigen::VectorXd& v0) {
  return v_star.dot(v0) - eval_g(law, v0).dot(v0 - v);
}

inline SupResult fitzpatrick_norton_hoff(const MonotoneLaw& law, const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& v_star, double radius) {
  // Radial symmetry puts the maximizer in span{v, v*}; reduce to 2 coordinates.
  const int n = law.dim();
  Eigen::VectorXd e1, e2;
  if (v.norm() > 1e-14) {
    e1 = v.normalized();
  } else if (v_star.norm() > 1e-14) {
    e1 = v_star.normalized();
  } else {
    e1 = Eigen::VectorXd::Unit(n, 0);
  }
  Eigen::VectorXd w2 = v_star - v_star.dot(e1) * e1;
  if (n >= 2) {
    if (w2.norm() > 1e-12) {
      e2 = w2.normalized();
    } else {
      e2 = Eigen::VectorXd::Unit(n, 0);
      e2 -= e2.dot(e1) * e1;
      if (e2.norm() < 0.5) {
        e2 = Eigen::VectorXd::Unit(n, std::min(1, n - 1));
        e2 -= e2.dot(e1) * e1;
      }
      e2.normalize();
    }
  }
  const int rdim = n >= 2 ? 2 : 1;
  auto lift = [&](const Eigen::VectorXd& ab) -> Eigen::VectorXd {
    Eigen::VectorXd x = ab[0] * e1;
    if (rdim == 2) x += ab[1] * e2;
    return x;
  };
  auto obj = [&](const Eigen::VectorXd& ab) -> double {
    if (ab.norm() > radius) return -1e300;
    return fitz_obj(law, v, v_star, lift(ab));
  };
  const double sy = law.norton_hoff_params().yield_stress;
  std::vector<Eigen::VectorXd> starts;
  auto proj = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd ab(rdim);
    ab[0] = x.dot(e1);
    if (rdim == 2) ab[1] = x.dot(e2);
    return ab;
  };
  starts.push_back(proj(v));
  starts.push_back(Eigen::VectorXd::Zero(rdim));
  starts.push_back(proj(v) * (sy / std::max(v.norm(), 1e-12)));
  if (v_star.norm() > 1e-14) starts.push_back(proj(v + v_star));
  starts.push_back(Eigen::VectorXd::Constant(rdim, sy));
  NelderMeadResult best = multistart_max(obj, starts, 0.3 * (1.0 + sy + v.norm() + v_star.norm()));
  SupResult res{best.value, false};
  if (best.x.norm() > 0.97 * radius) res.unbounded = true;
  return res;
}

}  // namespace detail

// Fitzpatrick function f_g(v, v*) = sup over graph points within search_radius.
inline SupResult fitzpatrick(const MonotoneLaw& law, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& v_star, double search_radius) {
  switch (law.kind()) {
    case MonotoneLaw::Kind::linear_psd: {
      // concave quadratic in v0: exact stationary point 2 M_s v0 = v* + M^T v
      const int n = law.dim();
      const Eigen::MatrixXd ms = 0.5 * (law.matrix() + law.matrix().transpose());
      const Eigen::VectorXd rhs = v_star + law.matrix().transpose() * v;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(2.0 * ms);
      Eigen::VectorXd v0 = ldlt.solve(rhs);
      if ((2.0 * ms * v0 - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
        // rhs not in the range of M: sup is +infinity along the kernel
        return {1e300, true};
      }
      (void)n;
      double value = detail::fitz_obj(law, v, v_star, v0);
      if (v0.norm() > search_radius) {
        // caller's radius does not reach the analytic maximizer
        Eigen::VectorXd clipped = v0 * (search_radius / v0.norm());
        return {detail::fitz_obj(law, v, v_star, clipped), true};
      }
      return {value, false};
    }
    case MonotoneLaw::Kind::norton_hoff:
      return detail::fitzpatrick_norton_hoff(law, v, v_star, search_radius);
    case MonotoneLaw::Kind::subdifferential: {
      auto obj = [&](const Eigen::VectorXd& v0) -> double {
        if (v0.norm() > search_radius) return -1e300;
        return detail::fitz_obj(law, v, v_star, v0);
      };
      std::vector<Eigen::VectorXd> starts{v, Eigen::VectorXd::Zero(law.dim()), v + v_star};
      CounterRng rng(0xf172);
      for (int i = 0; i < 3; ++i) starts.push_back(rng.ball(i, law.dim(), 0.8 * search_radius));
      NelderMeadResult best =
          multistart_max(obj, starts, 0.3 * (1.0 + v.norm() + v_star.norm()));
      SupResult res{best.value, false};
      if (best.x.norm() > 0.97 * search_radius) res.unbounded = true;
      return res;
    }
  }
  throw std::logic_error("unreachable");
}

inline double default_fitzpatrick_radius(const MonotoneLaw& law, const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& v_star) {
  double base = 10.0 * (1.0 + v.norm() + v_star.norm());
  if (law.kind() == MonotoneLaw::Kind::norton_hoff)
    base += 10.0 * law.norton_hoff_params().yield_stress;
  return base;
}

// Inclusion residual: max(f_g(v,v*) - <v*,v>, 0) after tolerance clamp.
// Zero (within tolerance) iff v* lies in g(v).
inline double fitzpatrick_gap(const MonotoneLaw& law, const Eigen::VectorXd& v,
                              const Eigen::VectorXd& v_star) {
  double radius = default_fitzpatrick_radius(law, v, v_star);
  SupResult f = fitzpatrick(law, v, v_star, radius);
  for (int grow = 0; grow < 6 && f.unbounded && law.kind() == MonotoneLaw::Kind::norton_hoff;
       ++grow) {
    radius *= 4.0;
    f = fitzpatrick(law, v, v_star, radius);
  }
  if (f.unbounded) throw std::runtime_error("fitzpatrick_gap: supremum unbounded");
  const double gap = f.value - v_star.dot(v);
  return gap <= 1e-8 ? 0.0 : gap;
}

// Checks certificate inequality (v, v*) >= m + a1 |v*|^q + a2 |v|^p on a cloud.
inline bool certificate_holds(const MonotoneLaw& law, const CoercivityCertificate& cert,
                              double cloud_radius, int n_samples, std::uint64_t seed = 17,
                              double slack = 1e-10) {
  CounterRng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd v = rng.ball(i, law.dim(), cloud_radius);
    const Eigen::VectorXd vs = eval_g(law, v);
    const double lhs = v.dot(vs);
    const double rhs = cert.m_bound + cert.alpha1 * std::pow(vs.norm(), law.q()) +
                       cert.alpha2 * std::pow(v.norm(), law.p());
    if (lhs < rhs - slack) return false;
  }
  return true;
}

// Searches (alpha1, alpha2, m) making the coercivity inequality hold on a
// sampled graph cloud; nullopt when no alphas >= 1e-6 admit m >= m_lower.
inline std::optional<CoercivityCertificate> certify_coercivity(
    const MonotoneLaw& law, double cloud_radius, int n_samples,
    double m_lower = -std::numeric_limits<double>::infinity()) {
  CounterRng rng(29);
  std::vector<Eigen::VectorXd> cloud(n_samples), images(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    cloud[i] = rng.ball(i, law.dim(), cloud_radius);
    images[i] = eval_g(law, cloud[i]);
  }
  for (double alpha = 1.0; alpha >= 1e-6; alpha *= 0.5) {
    double m_req = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double margin = cloud[i].dot(images[i]) -
                            alpha * std::pow(images[i].norm(), law.q()) -
                            alpha * std::pow(cloud[i].norm(), law.p());
      m_req = std::min(m_req, margin);
    }
    if (m_req >= m_lower) {
      CoercivityCertificate cert{alpha, alpha, std::min(m_req, 0.0)};
      if (cert.m_bound < m_lower) cert.m_bound = m_lower;
      if (certificate_holds(law, cert, cloud_radius, n_samples, 83)) return cert;
    }
  }
  return std::nullopt;
}

// --- pointwise application over discrete fields -----------------------------

// A field of vectors sampled at quadrature points with weights; column i is
// the value at point i.
struct QuadField {
  Eigen::MatrixXd values;   // k x n
  Eigen::VectorXd weights;  // n

  int points() const { return static_cast<int>(values.cols()); }
};

inline double field_pairing(const QuadField& a, const QuadField& b) {
  if (a.points() != b.points()) throw std::invalid_argument("field_pairing: grid mismatch");
  double s = 0.0;
  for (int i = 0; i < a.points(); ++i) s += a.weights[i] * a.values.col(i).dot(b.values.col(i));
  return s;
}

// A law per point, stored as phase indices into a palette of laws.
struct LawField {
  std::vector<int> phase;
  std::vector<MonotoneLaw> laws;

  const MonotoneLaw& at(int i) const { return laws[phase[i]]; }
  int points() const { return static_cast<int>(phase.size()); }

  static LawField constant(const MonotoneLaw& law, int n) {
    LawField f;
    f.laws = {law};
    f.phase.assign(n, 0);
    return f;
  }
};

// Canonical extension: pointwise application of the law field.
inline QuadField canonical_apply(const LawField& laws, const QuadField& v) {
  if (laws.points() != v.points())
    throw std::invalid_argument("canonical_apply: grid mismatch");
  QuadField out;
  out.weights = v.weights;
  out.values.resize(v.values.rows(), v.values.cols());
  for (int i = 0; i < v.points(); ++i)
    out.values.col(i) = eval_g(laws.at(i), v.values.col(i));
  return out;
}

struct ConvexFnField {
  std::vector<int> phase;
  std::vector<ConvexFn> fns;

  const ConvexFn& at(int i) const { return fns[phase[i]]; }
  int points() const { return static_cast<int>(phase.size()); }

  static ConvexFnField constant(const ConvexFn& fn, int n) {
    ConvexFnField f;
    f.fns = {fn};
    f.phase.assign(n, 0);
    return f;
  }
};

// I_phi(v) = integral of phi(v(x)).
inline double integral_functional(const ConvexFnField& phis, const QuadField& v) {
  if (phis.points() != v.points())
    throw std::invalid_argument("integral_functional: grid mismatch");
  double s = 0.0;
  for (int i = 0; i < v.points(); ++i) s += v.weights[i] * phis.at(i)(v.values.col(i));
  return s;
}

// (I_phi)* (v*) = integral of phi*(v*(x)), each conjugate computed numerically.
inline double conjugate_integral_functional(const ConvexFnField& phis, const QuadField& v_star,
                                            double search_radius) {
  if (phis.points() != v_star.points())
    throw std::invalid_argument("conjugate_integral_functional: grid mismatch");
  double s = 0.0;
  for (int i = 0; i < v_star.points(); ++i) {
    SupResult c = fenchel_conjugate(phis.at(i), v_star.values.col(i), search_radius);
    if (c.unbounded)
      throw std::runtime_error("conjugate_integral_functional: unbounded conjugate at a point");
    s += v_star.weights[i] * c.value;
  }
  return s;
}

}  // namespace homog
