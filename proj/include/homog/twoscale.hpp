#pragma once

#include <functional>
#include <stdexcept>
#include <vector>
#include <cmath>

#include <Eigen/Dense>

#include "homog/convex.hpp"
#include "homog/grid.hpp"
#include "homog/microstructure.hpp"

namespace homog {

// Diagnostics that probe oscillating fields against separated test functions
// psi_i(x) * g_j(omega): spatial bumps times microstructure observables.

using Observable = std::function<double(const CoefficientSet&)>;

struct TestFunctionDictionary {
  std::vector<std::function<double(const Eigen::VectorXd&)>> bumps;
  std::vector<Observable> observables;
  std::vector<std::string> bump_names;
  std::vector<std::string> observable_names;

  int size() const {
    return static_cast<int>(bumps.size() * observables.size());
  }

  // 4 tensor-cosine bumps on the unit box and 6 coefficient observables.
  static TestFunctionDictionary standard(int dim) {
    TestFunctionDictionary d;
    auto bump = [dim](Eigen::VectorXd c, double w) {
      return [c = std::move(c), w, dim](const Eigen::VectorXd& x) {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) {
          const double t = (x[a] - c[a]) / w;
          if (std::abs(t) >= 1.0) return 0.0;
          v *= 0.5 * (1.0 + std::cos(M_PI * t));
        }
        return v;
      };
    };
    const double q1 = 0.35, q2 = 0.65;
    std::vector<Eigen::VectorXd> centers;
    centers.push_back(Eigen::VectorXd::Constant(dim, 0.5));
    centers.push_back(Eigen::VectorXd::Constant(dim, q1));
    centers.push_back(Eigen::VectorXd::Constant(dim, q2));
    {
      Eigen::VectorXd c = Eigen::VectorXd::Constant(dim, q1);
      c[0] = q2;
      centers.push_back(c);
    }
    const double widths[4] = {0.45, 0.3, 0.3, 0.25};
    const char* bn[4] = {"bump-center-wide", "bump-lowcorner", "bump-highcorner", "bump-mixed"};
    for (int i = 0; i < 4; ++i) {
      d.bumps.push_back(bump(centers[i], widths[i]));
      d.bump_names.push_back(bn[i]);
    }
    d.observables = {
        [](const CoefficientSet& c) { return 1.0; },
        [](const CoefficientSet& c) { return c.alpha; },
        [](const CoefficientSet& c) { return c.beta; },
        [](const CoefficientSet& c) { return c.stiffness.trace(); },
        [](const CoefficientSet& c) { return c.hardening.trace(); },
        [](const CoefficientSet& c) { return c.flow_params.yield_stress; },
    };
    d.observable_names = {"one", "alpha", "beta", "stiffness-trace", "hardening-trace", "yield"};
    return d;
  }
};

// Pairing of a deterministic field f(x) with every dictionary entry at scale
// eta: P_ij = int f(x) psi_i(x) g_j(tau_{x/eta} omega) dx over the unit box.
// Midpoint quadrature resolving every eta-cell.
inline Eigen::MatrixXd pair_against_dictionary(
    const Realization& real, double eta, const TestFunctionDictionary& dict,
    const std::function<double(const Eigen::VectorXd&)>& f, int points_per_cell = 2) {
  const int d = real.spec().dim;
  const double target = eta * real.spec().cell_size / points_per_cell;
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < d; ++a) n[a] = std::max(1, static_cast<int>(std::ceil(1.0 / target)));
  const int nb = static_cast<int>(dict.bumps.size());
  const int no = static_cast<int>(dict.observables.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(nb, no);
  Eigen::VectorXd x(d);
  double count = 0.0;
  for (int i = 0; i < n[0]; ++i) {
    x[0] = (i + 0.5) / n[0];
    for (int j = 0; j < (d > 1 ? n[1] : 1); ++j) {
      if (d > 1) x[1] = (j + 0.5) / n[1];
      for (int k = 0; k < (d > 2 ? n[2] : 1); ++k) {
        if (d > 2) x[2] = (k + 0.5) / n[2];
        const CoefficientSet& cs = real.evaluate_at(x, eta);
        const double fx = f(x);
        for (int bi = 0; bi < nb; ++bi) {
          const double pb = fx * dict.bumps[bi](x);
          if (pb == 0.0) continue;
          for (int oi = 0; oi < no; ++oi) p(bi, oi) += pb * dict.observables[oi](cs);
        }
        count += 1.0;
      }
    }
  }
  return p / count;
}

// Separated limit: (int f psi_i) * E[g_j].
inline Eigen::MatrixXd dictionary_limit(const TestFunctionDictionary& dict, const FieldSpec& spec,
                                        const std::function<double(const Eigen::VectorXd&)>& f,
                                        int quad_n = 256) {
  const int d = spec.dim;
  const int nb = static_cast<int>(dict.bumps.size());
  const int no = static_cast<int>(dict.observables.size());
  Eigen::VectorXd spatial = Eigen::VectorXd::Zero(nb);
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < d; ++a) n[a] = quad_n;
  Eigen::VectorXd x(d);
  double count = 0.0;
  for (int i = 0; i < n[0]; ++i) {
    x[0] = (i + 0.5) / n[0];
    for (int j = 0; j < (d > 1 ? n[1] : 1); ++j) {
      if (d > 1) x[1] = (j + 0.5) / n[1];
      for (int k = 0; k < (d > 2 ? n[2] : 1); ++k) {
        if (d > 2) x[2] = (k + 0.5) / n[2];
        const double fx = f(x);
        for (int bi = 0; bi < nb; ++bi) spatial[bi] += fx * dict.bumps[bi](x);
        count += 1.0;
      }
    }
  }
  spatial /= count;
  Eigen::VectorXd mean_obs = Eigen::VectorXd::Zero(no);
  for (std::size_t ph = 0; ph < spec.phase_values.size(); ++ph)
    for (int oi = 0; oi < no; ++oi)
      mean_obs[oi] += spec.phase_probabilities[ph] * dict.observables[oi](spec.phase_values[ph]);
  return spatial * mean_obs.transpose();
}

// --- gradient splitting at the intermediate scale sqrt(eta) -----------------

struct GradientSplit {
  Eigen::MatrixXd coarse;    // blockwise averages, same layout as the input
  Eigen::MatrixXd oscillatory;
  double coarse_norm = 0.0;     // L2 norms (elementwise quadrature)
  double oscillatory_norm = 0.0;
  double cross_pairing = 0.0;   // exactly 0 for an L2 block projection
  int block = 1;                // block edge length in elements
};

// Splits a per-element field into its average over blocks of edge ~ sqrt(eta)
// (in physical units) and the remainder. Block averaging is an orthogonal L2
// projection, so the parts are exactly uncorrelated.
inline GradientSplit split_at_scale(const Grid& g, const Eigen::MatrixXd& field, double eta) {
  if (field.cols() != g.n_elems())
    throw std::invalid_argument("split_at_scale: field/grid mismatch");
  const int d = g.dim;
  GradientSplit sp;
  const double target = std::sqrt(eta);
  sp.block = std::max(1, static_cast<int>(std::round(target / g.spacing[0])));
  sp.coarse.setZero(field.rows(), field.cols());
  // accumulate block sums
  std::array<int, 3> nblocks{1, 1, 1};
  for (int a = 0; a < d; ++a)
    nblocks[a] = (g.cells[a] + sp.block - 1) / sp.block;
  const int total_blocks = nblocks[0] * nblocks[1] * nblocks[2];
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(field.rows(), total_blocks);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(total_blocks);
  auto block_of = [&](int e) {
    const auto c = g.elem_coords(e);
    int idx = 0, stride = 1;
    for (int a = 0; a < d; ++a) {
      idx += (c[a] / sp.block) * stride;
      stride *= nblocks[a];
    }
    return idx;
  };
  for (int e = 0; e < g.n_elems(); ++e) {
    const int b = block_of(e);
    sums.col(b) += field.col(e);
    counts[b] += 1.0;
  }
  for (int e = 0; e < g.n_elems(); ++e) {
    const int b = block_of(e);
    sp.coarse.col(e) = sums.col(b) / counts[b];
  }
  sp.oscillatory = field - sp.coarse;
  const double ve = g.elem_volume();
  sp.coarse_norm = std::sqrt(ve) * sp.coarse.norm();
  sp.oscillatory_norm = std::sqrt(ve) * sp.oscillatory.norm();
  sp.cross_pairing = ve * sp.coarse.cwiseProduct(sp.oscillatory).sum();
  return sp;
}

// --- convex lower-bound (liminf) check --------------------------------------

struct LiminfCheck {
  double functional_value = 0.0;  // I_phi(v_eta)
  double lower_bound = 0.0;       // <v_eta, w> - I_phi*(w)
  double slack() const { return functional_value - lower_bound; }
};

// Duality lower bound for the integral functional: for any test field w,
//   I_phi(v) >= <v, w> - I_phi*(w).
// The bound is tight when w is a pointwise subgradient at the limit field, so
// evaluating it along a sequence v_eta exhibits the lower-semicontinuity tail.
inline LiminfCheck liminf_check(const ConvexFnField& phis, const QuadField& v_eta,
                                const QuadField& w, double conjugate_radius) {
  LiminfCheck chk;
  chk.functional_value = integral_functional(phis, v_eta);
  chk.lower_bound = field_pairing(v_eta, w) - conjugate_integral_functional(phis, w, conjugate_radius);
  return chk;
}

// --- time-dependent pairings ------------------------------------------------

// Trapezoid-in-time pairing of a per-element scalar time series against
// psi_i(elem center) * g_j(material at elem): returns the dictionary matrix.
inline Eigen::MatrixXd time_dependent_pairing(
    const Grid& g, const Realization& real, double eta, const TestFunctionDictionary& dict,
    const std::vector<double>& times,
    const std::function<Eigen::VectorXd(int step)>& elem_values,
    const std::function<double(double)>& theta) {
  const int nb = static_cast<int>(dict.bumps.size());
  const int no = static_cast<int>(dict.observables.size());
  // cache the spatial factors per element
  Eigen::MatrixXd psi(nb, g.n_elems());
  Eigen::MatrixXd obs(no, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) {
    const Eigen::VectorXd x = g.elem_center(e);
    for (int bi = 0; bi < nb; ++bi) psi(bi, e) = dict.bumps[bi](x);
    const CoefficientSet& cs = real.evaluate_at(x, eta);
    for (int oi = 0; oi < no; ++oi) obs(oi, e) = dict.observables[oi](cs);
  }
  const double ve = g.elem_volume();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nb, no);
  Eigen::MatrixXd prev_snap;
  for (std::size_t n = 0; n < times.size(); ++n) {
    const Eigen::VectorXd vals = elem_values(static_cast<int>(n));
    Eigen::MatrixXd snap = Eigen::MatrixXd::Zero(nb, no);
    for (int e = 0; e < g.n_elems(); ++e)
      for (int bi = 0; bi < nb; ++bi) {
        if (psi(bi, e) == 0.0) continue;
        for (int oi = 0; oi < no; ++oi)
          snap(bi, oi) += ve * vals[e] * psi(bi, e) * obs(oi, e);
      }
    snap *= theta(times[n]);
    if (n > 0) acc += 0.5 * (times[n] - times[n - 1]) * (snap + prev_snap);
    prev_snap = snap;
  }
  return acc;
}

}  // namespace homog
