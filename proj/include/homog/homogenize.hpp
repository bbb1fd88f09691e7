#pragma once

#include <functional>
#include <stdexcept>
#include <vector>
#include <cmath>

#include <Eigen/Dense>

#include "homog/grid.hpp"
#include "homog/microstructure.hpp"
#include "homog/rothe.hpp"

namespace homog {

// Effective-coefficient extraction from periodic cell problems over an
// ensemble of realizations, plus a macroscopic solver that reuses the
// time-stepping machinery with the effective coefficients.

struct EffectiveTensorReport {
  Eigen::MatrixXd mean;      // ensemble mean of the cell effective tensors
  Eigen::MatrixXd voigt;     // arithmetic phase mean
  Eigen::MatrixXd reuss;     // harmonic phase mean
  double spread = 0.0;       // max over samples of ||C_k - mean||_F / ||mean||_F
  int samples = 0;
  std::vector<Eigen::MatrixXd> per_sample;
};

inline Eigen::MatrixXd voigt_mean(const FieldSpec& spec) {
  const int s = sym_dim(spec.dim);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(s, s);
  for (std::size_t i = 0; i < spec.phase_values.size(); ++i)
    v += spec.phase_probabilities[i] * spec.phase_values[i].stiffness;
  return v;
}

inline Eigen::MatrixXd reuss_mean(const FieldSpec& spec) {
  const int s = sym_dim(spec.dim);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(s, s);
  for (std::size_t i = 0; i < spec.phase_values.size(); ++i)
    v += spec.phase_probabilities[i] * spec.phase_values[i].stiffness.inverse();
  return v.inverse();
}

// Periodic cell problem on an n^d element grid; the realization is sampled at
// eta = 1/n so one grid element covers one microstructure cell.
inline Eigen::MatrixXd sample_effective_tensor(const FieldSpec& spec, std::uint64_t seed,
                                               int cells_per_side, double cg_tol = 1e-12) {
  const Grid g = Grid::periodic_box(spec.dim, cells_per_side);
  Realization real(spec, seed);
  const double eta = 1.0 / (cells_per_side * spec.cell_size);
  std::vector<Eigen::MatrixXd> stiff(g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e)
    stiff[e] = real.evaluate_at(g.elem_center(e), eta).stiffness;
  ElasticitySystem sys(g, std::move(stiff));
  return cell_effective_tensor(sys, cg_tol);
}

inline EffectiveTensorReport effective_tensor_ensemble(const FieldSpec& spec,
                                                       const std::vector<std::uint64_t>& seeds,
                                                       int cells_per_side,
                                                       double cg_tol = 1e-12) {
  if (seeds.empty()) throw std::invalid_argument("effective_tensor_ensemble: need seeds");
  EffectiveTensorReport rep;
  rep.samples = static_cast<int>(seeds.size());
  rep.voigt = voigt_mean(spec);
  rep.reuss = reuss_mean(spec);
  const int s = sym_dim(spec.dim);
  rep.mean = Eigen::MatrixXd::Zero(s, s);
  for (std::uint64_t seed : seeds) {
    rep.per_sample.push_back(sample_effective_tensor(spec, seed, cells_per_side, cg_tol));
    rep.mean += rep.per_sample.back();
  }
  rep.mean /= rep.samples;
  const double scale = std::max(rep.mean.norm(), 1e-300);
  for (const auto& c : rep.per_sample)
    rep.spread = std::max(rep.spread, (c - rep.mean).norm() / scale);
  return rep;
}

// True iff reuss <= c <= voigt in quadratic-form order (up to tol).
inline bool within_bounds(const EffectiveTensorReport& rep, const Eigen::MatrixXd& c,
                          double tol = 1e-9) {
  const Eigen::MatrixXd upper = rep.voigt - c;
  const Eigen::MatrixXd lower = c - rep.reuss;
  const double scale = rep.voigt.norm();
  return spd_bracket(0.5 * (upper + upper.transpose())).alpha >= -tol * scale &&
         spd_bracket(0.5 * (lower + lower.transpose())).alpha >= -tol * scale;
}

// Effective single-phase coefficients: cell-problem stiffness, probability-
// averaged hardening and flow parameters.
inline CoefficientSet effective_coefficients(const FieldSpec& spec, const Eigen::MatrixXd& c_eff) {
  CoefficientSet cs;
  cs.stiffness = c_eff;
  const int n = static_cast<int>(c_eff.rows());
  cs.hardening = Eigen::MatrixXd::Zero(n, n);
  cs.flow_params = spec.phase_values.front().flow_params;
  cs.flow_params.yield_stress = 0.0;
  cs.flow_params.exponent = 0.0;
  for (std::size_t i = 0; i < spec.phase_values.size(); ++i) {
    const double p = spec.phase_probabilities[i];
    cs.hardening += p * spec.phase_values[i].hardening;
    cs.flow_params.yield_stress += p * spec.phase_values[i].flow_params.yield_stress;
    cs.flow_params.exponent += p * spec.phase_values[i].flow_params.exponent;
  }
  cs.flow_params.dim = n;
  const EllipticityBracket br = spd_bracket(cs.stiffness);
  cs.alpha = br.alpha;
  cs.beta = br.beta;
  return cs;
}

struct HomogenizedSolution {
  RotheTrajectory trajectory;
  CoefficientSet coefficients;
};

// Macroscopic problem: same grid / load / scheme, coefficients replaced by the
// effective ones.
inline HomogenizedSolution solve_homogenized(const Grid& g, const FieldSpec& spec,
                                             const Eigen::MatrixXd& c_eff, double inv_m_reg,
                                             const LoadProgram& load, const RotheConfig& cfg) {
  HomogenizedSolution sol;
  sol.coefficients = effective_coefficients(spec, c_eff);
  MaterialAssembly mat = assemble_uniform(g, sol.coefficients, inv_m_reg);
  ElasticitySystem sys(g, mat.stiffness);
  sol.trajectory = run_trajectory(sys, mat, load, cfg);
  return sol;
}

struct MicroMacroGap {
  double eta = 0.0;
  double displacement_error = 0.0;  // L2 gap of final-time displacements
  double relative_error = 0.0;
};

// Runs the oscillating-coefficient problem on the given grid for each eta and
// compares the final displacement with the effective-coefficient solution on
// the same grid.
inline std::vector<MicroMacroGap> micro_vs_macro(const Grid& g, const FieldSpec& spec,
                                                 const Eigen::MatrixXd& c_eff, double inv_m_reg,
                                                 const LoadProgram& load, const RotheConfig& cfg,
                                                 const std::vector<double>& etas) {
  HomogenizedSolution macro = solve_homogenized(g, spec, c_eff, inv_m_reg, load, cfg);
  const Eigen::VectorXd& u_macro = macro.trajectory.states.back().u;
  const Eigen::VectorXd w = node_weights(g);
  const int d = g.dim;
  auto l2 = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (int i = 0; i < g.n_nodes(); ++i)
      for (int a = 0; a < d; ++a) s += w[i] * v[i * d + a] * v[i * d + a];
    return std::sqrt(s);
  };
  std::vector<MicroMacroGap> gaps;
  Realization real(spec, spec.seed);
  for (double eta : etas) {
    MaterialAssembly mat = assemble_material(g, real, eta, inv_m_reg);
    ElasticitySystem sys(g, mat.stiffness);
    RotheTrajectory micro = run_trajectory(sys, mat, load, cfg);
    MicroMacroGap gap;
    gap.eta = eta;
    gap.displacement_error = l2(micro.states.back().u - u_macro);
    gap.relative_error = gap.displacement_error / std::max(l2(u_macro), 1e-300);
    gaps.push_back(gap);
  }
  return gaps;
}

}  // namespace homog
