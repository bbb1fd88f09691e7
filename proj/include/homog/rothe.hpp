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

// Quasi-static visco-plastic evolution, discretized in time by backward Euler
// and in space on a structured grid. Per step the coupled system
//   sigma = C (eps(u) - z),  -div sigma = b,  dz/dt in g(sigma_bar - M z)
// is solved by staggered elasticity / flow-update sweeps; M = (1/m_reg) I + L
// collects the regularization and hardening terms.

struct MaterialAssembly {
  std::vector<Eigen::MatrixXd> stiffness;   // per element, Mandel
  std::vector<Eigen::MatrixXd> compliance;  // inverses, cached for the ledger
  std::vector<Eigen::MatrixXd> coupling;    // M_e = inv_m_reg * I + L_e
  std::vector<Eigen::MatrixXd> hardening;   // L_e
  LawField laws;                            // flow law per element
  double inv_m_reg = 0.0;

  int n_elems() const { return laws.points(); }
};

// Evaluates a realization at element centers; inv_m_reg = 0 turns the
// regularization term off.
inline MaterialAssembly assemble_material(const Grid& g, const Realization& real, double eta,
                                          double inv_m_reg) {
  const int s = sym_dim(g.dim);
  MaterialAssembly mat;
  mat.inv_m_reg = inv_m_reg;
  const auto& phases = real.spec().phase_values;
  mat.laws.laws.reserve(phases.size());
  std::vector<Eigen::MatrixXd> phase_c, phase_m, phase_l;
  for (const auto& cs : phases) {
    NortonHoffParams nh = cs.flow_params;
    nh.dim = s;
    mat.laws.laws.push_back(MonotoneLaw::norton_hoff(nh));
    phase_c.push_back(cs.stiffness);
    phase_l.push_back(cs.hardening);
    phase_m.push_back(inv_m_reg * Eigen::MatrixXd::Identity(s, s) + cs.hardening);
  }
  mat.laws.phase.resize(g.n_elems());
  mat.stiffness.resize(g.n_elems());
  mat.compliance.resize(g.n_elems());
  mat.coupling.resize(g.n_elems());
  mat.hardening.resize(g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e) {
    const int ph = real.phase_at(g.elem_center(e), eta);
    mat.laws.phase[e] = ph;
    mat.stiffness[e] = phase_c[ph];
    mat.compliance[e] = phase_c[ph].inverse();
    mat.coupling[e] = phase_m[ph];
    mat.hardening[e] = phase_l[ph];
  }
  return mat;
}

inline MaterialAssembly assemble_uniform(const Grid& g, const CoefficientSet& cs,
                                         double inv_m_reg) {
  FieldSpec spec;
  spec.kind = FieldKind::checkerboard_iid;
  spec.dim = g.dim;
  spec.phase_values = {cs};
  spec.phase_probabilities = {1.0};
  return assemble_material(g, Realization(spec, 0), 1.0, inv_m_reg);
}

struct LoadProgram {
  // body force density at (x, t)
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> b;
  double horizon = 1.0;
};

struct MechState {
  double time = 0.0;
  Eigen::VectorXd u;                    // nodal displacement
  std::vector<Eigen::MatrixXd> sigma;   // Gauss-point stress
  Eigen::MatrixXd sigma_mean;           // element-average stress
  Eigen::MatrixXd z;                    // internal variable per element
  Eigen::MatrixXd big_sigma;            // driving stress sigma_bar - M z
};

struct EnergyLedgerEntry {
  double time = 0.0;
  double energy = 0.0;       // stored energy after the step
  double work_inc = 0.0;     // external work over the step
  double dissipation_inc = 0.0;
  double margin = 0.0;       // work - dissipation - energy increment
  double quad_margin = 0.0;  // the same margin from the quadratic remainders
};

struct RotheConfig {
  int n_steps = 16;
  double stagger_tol = 1e-8;
  int max_sweeps = 500;
  double relaxation = 0.8;
  double cg_tol = 1e-10;
};

struct RotheTrajectory {
  std::vector<MechState> states;       // states[0] is the initial state
  std::vector<EnergyLedgerEntry> ledger;  // one entry per step
  double dt = 0.0;
  int max_sweeps_used = 0;
};

namespace detail {

inline double stored_energy(const Grid& g, const MaterialAssembly& mat, const MechState& st) {
  const double wq = g.elem_volume() / g.n_corners();
  const double ve = g.elem_volume();
  double e = 0.0;
  for (const auto& sg : st.sigma)
    for (int el = 0; el < g.n_elems(); ++el)
      e += 0.5 * wq * sg.col(el).dot(mat.compliance[el] * sg.col(el));
  for (int el = 0; el < g.n_elems(); ++el)
    e += 0.5 * ve * st.z.col(el).dot(mat.coupling[el] * st.z.col(el));
  return e;
}

}  // namespace detail

// One backward-Euler step from `prev` at time t = prev.time + dt under the
// averaged load f_full (already assembled nodal load vector).
inline MechState rothe_step(const ElasticitySystem& sys, const MaterialAssembly& mat,
                            const MechState& prev, double dt, const Eigen::VectorXd& f_full,
                            const RotheConfig& cfg, int* sweeps_used = nullptr) {
  const Grid& g = sys.grid();
  const int s = sym_dim(g.dim);
  MechState cur = prev;
  cur.time = prev.time + dt;
  double scale = 1.0 + prev.u.norm() + prev.z.norm();
  int sweep = 0;
  for (; sweep < cfg.max_sweeps; ++sweep) {
    ElasticitySolution es = solve_elasticity(sys, cur.z, f_full, cfg.cg_tol, &cur.u);
    Eigen::MatrixXd z_new(s, g.n_elems());
    Eigen::MatrixXd big(s, g.n_elems());
    for (int e = 0; e < g.n_elems(); ++e) {
      const Eigen::VectorXd w = es.sigma_mean.col(e) - mat.coupling[e] * prev.z.col(e);
      const Eigen::VectorXd sig = weighted_resolvent(mat.laws.at(e), dt, mat.coupling[e], w);
      big.col(e) = sig;
      z_new.col(e) = prev.z.col(e) + dt * eval_g(mat.laws.at(e), sig);
    }
    const double du = (es.u - cur.u).norm();
    const double dz = (z_new - cur.z).norm();
    const double res = (du + dz) / scale;
    cur.u = es.u;
    cur.sigma = es.sigma;
    cur.sigma_mean = es.sigma_mean;
    cur.big_sigma = big;
    if (res <= cfg.stagger_tol) {
      cur.z = z_new;
      // final elasticity solve so (u, sigma) is consistent with the accepted z
      ElasticitySolution fin = solve_elasticity(sys, cur.z, f_full, cfg.cg_tol, &cur.u);
      cur.u = fin.u;
      cur.sigma = fin.sigma;
      cur.sigma_mean = fin.sigma_mean;
      for (int e = 0; e < g.n_elems(); ++e)
        cur.big_sigma.col(e) = cur.sigma_mean.col(e) - mat.coupling[e] * cur.z.col(e);
      ++sweep;
      break;
    }
    cur.z = cfg.relaxation * z_new + (1.0 - cfg.relaxation) * cur.z;
  }
  if (sweep >= cfg.max_sweeps)
    throw std::runtime_error("rothe_step: staggered iteration did not converge");
  if (sweeps_used) *sweeps_used = sweep;
  return cur;
}

// Initial state: z = 0, elasticity solved against the t = 0 load.
inline MechState initial_state(const ElasticitySystem& sys, const MaterialAssembly& mat,
                               const LoadProgram& load, double cg_tol = 1e-10) {
  const Grid& g = sys.grid();
  const int s = sym_dim(g.dim);
  MechState st;
  st.time = 0.0;
  st.z = Eigen::MatrixXd::Zero(s, g.n_elems());
  const Eigen::VectorXd f0 = sys.body_load([&](const Eigen::VectorXd& x) { return load.b(x, 0.0); });
  ElasticitySolution es = solve_elasticity(sys, st.z, f0, cg_tol);
  st.u = es.u;
  st.sigma = es.sigma;
  st.sigma_mean = es.sigma_mean;
  st.big_sigma.resize(s, g.n_elems());
  for (int e = 0; e < g.n_elems(); ++e)
    st.big_sigma.col(e) = st.sigma_mean.col(e) - mat.coupling[e] * st.z.col(e);
  return st;
}

inline RotheTrajectory run_trajectory(const ElasticitySystem& sys, const MaterialAssembly& mat,
                                      const LoadProgram& load, const RotheConfig& cfg) {
  const Grid& g = sys.grid();
  RotheTrajectory traj;
  traj.dt = load.horizon / cfg.n_steps;
  traj.states.push_back(initial_state(sys, mat, load, cfg.cg_tol));
  const double ve = g.elem_volume();
  for (int n = 1; n <= cfg.n_steps; ++n) {
    const double t0 = (n - 1) * traj.dt, t1 = n * traj.dt;
    // time-averaged load over the step (trapezoid)
    const Eigen::VectorXd f = sys.body_load([&](const Eigen::VectorXd& x) {
      return (0.5 * (load.b(x, t0) + load.b(x, t1))).eval();
    });
    int sweeps = 0;
    const MechState& prev = traj.states.back();
    MechState cur = rothe_step(sys, mat, prev, traj.dt, f, cfg, &sweeps);
    traj.max_sweeps_used = std::max(traj.max_sweeps_used, sweeps);

    EnergyLedgerEntry led;
    led.time = cur.time;
    led.energy = detail::stored_energy(g, mat, cur);
    const double e_prev = detail::stored_energy(g, mat, prev);
    led.work_inc = f.dot(cur.u - prev.u);
    led.dissipation_inc = 0.0;
    led.quad_margin = 0.0;
    const double wq = ve / g.n_corners();
    for (int e = 0; e < g.n_elems(); ++e) {
      const Eigen::VectorXd dz = cur.z.col(e) - prev.z.col(e);
      led.dissipation_inc += ve * cur.big_sigma.col(e).dot(dz);
      led.quad_margin += 0.5 * ve * dz.dot(mat.coupling[e] * dz);
      for (std::size_t gp = 0; gp < cur.sigma.size(); ++gp) {
        const Eigen::VectorXd ds = cur.sigma[gp].col(e) - prev.sigma[gp].col(e);
        led.quad_margin += 0.5 * wq * ds.dot(mat.compliance[e] * ds);
      }
    }
    led.margin = led.work_inc - led.dissipation_inc - (led.energy - e_prev);
    traj.ledger.push_back(led);
    traj.states.push_back(std::move(cur));
  }
  return traj;
}

// Natural energy scale of a trajectory, used to normalize margins/residuals.
inline double energy_scale(const RotheTrajectory& traj) {
  double s = 1e-300;
  for (const auto& led : traj.ledger)
    s = std::max({s, std::abs(led.energy), std::abs(led.work_inc), std::abs(led.dissipation_inc)});
  return s;
}

struct EnergyReport {
  double worst_margin = 0.0;      // min over steps of (work - dissipation - dE)
  double worst_quad_gap = 0.0;    // max |margin - quad_margin| (consistency)
  double scale = 1.0;
  bool balanced(double tol_rel) const { return worst_margin >= -tol_rel * scale; }
};

inline EnergyReport energy_report(const RotheTrajectory& traj) {
  EnergyReport rep;
  rep.scale = energy_scale(traj);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& led : traj.ledger) {
    rep.worst_margin = std::min(rep.worst_margin, led.margin);
    rep.worst_quad_gap = std::max(rep.worst_quad_gap, std::abs(led.margin - led.quad_margin));
  }
  return rep;
}

// --- time interpolants ------------------------------------------------------

// Piecewise-affine interpolant of the internal variable at time t.
inline Eigen::MatrixXd z_affine(const RotheTrajectory& traj, double t) {
  const int n = static_cast<int>(traj.states.size()) - 1;
  const double s = std::clamp(t / traj.dt, 0.0, static_cast<double>(n));
  const int k = std::min(static_cast<int>(std::floor(s)), n - 1);
  const double w = s - k;
  return (1.0 - w) * traj.states[k].z + w * traj.states[k + 1].z;
}

// Piecewise-constant (right-continuous backward) interpolant.
inline const Eigen::MatrixXd& z_constant(const RotheTrajectory& traj, double t) {
  const int n = static_cast<int>(traj.states.size()) - 1;
  int k = static_cast<int>(std::ceil(t / traj.dt - 1e-12));
  k = std::clamp(k, 0, n);
  return traj.states[k].z;
}

struct InterpolantGap {
  double distance = 0.0;    // L2-in-time L2-in-space distance of the two interpolants
  double rate_norm = 0.0;   // L2-in-time norm of the discrete time derivative
  double bound = 0.0;       // dt / sqrt(3) * rate_norm
};

// Distance between the affine and constant interpolants together with the
// step-size bound it must satisfy (exact for piecewise-affine data).
inline InterpolantGap interpolant_gap(const Grid& g, const RotheTrajectory& traj) {
  InterpolantGap gap;
  const double ve = g.elem_volume();
  double d2 = 0.0, r2 = 0.0;
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const double dz2 = ve * (traj.states[n].z - traj.states[n - 1].z).squaredNorm();
    d2 += traj.dt / 3.0 * dz2;
    r2 += dz2 / traj.dt;
  }
  gap.distance = std::sqrt(d2);
  gap.rate_norm = std::sqrt(r2);
  gap.bound = traj.dt / std::sqrt(3.0) * gap.rate_norm;
  return gap;
}

// --- weak-solution residual -------------------------------------------------

struct WeakResidualReport {
  double flow_residual = 0.0;          // integrated Fitzpatrick gap of (Sigma, dz/dt)
  double equilibrium_residual = 0.0;   // nodal force residual of the final sweeps
  double scale = 1.0;
  double total() const { return flow_residual + equilibrium_residual; }
};

// Integrated inclusion residual of a trajectory: on each retained step the
// backward-difference rate must lie in g(Sigma). check_stride subsamples
// elements to keep the numeric suprema affordable. z_override substitutes a
// perturbed internal variable (the driving stress is recomputed accordingly).
inline WeakResidualReport weak_solution_residual(
    const ElasticitySystem& sys, const MaterialAssembly& mat, const RotheTrajectory& traj,
    int check_stride = 1,
    const std::function<Eigen::MatrixXd(int step, const Eigen::MatrixXd&)>& z_override = {}) {
  const Grid& g = sys.grid();
  WeakResidualReport rep;
  rep.scale = energy_scale(traj);
  const double ve = g.elem_volume();
  const int n_steps = static_cast<int>(traj.states.size()) - 1;
  for (int n = 1; n <= n_steps; ++n) {
    Eigen::MatrixXd z_cur = traj.states[n].z;
    Eigen::MatrixXd z_prev = traj.states[n - 1].z;
    if (z_override) {
      z_cur = z_override(n, traj.states[n].z);
      z_prev = z_override(n - 1, traj.states[n - 1].z);
    }
    for (int e = 0; e < g.n_elems(); e += check_stride) {
      const Eigen::VectorXd rate = (z_cur.col(e) - z_prev.col(e)) / traj.dt;
      const Eigen::VectorXd big =
          traj.states[n].sigma_mean.col(e) - mat.coupling[e] * z_cur.col(e);
      rep.flow_residual +=
          ve * check_stride * traj.dt * fitzpatrick_gap(mat.laws.at(e), big, rate);
    }
  }
  // equilibrium: K u - f_p(z) must match the stored load; re-derive the load
  // from the converged state via the plastic term and the final stress
  for (int n = 1; n <= n_steps; ++n) {
    const MechState& st = traj.states[n];
    Eigen::MatrixXd z_cur = st.z;
    if (z_override) z_cur = z_override(n, st.z);
    // residual of sigma = C (eps(u) - z) at Gauss points
    const auto gps = fem::gauss_points(g.dim);
    double r2 = 0.0;
    const double wq = ve / g.n_corners();
    for (std::size_t gp = 0; gp < gps.size(); ++gp) {
      const Eigen::MatrixXd bm = fem::strain_matrix(g, gps[gp]);
      for (int e = 0; e < g.n_elems(); ++e) {
        const Eigen::VectorXd pred =
            mat.stiffness[e] * (bm * elem_dofs(g, st.u, e) - z_cur.col(e));
        r2 += wq * (pred - st.sigma[gp].col(e)).squaredNorm();
      }
    }
    rep.equilibrium_residual += traj.dt * std::sqrt(r2);
  }
  return rep;
}

// --- single material point (no spatial coupling) ----------------------------

// Backward-Euler evolution of dz/dt in g(sigma(t) - M z) at one point.
inline std::vector<Eigen::VectorXd> pointwise_trajectory(
    const MonotoneLaw& law, const Eigen::MatrixXd& coupling,
    const std::function<Eigen::VectorXd(double)>& sigma_of_t, double horizon, int n_steps,
    const Eigen::VectorXd& z0) {
  const double dt = horizon / n_steps;
  std::vector<Eigen::VectorXd> zs{z0};
  for (int n = 1; n <= n_steps; ++n) {
    const Eigen::VectorXd w = sigma_of_t(n * dt) - coupling * zs.back();
    const Eigen::VectorXd big = weighted_resolvent(law, dt, coupling, w);
    zs.push_back(zs.back() + dt * eval_g(law, big));
  }
  return zs;
}

}  // namespace homog
