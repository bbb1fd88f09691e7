#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homog/config.hpp"
#include "homog/grid.hpp"
#include "homog/homogenize.hpp"
#include "homog/rothe.hpp"
#include "homog/twoscale.hpp"

namespace homog {

// 17 significant digits: round-trips doubles exactly, so CSV bodies are
// byte-identical across reruns.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::string name;  // file stem under tables/
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string body() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i)
      out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
      out += "\n";
    }
    return out;
  }
};

struct Verdict {
  std::string name;
  std::string operation;  // producing operation
  double tolerance = 0.0;
  double margin = 0.0;  // signed distance to the tolerance; >= 0 passes
  bool pass = false;
};

struct RunReport {
  std::string kind;
  std::uint64_t config_hash = 0;
  std::vector<std::string> statuses;
  std::vector<Verdict> verdicts;
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, nlohmann::json>> ledgers;
  bool numerical_failure = false;

  bool all_pass() const {
    if (numerical_failure) return false;
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  int exit_code() const {
    if (numerical_failure) return 3;
    return all_pass() ? 0 : 1;
  }
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline void emit(const RunReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "tables");
  fs::create_directories(fs::path(dir) / "ledgers");
  for (const auto& t : rep.tables) {
    std::ofstream out(fs::path(dir) / "tables" / (t.name + ".csv"), std::ios::binary);
    out << t.body();
  }
  for (const auto& [name, j] : rep.ledgers) {
    std::ofstream out(fs::path(dir) / "ledgers" / (name + ".json"));
    out << j.dump(2) << "\n";
  }
  nlohmann::json j;
  j["kind"] = rep.kind;
  j["config_hash"] = rep.config_hash;
  j["statuses"] = rep.statuses;
  j["numerical_failure"] = rep.numerical_failure;
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : rep.verdicts)
    j["verdicts"].push_back({{"name", v.name},
                             {"operation", v.operation},
                             {"tolerance", v.tolerance},
                             {"margin", v.margin},
                             {"pass", v.pass}});
  std::ofstream out(fs::path(dir) / "report.json");
  out << j.dump(2) << "\n";
}

namespace detail {

struct EnergyParts {
  double elastic = 0.0, hardening = 0.0, regularization = 0.0;
};

inline EnergyParts energy_parts(const Grid& g, const MaterialAssembly& mat, const MechState& st) {
  EnergyParts p;
  const double wq = g.elem_volume() / g.n_corners();
  const double ve = g.elem_volume();
  for (const auto& sg : st.sigma)
    for (int e = 0; e < g.n_elems(); ++e)
      p.elastic += 0.5 * wq * sg.col(e).dot(mat.compliance[e] * sg.col(e));
  for (int e = 0; e < g.n_elems(); ++e) {
    p.hardening += 0.5 * ve * st.z.col(e).dot(mat.hardening[e] * st.z.col(e));
    p.regularization += 0.5 * ve * mat.inv_m_reg * st.z.col(e).squaredNorm();
  }
  return p;
}

// node-field CSV in the fixed schema: node index, coordinates, components
inline CsvTable node_field_table(const std::string& name, const Grid& g,
                                 const Eigen::VectorXd& u) {
  CsvTable t;
  t.name = name;
  t.header = {"node"};
  const char* ax[3] = {"x", "y", "z"};
  for (int a = 0; a < g.dim; ++a) t.header.push_back(ax[a]);
  for (int a = 0; a < g.dim; ++a) t.header.push_back(std::string("u_") + ax[a]);
  for (int i = 0; i < g.n_nodes(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    const Eigen::VectorXd x = g.node_position(i);
    for (int a = 0; a < g.dim; ++a) row.push_back(fmt17(x[a]));
    for (int a = 0; a < g.dim; ++a) row.push_back(fmt17(u[i * g.dim + a]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Grid make_grid(const ExperimentConfig& cfg) {
  return cfg.periodic ? Grid::periodic_box(cfg.dim, cfg.cells_per_side, cfg.length)
                      : Grid::dirichlet_box(cfg.dim, cfg.cells_per_side, cfg.length);
}

inline LoadProgram make_load(const ExperimentConfig& cfg) {
  LoadProgram load;
  load.horizon = cfg.horizon_seconds;
  load.b = cfg.load_fn();
  return load;
}

inline RotheConfig make_rothe_cfg(const ExperimentConfig& cfg) {
  RotheConfig rc;
  rc.n_steps = 1 << cfg.dyadic_level_m;
  rc.stagger_tol = cfg.tol.stagger;
  rc.cg_tol = cfg.tol.cg;
  return rc;
}

// Appends per-step checkpoints (node-field CSVs) and the ledger sidecars.
inline void emit_trajectory(RunReport& rep, const Grid& g, const MaterialAssembly& mat,
                            const RotheTrajectory& traj, const std::string& prefix) {
  double diss_cum = 0.0, work_cum = 0.0;
  CsvTable summary;
  summary.name = prefix + "_summary";
  summary.header = {"step", "t", "energy", "work_inc", "dissipation_inc", "margin"};
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    char stem[64];
    std::snprintf(stem, sizeof(stem), "%s_step_%04zu", prefix.c_str(), n);
    rep.tables.push_back(node_field_table(stem, g, traj.states[n].u));
    EnergyParts parts = energy_parts(g, mat, traj.states[n]);
    nlohmann::json j;
    j["step"] = n;
    j["t"] = traj.states[n].time;
    j["elastic"] = parts.elastic;
    j["hardening"] = parts.hardening;
    j["regularization"] = parts.regularization;
    if (n > 0) {
      const EnergyLedgerEntry& led = traj.ledger[n - 1];
      diss_cum += led.dissipation_inc;
      work_cum += led.work_inc;
      summary.rows.push_back({std::to_string(n), fmt17(led.time), fmt17(led.energy),
                              fmt17(led.work_inc), fmt17(led.dissipation_inc),
                              fmt17(led.margin)});
      j["energy_margin"] = led.margin;
    } else {
      summary.rows.push_back({"0", "0", fmt17(parts.elastic + parts.hardening +
                                              parts.regularization),
                              "0", "0", "0"});
      j["energy_margin"] = 0.0;
    }
    j["dissipation_cum"] = diss_cum;
    j["work_cum"] = work_cum;
    rep.ledgers.emplace_back(stem, std::move(j));
  }
  rep.tables.push_back(std::move(summary));
}

inline RunReport run_micro(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = to_string(cfg.kind);
  const Grid g = make_grid(cfg);
  const double eta =
      cfg.eta_list.empty() ? 1.0 / (cfg.cells_per_side * cfg.cell_size) : cfg.eta_list.front();
  Realization real(cfg.field_spec(), cfg.field_seed);
  MaterialAssembly mat = assemble_material(g, real, eta, cfg.inv_m_reg);
  ElasticitySystem sys(g, mat.stiffness);
  RotheTrajectory traj = run_trajectory(sys, mat, make_load(cfg), make_rothe_cfg(cfg));
  emit_trajectory(rep, g, mat, traj, "micro");
  EnergyReport er = energy_report(traj);
  Verdict v;
  v.name = "energy-margin-nonnegative";
  v.operation = "run_trajectory";
  v.tolerance = cfg.tol.energy_margin_rel;
  v.margin = er.worst_margin / er.scale + cfg.tol.energy_margin_rel;
  v.pass = er.balanced(cfg.tol.energy_margin_rel);
  rep.verdicts.push_back(v);
  rep.statuses.push_back("micro-run completed, " + std::to_string(traj.states.size() - 1) +
                         " steps, max staggered sweeps " + std::to_string(traj.max_sweeps_used));
  return rep;
}

inline RunReport run_cell_problem(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = to_string(cfg.kind);
  EffectiveTensorReport er =
      effective_tensor_ensemble(cfg.field_spec(), cfg.seed_list, cfg.cells_per_side, cfg.tol.cg);
  nlohmann::json j;
  j["cells_per_side"] = cfg.cells_per_side;
  j["samples"] = er.samples;
  j["spread"] = er.spread;
  j["mean_row_major"] = std::vector<double>(er.mean.data(), er.mean.data() + er.mean.size());
  j["voigt_row_major"] = std::vector<double>(er.voigt.data(), er.voigt.data() + er.voigt.size());
  j["reuss_row_major"] = std::vector<double>(er.reuss.data(), er.reuss.data() + er.reuss.size());
  rep.ledgers.emplace_back("effective_tensor", std::move(j));
  CsvTable t;
  t.name = "effective_tensor_samples";
  t.header = {"seed", "row", "col", "value"};
  for (int k = 0; k < er.samples; ++k)
    for (int r = 0; r < er.mean.rows(); ++r)
      for (int c = 0; c < er.mean.cols(); ++c)
        t.rows.push_back({std::to_string(cfg.seed_list[k]), std::to_string(r), std::to_string(c),
                          fmt17(er.per_sample[k](r, c))});
  rep.tables.push_back(std::move(t));
  const double sym_err = (er.mean - er.mean.transpose()).norm() / er.mean.norm();
  Verdict vs{"effective-tensor-symmetric", "cell_effective_tensor", 1e-10, 1e-10 - sym_err,
             sym_err <= 1e-10};
  rep.verdicts.push_back(vs);
  const bool inb = within_bounds(er, er.mean);
  Verdict vb{"effective-tensor-within-bounds", "effective_tensor_ensemble", 1e-9,
             inb ? 1.0 : -1.0, inb};
  rep.verdicts.push_back(vb);
  rep.statuses.push_back("cell-problem completed on " + std::to_string(er.samples) + " seeds");
  return rep;
}

inline RunReport run_eta_sweep(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = to_string(cfg.kind);
  if (cfg.eta_list.size() < 2)
    throw ConfigError("field 'eta.list': eta-sweep needs at least two entries");
  TestFunctionDictionary dict = TestFunctionDictionary::standard(cfg.dim);
  const FieldSpec spec = cfg.field_spec();
  auto one = [](const Eigen::VectorXd&) { return 1.0; };
  const Eigen::MatrixXd lim = dictionary_limit(dict, spec, one);
  CsvTable t;
  t.name = "pairing_convergence";
  t.header = {"eta", "entry_id", "seed", "pairing", "limit", "abs_err"};
  std::vector<double> mean_err(cfg.eta_list.size(), 0.0);
  for (std::size_t ei = 0; ei < cfg.eta_list.size(); ++ei) {
    const double eta = cfg.eta_list[ei];
    for (std::uint64_t seed : cfg.seed_list) {
      const Eigen::MatrixXd p = pair_against_dictionary(Realization(spec, seed), eta, dict, one);
      for (int bi = 0; bi < p.rows(); ++bi)
        for (int oi = 0; oi < p.cols(); ++oi) {
          const std::string id = dict.bump_names[bi] + ":" + dict.observable_names[oi];
          const double err = std::abs(p(bi, oi) - lim(bi, oi));
          t.rows.push_back({fmt17(eta), id, std::to_string(seed), fmt17(p(bi, oi)),
                            fmt17(lim(bi, oi)), fmt17(err)});
          mean_err[ei] += err;
        }
    }
    mean_err[ei] /= static_cast<double>(cfg.seed_list.size()) * dict.size();
  }
  rep.tables.push_back(std::move(t));
  // least-squares slope of mean error against eta: positive = error shrinks
  // with the scale
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(cfg.eta_list.size());
  for (int i = 0; i < n; ++i) {
    sx += cfg.eta_list[i];
    sy += mean_err[i];
    sxx += cfg.eta_list[i] * cfg.eta_list[i];
    sxy += cfg.eta_list[i] * mean_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double final_err = mean_err.back();
  Verdict vt{"pairing-final-error", "pair_against_dictionary", cfg.tol.pairing,
             cfg.tol.pairing - final_err, final_err <= cfg.tol.pairing};
  rep.verdicts.push_back(vt);
  Verdict vs{"pairing-decreasing-trend", "pair_against_dictionary", 0.0, slope, slope >= 0.0};
  rep.verdicts.push_back(vs);
  rep.statuses.push_back("eta-sweep over " + std::to_string(n) + " scales");
  return rep;
}

inline RunReport run_homogenized(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = to_string(cfg.kind);
  const Grid g = make_grid(cfg);
  const FieldSpec spec = cfg.field_spec();
  // effective stiffness from a periodic cell on the first seed
  const Eigen::MatrixXd ceff =
      sample_effective_tensor(spec, cfg.seed_list.front(), cfg.cells_per_side, cfg.tol.cg);
  HomogenizedSolution macro =
      solve_homogenized(g, spec, ceff, cfg.inv_m_reg, make_load(cfg), make_rothe_cfg(cfg));
  MaterialAssembly macro_mat = assemble_uniform(g, macro.coefficients, cfg.inv_m_reg);
  emit_trajectory(rep, g, macro_mat, macro.trajectory, "macro");
  EnergyReport er = energy_report(macro.trajectory);
  Verdict v{"energy-margin-nonnegative", "run_trajectory", cfg.tol.energy_margin_rel,
            er.worst_margin / er.scale + cfg.tol.energy_margin_rel,
            er.balanced(cfg.tol.energy_margin_rel)};
  rep.verdicts.push_back(v);
  if (cfg.eta_list.size() >= 2) {
    auto gaps = micro_vs_macro(g, spec, ceff, cfg.inv_m_reg, make_load(cfg), make_rothe_cfg(cfg),
                               cfg.eta_list);
    CsvTable t;
    t.name = "micro_macro_gap";
    t.header = {"eta", "displacement_error", "relative_error"};
    bool decreasing = true;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      t.rows.push_back(
          {fmt17(gaps[i].eta), fmt17(gaps[i].displacement_error), fmt17(gaps[i].relative_error)});
      if (i > 0 && !(gaps[i].relative_error < gaps[i - 1].relative_error)) decreasing = false;
    }
    rep.tables.push_back(std::move(t));
    Verdict vd{"micro-macro-gap-decreasing", "micro_vs_macro", 0.0, decreasing ? 1.0 : -1.0,
               decreasing};
    rep.verdicts.push_back(vd);
  }
  rep.statuses.push_back("homogenized-run completed");
  return rep;
}

}  // namespace detail

// Runs one experiment. Module errors surface as a numerical-failure report,
// never as partial silent output.
inline RunReport run(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.kind = to_string(cfg.kind);
  rep.config_hash = fnv1a(cfg.source_text);
  try {
    switch (cfg.kind) {
      case ExperimentKind::micro_run: rep = detail::run_micro(cfg); break;
      case ExperimentKind::cell_problem: rep = detail::run_cell_problem(cfg); break;
      case ExperimentKind::eta_sweep: rep = detail::run_eta_sweep(cfg); break;
      case ExperimentKind::homogenized_run: rep = detail::run_homogenized(cfg); break;
      case ExperimentKind::acceptance_suite:
        throw std::runtime_error("acceptance-suite runs through the dedicated entry point");
    }
    rep.config_hash = fnv1a(cfg.source_text);
  } catch (const ConfigError&) {
    throw;  // configuration errors keep their exit-code class
  } catch (const std::exception& ex) {
    rep.numerical_failure = true;
    rep.statuses.push_back(std::string("numerical failure: ") + ex.what());
  }
  return rep;
}

}  // namespace homog
