#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homog/expr.hpp"
#include "homog/microstructure.hpp"

namespace homog {

enum class ExperimentKind { micro_run, homogenized_run, eta_sweep, cell_problem, acceptance_suite };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::micro_run: return "micro-run";
    case ExperimentKind::homogenized_run: return "homogenized-run";
    case ExperimentKind::eta_sweep: return "eta-sweep";
    case ExperimentKind::cell_problem: return "cell-problem";
    case ExperimentKind::acceptance_suite: return "acceptance-suite";
  }
  return "?";
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhaseConfig {
  double probability = -1.0;
  double stiffness_scalar = 1.0;
  bool isotropic = false;
  double lame_lambda = 0.0;
  double lame_mu = 0.0;
  double hardening_scale = 0.0;
  double yield_stress = 1.0;
  double flow_exponent = 1.0;
};

struct Tolerances {
  double stagger = 1e-8;
  double cg = 1e-10;
  double energy_margin_rel = 1e-8;
  double weak_residual_rel = 1e-5;
  double pairing = 5e-2;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::micro_run;

  FieldKind field_kind = FieldKind::checkerboard_iid;
  int dim = 2;
  double cell_size = 1.0;
  std::uint64_t field_seed = 0;
  std::vector<PhaseConfig> phases;

  int cells_per_side = 16;
  double length = 1.0;
  bool periodic = false;

  std::vector<Expr> load_exprs;  // one per spatial component; empty = zero load
  double horizon_seconds = 1.0;
  int dyadic_level_m = 4;
  double inv_m_reg = 0.0;

  std::vector<double> eta_list;          // strictly decreasing when present
  std::vector<std::uint64_t> seed_list;  // ensemble seeds
  Tolerances tol;
  std::string output_dir = "out";

  std::string source_text;  // normalized config, hashed into the report

  FieldSpec field_spec() const {
    FieldSpec spec;
    spec.kind = field_kind;
    spec.dim = dim;
    spec.cell_size = cell_size;
    spec.seed = field_seed;
    for (const auto& ph : phases) {
      NortonHoffParams nh;
      nh.yield_stress = ph.yield_stress;
      nh.exponent = ph.flow_exponent;
      CoefficientSet cs =
          ph.isotropic
              ? CoefficientSet::isotropic(dim, ph.lame_lambda, ph.lame_mu, ph.hardening_scale, nh)
              : CoefficientSet::scalar(dim, ph.stiffness_scalar, ph.hardening_scale, nh);
      spec.phase_values.push_back(cs);
      spec.phase_probabilities.push_back(ph.probability);
    }
    return spec;
  }

  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> load_fn() const {
    auto exprs = load_exprs;
    const int d = dim;
    return [exprs, d](const Eigen::VectorXd& x, double t) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
      for (int a = 0; a < d && a < static_cast<int>(exprs.size()); ++a) b[a] = exprs[a](x, t);
      return b;
    };
  }
};

namespace detail {

struct KeyedValue {
  std::string value;
  int line = 0;
  bool used = false;
};

inline double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects a number, got '" + v + "'");
  }
}

inline long parse_int(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects an integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                    "' expects true/false, got '" + v + "'");
}

}  // namespace detail

// Flat `key value` text: one pair per line, '#' comments, dotted keys, the
// value is the remainder of the line. Unknown keys are rejected with their
// line number; validation errors name the offending field.
inline ExperimentConfig parse_config(const std::string& text) {
  using detail::KeyedValue;
  std::map<std::string, KeyedValue> kv;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::istringstream ls(line);
      std::string key;
      if (!(ls >> key)) continue;
      std::string rest;
      std::getline(ls, rest);
      const std::size_t a = rest.find_first_not_of(" \t");
      rest = a == std::string::npos ? std::string() : rest.substr(a);
      const std::size_t b = rest.find_last_not_of(" \t\r");
      if (b != std::string::npos) rest = rest.substr(0, b + 1);
      if (rest.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' has no value");
      if (kv.count(key))
        throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      kv[key] = {rest, lineno, false};
    }
  }
  ExperimentConfig cfg;
  cfg.source_text = text;

  auto take = [&](const std::string& key) -> KeyedValue* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  };
  auto number = [&](const std::string& key, double dflt) {
    KeyedValue* v = take(key);
    return v ? detail::parse_double(v->value, key, v->line) : dflt;
  };
  auto integer = [&](const std::string& key, long dflt) {
    KeyedValue* v = take(key);
    return v ? detail::parse_int(v->value, key, v->line) : dflt;
  };
  auto boolean = [&](const std::string& key, bool dflt) {
    KeyedValue* v = take(key);
    return v ? detail::parse_bool(v->value, key, v->line) : dflt;
  };
  auto text_of = [&](const std::string& key, const std::string& dflt) {
    KeyedValue* v = take(key);
    return v ? v->value : dflt;
  };

  // experiment kind
  {
    const std::string k = text_of("experiment.kind", "micro-run");
    if (k == "micro-run") cfg.kind = ExperimentKind::micro_run;
    else if (k == "homogenized-run") cfg.kind = ExperimentKind::homogenized_run;
    else if (k == "eta-sweep") cfg.kind = ExperimentKind::eta_sweep;
    else if (k == "cell-problem") cfg.kind = ExperimentKind::cell_problem;
    else if (k == "acceptance-suite") cfg.kind = ExperimentKind::acceptance_suite;
    else throw ConfigError("field 'experiment.kind': unknown kind '" + k + "'");
  }
  {
    const std::string k = text_of("field.kind", "checkerboard-iid");
    if (k == "checkerboard-iid") cfg.field_kind = FieldKind::checkerboard_iid;
    else if (k == "laminate-1d") cfg.field_kind = FieldKind::laminate_1d;
    else if (k == "voronoi-seeded") cfg.field_kind = FieldKind::voronoi_seeded;
    else throw ConfigError("field 'field.kind': unknown kind '" + k + "'");
  }
  cfg.dim = static_cast<int>(integer("field.dim", 2));
  cfg.cell_size = number("field.cell_size", 1.0);
  cfg.field_seed = static_cast<std::uint64_t>(integer("field.seed", 0));

  // phases: contiguous indices from 0
  for (int i = 0;; ++i) {
    const std::string prefix = "phase." + std::to_string(i) + ".";
    if (!kv.count(prefix + "probability")) break;
    PhaseConfig ph;
    ph.probability = number(prefix + "probability", -1.0);
    ph.isotropic = kv.count(prefix + "lame_lambda") || kv.count(prefix + "lame_mu");
    if (ph.isotropic) {
      ph.lame_lambda = number(prefix + "lame_lambda", 0.0);
      ph.lame_mu = number(prefix + "lame_mu", 0.0);
    } else {
      ph.stiffness_scalar = number(prefix + "stiffness_scalar", 1.0);
    }
    ph.hardening_scale = number(prefix + "hardening_scale", 0.0);
    ph.yield_stress = number(prefix + "yield_stress", 1.0);
    ph.flow_exponent = number(prefix + "flow_exponent", 1.0);
    cfg.phases.push_back(ph);
  }
  if (cfg.phases.empty()) {
    // default: two-phase scalar checkerboard
    PhaseConfig a, b;
    a.probability = b.probability = 0.5;
    a.stiffness_scalar = 1.0;
    b.stiffness_scalar = 2.0;
    cfg.phases = {a, b};
  }

  cfg.cells_per_side = static_cast<int>(integer("grid.cells_per_side", 16));
  cfg.length = number("grid.length", 1.0);
  cfg.periodic = boolean("grid.periodic", false);

  const char* load_keys[3] = {"load.expr_x", "load.expr_y", "load.expr_z"};
  for (int a = 0; a < 3; ++a) {
    KeyedValue* v = take(load_keys[a]);
    if (!v) {
      if (a < cfg.dim) cfg.load_exprs.push_back(Expr::parse("0"));
      continue;
    }
    try {
      cfg.load_exprs.push_back(Expr::parse(v->value));
    } catch (const std::exception& ex) {
      throw ConfigError("line " + std::to_string(v->line) + ": key '" + load_keys[a] +
                        "': " + ex.what());
    }
  }

  cfg.horizon_seconds = number("time.horizon_seconds", 1.0);
  cfg.dyadic_level_m = static_cast<int>(integer("time.dyadic_level_m", 4));
  cfg.inv_m_reg = number("time.inv_m_reg", 0.0);

  if (KeyedValue* v = take("eta.list")) {
    std::istringstream es(v->value);
    double e;
    while (es >> e) cfg.eta_list.push_back(e);
    if (!es.eof())
      throw ConfigError("line " + std::to_string(v->line) + ": key 'eta.list' has non-numeric entries");
  }
  if (KeyedValue* v = take("seeds.list")) {
    std::istringstream ss(v->value);
    long sdd;
    while (ss >> sdd) cfg.seed_list.push_back(static_cast<std::uint64_t>(sdd));
    if (!ss.eof())
      throw ConfigError("line " + std::to_string(v->line) +
                        ": key 'seeds.list' has non-numeric entries");
  }
  if (cfg.seed_list.empty()) cfg.seed_list = {1};

  cfg.tol.stagger = number("tol.stagger", cfg.tol.stagger);
  cfg.tol.cg = number("tol.cg", cfg.tol.cg);
  cfg.tol.energy_margin_rel = number("tol.energy_margin_rel", cfg.tol.energy_margin_rel);
  cfg.tol.weak_residual_rel = number("tol.weak_residual_rel", cfg.tol.weak_residual_rel);
  cfg.tol.pairing = number("tol.pairing", cfg.tol.pairing);
  cfg.output_dir = text_of("output.dir", cfg.output_dir);

  // reject unknown keys
  for (const auto& [key, v] : kv)
    if (!v.used)
      throw ConfigError("line " + std::to_string(v.line) + ": unknown key '" + key + "'");

  // --- validation -----------------------------------------------------------
  if (cfg.dim < 1 || cfg.dim > 3) throw ConfigError("field 'field.dim': must be 1..3");
  if (cfg.cell_size <= 0.0) throw ConfigError("field 'field.cell_size': must be > 0");
  if (cfg.cells_per_side < 1) throw ConfigError("field 'grid.cells_per_side': must be >= 1");
  if (cfg.length <= 0.0) throw ConfigError("field 'grid.length': must be > 0");
  if (cfg.horizon_seconds <= 0.0) throw ConfigError("field 'time.horizon_seconds': must be > 0");
  if (cfg.dyadic_level_m < 0 || cfg.dyadic_level_m > 20)
    throw ConfigError("field 'time.dyadic_level_m': must be in 0..20");
  if (cfg.inv_m_reg < 0.0) throw ConfigError("field 'time.inv_m_reg': must be >= 0");
  double psum = 0.0;
  for (const auto& ph : cfg.phases) {
    if (ph.probability < 0.0) throw ConfigError("field 'phase.*.probability': must be >= 0");
    psum += ph.probability;
  }
  if (std::abs(psum - 1.0) > 1e-12)
    throw ConfigError("field 'phase.*.probability': probabilities sum to " +
                      std::to_string(psum) + ", expected 1");
  for (std::size_t i = 1; i < cfg.eta_list.size(); ++i)
    if (!(cfg.eta_list[i] < cfg.eta_list[i - 1]))
      throw ConfigError("field 'eta.list': entries must be strictly decreasing");
  for (double e : cfg.eta_list)
    if (e <= 0.0) throw ConfigError("field 'eta.list': entries must be > 0");
  for (const double* t : {&cfg.tol.stagger, &cfg.tol.cg, &cfg.tol.energy_margin_rel,
                          &cfg.tol.weak_residual_rel, &cfg.tol.pairing})
    if (*t <= 0.0) throw ConfigError("field 'tol.*': tolerances must be > 0");
  // microstructure resolution: grid spacing must divide eta * cell_size
  if (!cfg.eta_list.empty() &&
      (cfg.kind == ExperimentKind::micro_run || cfg.kind == ExperimentKind::homogenized_run)) {
    const double h = cfg.length / cfg.cells_per_side;
    for (double e : cfg.eta_list) {
      const double ratio = e * cfg.cell_size / h;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-9)
        throw ConfigError("field 'eta.list': grid spacing does not divide eta * cell_size (eta " +
                          std::to_string(e) + ")");
    }
  }
  cfg.field_spec().validate();  // full material validation
  return cfg;
}

}  // namespace homog
