#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>
#include <cmath>

#include <Eigen/Dense>

#include "homog/convex.hpp"
#include "homog/rng.hpp"
#include "homog/tensor.hpp"

namespace homog {

// Per-phase material data: stiffness (Mandel), hardening matrix L and the
// flow-law parameters, with the stored ellipticity bracket alpha <= beta.
struct CoefficientSet {
  Eigen::MatrixXd stiffness;  // sdim x sdim, SPD
  Eigen::MatrixXd hardening;  // N x N, PSD
  NortonHoffParams flow_params;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    require_spd(stiffness, "CoefficientSet.stiffness");
    require_psd(hardening, "CoefficientSet.hardening");
    EllipticityBracket br = spd_bracket(stiffness);
    if (!(alpha > 0.0 && alpha <= beta))
      throw std::invalid_argument("CoefficientSet: need 0 < alpha <= beta");
    if (br.alpha < alpha - 1e-12 || br.beta > beta + 1e-12)
      throw std::invalid_argument("CoefficientSet: stiffness spectrum violates stored bracket");
  }

  static CoefficientSet scalar(int d, double c, double hardening_scale = 0.0,
                               NortonHoffParams nh = {}) {
    const int s = sym_dim(d);
    CoefficientSet cs;
    cs.stiffness = c * Eigen::MatrixXd::Identity(s, s);
    cs.hardening = hardening_scale * Eigen::MatrixXd::Identity(s, s);
    cs.flow_params = nh;
    cs.flow_params.dim = s;
    cs.alpha = cs.beta = c;
    return cs;
  }

  static CoefficientSet isotropic(int d, double lambda, double mu, double hardening_scale = 0.0,
                                  NortonHoffParams nh = {}) {
    const int s = sym_dim(d);
    CoefficientSet cs;
    cs.stiffness = isotropic_stiffness(d, lambda, mu);
    cs.hardening = hardening_scale * Eigen::MatrixXd::Identity(s, s);
    cs.flow_params = nh;
    cs.flow_params.dim = s;
    EllipticityBracket br = spd_bracket(cs.stiffness);
    cs.alpha = br.alpha;
    cs.beta = br.beta;
    return cs;
  }
};

enum class FieldKind { checkerboard_iid, laminate_1d, voronoi_seeded };

inline std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::checkerboard_iid: return "checkerboard-iid";
    case FieldKind::laminate_1d: return "laminate-1d";
    case FieldKind::voronoi_seeded: return "voronoi-seeded";
  }
  return "?";
}

// Description of a stationary-ergodic coefficient field: an iid-cell
// construction over the integer lattice, eta-scaled at evaluation time.
struct FieldSpec {
  FieldKind kind = FieldKind::checkerboard_iid;
  int dim = 2;
  double cell_size = 1.0;
  std::vector<CoefficientSet> phase_values;
  std::vector<double> phase_probabilities;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("FieldSpec: dim must be 1..3");
    if (cell_size <= 0.0) throw std::invalid_argument("FieldSpec: cell_size must be > 0");
    if (phase_values.empty()) throw std::invalid_argument("FieldSpec: need at least one phase");
    if (phase_values.size() != phase_probabilities.size())
      throw std::invalid_argument("FieldSpec: phase/probability count mismatch");
    double sum = 0.0;
    for (double p : phase_probabilities) {
      if (p < 0.0) throw std::invalid_argument("FieldSpec: probabilities must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("FieldSpec: probabilities sum to " + std::to_string(sum) +
                                  ", expected 1");
    for (const auto& cs : phase_values) cs.validate();
  }
};

// One realization omega. Phase lookup is a pure function of (seed, cell), so
// the realization is immutable and safe for concurrent evaluation. A lattice
// shift is represented by an offset, giving exact stationarity under the
// lattice subgroup.
class Realization {
 public:
  Realization(FieldSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
    spec_.validate();
  }

  const FieldSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  int phase_of_cell(const std::array<std::int64_t, 3>& cell) const {
    std::array<std::int64_t, 3> c = cell;
    for (int a = 0; a < spec_.dim; ++a) c[a] += offset_[a];
    switch (spec_.kind) {
      case FieldKind::checkerboard_iid:
        return pick_phase(cell_hash(c, spec_.dim));
      case FieldKind::laminate_1d:
        return pick_phase(cell_hash({c[0], 0, 0}, 1));
      case FieldKind::voronoi_seeded:
        return voronoi_phase(c);
    }
    throw std::logic_error("unreachable");
  }

  int phase_at(const Eigen::VectorXd& x, double eta) const {
    if (eta <= 0.0) throw std::invalid_argument("Realization: eta must be > 0");
    std::array<std::int64_t, 3> cell{0, 0, 0};
    Eigen::VectorXd y(spec_.dim);
    for (int a = 0; a < spec_.dim; ++a) {
      const double t = x[a] / (eta * spec_.cell_size);
      cell[a] = static_cast<std::int64_t>(std::floor(t));
      y[a] = t - std::floor(t);
    }
    if (spec_.kind != FieldKind::voronoi_seeded) return phase_of_cell(cell);
    return voronoi_phase_at(cell, y);
  }

  const CoefficientSet& evaluate_at(const Eigen::VectorXd& x, double eta) const {
    return spec_.phase_values[phase_at(x, eta)];
  }

  // The y-shifted realization tau_y omega (lattice shifts only).
  Realization shifted(const std::array<std::int64_t, 3>& y) const {
    Realization r = *this;
    for (int a = 0; a < spec_.dim; ++a) r.offset_[a] += y[a];
    return r;
  }

 private:
  std::uint64_t cell_hash(const std::array<std::int64_t, 3>& c, int d) const {
    std::uint64_t h = splitmix64(seed_ ^ 0xc0ffee123ULL);
    for (int a = 0; a < d; ++a) h = hash_combine(h, zigzag(c[a]));
    return h;
  }

  int pick_phase(std::uint64_t h) const {
    const double u = u01_from_bits(h);
    double acc = 0.0;
    for (std::size_t i = 0; i < spec_.phase_probabilities.size(); ++i) {
      acc += spec_.phase_probabilities[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(spec_.phase_probabilities.size()) - 1;
  }

  Eigen::VectorXd seed_point(const std::array<std::int64_t, 3>& c) const {
    Eigen::VectorXd p(spec_.dim);
    std::uint64_t h = cell_hash(c, spec_.dim);
    for (int a = 0; a < spec_.dim; ++a) {
      h = splitmix64(h + 0x1234 + a);
      p[a] = static_cast<double>(c[a]) + u01_from_bits(h);
    }
    return p;
  }

  int voronoi_phase(const std::array<std::int64_t, 3>& c) const {
    return pick_phase(splitmix64(cell_hash(c, spec_.dim) ^ 0x5eedULL));
  }

  int voronoi_phase_at(std::array<std::int64_t, 3> cell, const Eigen::VectorXd& local) const {
    for (int a = 0; a < spec_.dim; ++a) cell[a] += offset_[a];
    Eigen::VectorXd x(spec_.dim);
    for (int a = 0; a < spec_.dim; ++a) x[a] = static_cast<double>(cell[a]) + local[a];
    double best = std::numeric_limits<double>::infinity();
    std::array<std::int64_t, 3> bestc = cell;
    std::array<std::int64_t, 3> nb = cell;
    const int lo = -1, hi = 1;
    for (int i = lo; i <= hi; ++i) {
      nb[0] = cell[0] + i;
      for (int j = (spec_.dim > 1 ? lo : 0); j <= (spec_.dim > 1 ? hi : 0); ++j) {
        nb[1] = cell[1] + j;
        for (int k = (spec_.dim > 2 ? lo : 0); k <= (spec_.dim > 2 ? hi : 0); ++k) {
          nb[2] = cell[2] + k;
          const double d2 = (seed_point(nb) - x).squaredNorm();
          if (d2 < best) { best = d2; bestc = nb; }
        }
      }
    }
    return pick_phase(splitmix64(cell_hash(bestc, spec_.dim) ^ 0x5eedULL));
  }

  FieldSpec spec_;
  std::uint64_t seed_;
  std::array<std::int64_t, 3> offset_{0, 0, 0};
};

inline Realization sample_realization(const FieldSpec& spec) {
  return Realization(spec, spec.seed);
}

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  double volume() const { return (hi - lo).prod(); }

  static Box unit(int d) {
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  }
};

// Midpoint-quadrature spatial average of observable(tau_{x/eta} omega) over a
// box, resolving every microstructure cell. points_per_cell refines the
// quadrature relative to the eta-scaled cell.
inline double ergodic_average(const Realization& real,
                              const std::function<double(const CoefficientSet&)>& observable,
                              const Box& domain, double eta, int points_per_cell = 2) {
  if (eta <= 0.0) throw std::invalid_argument("ergodic_average: eta must be > 0");
  if (points_per_cell < 1)
    throw std::runtime_error("ergodic_average: quadrature does not resolve the microstructure");
  const int d = real.spec().dim;
  const double target = eta * real.spec().cell_size / points_per_cell;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> h{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double len = domain.hi[a] - domain.lo[a];
    n[a] = std::max(1, static_cast<int>(std::ceil(len / target)));
    h[a] = len / n[a];
    if (h[a] > eta * real.spec().cell_size + 1e-15)
      throw std::runtime_error("ergodic_average: quadrature does not resolve the microstructure");
  }
  double sum = 0.0;
  Eigen::VectorXd x(d);
  for (int i = 0; i < n[0]; ++i) {
    x[0] = domain.lo[0] + (i + 0.5) * h[0];
    for (int j = 0; j < (d > 1 ? n[1] : 1); ++j) {
      if (d > 1) x[1] = domain.lo[1] + (j + 0.5) * h[1];
      for (int k = 0; k < (d > 2 ? n[2] : 1); ++k) {
        if (d > 2) x[2] = domain.lo[2] + (k + 0.5) * h[2];
        sum += observable(real.evaluate_at(x, eta));
      }
    }
  }
  const double count = static_cast<double>(n[0]) * (d > 1 ? n[1] : 1) * (d > 2 ? n[2] : 1);
  return sum / count;
}

struct StationarityReport {
  int checked = 0;
  int violations = 0;
  std::vector<Eigen::VectorXd> violating_points;

  bool passed() const { return violations == 0; }
};

// Asserts evaluate(shifted realization, x) == evaluate(realization, x + shift)
// at every sample point (shift in lattice units of the unscaled cell).
inline StationarityReport stationarity_check(const Realization& real,
                                             const std::array<std::int64_t, 3>& shift,
                                             const std::vector<Eigen::VectorXd>& sample_points) {
  StationarityReport rep;
  const Realization shifted = real.shifted(shift);
  const double cs = real.spec().cell_size;
  for (const auto& x : sample_points) {
    Eigen::VectorXd xs = x;
    for (int a = 0; a < real.spec().dim; ++a) xs[a] += static_cast<double>(shift[a]) * cs;
    ++rep.checked;
    if (shifted.phase_at(x, 1.0) != real.phase_at(xs, 1.0)) {
      ++rep.violations;
      rep.violating_points.push_back(x);
    }
  }
  return rep;
}

}  // namespace homog
