#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Core>

namespace homog {

// Counter-based hashing: every draw is a pure function of (seed, counter),
// so field evaluation needs no mutable generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
}

// zigzag encoding so negative lattice indices hash distinctly
inline std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateless stream: draw(i) is reproducible and order-independent.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(splitmix64(seed ^ 0x5bd1e995u)) {}

  double u01(std::uint64_t counter) const {
    return u01_from_bits(hash_combine(seed_, counter));
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * u01(counter);
  }

  double gaussian(std::uint64_t counter) const {
    // Box-Muller from two decorrelated counters
    double u1 = u01_from_bits(hash_combine(seed_, 2 * counter));
    double u2 = u01_from_bits(hash_combine(seed_, 2 * counter + 1));
    u1 = std::max(u1, 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd gaussian_vec(std::uint64_t counter, int n) const {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian(counter * 0x10001ULL + i);
    return v;
  }

  Eigen::VectorXd ball(std::uint64_t counter, int n, double radius) const {
    Eigen::VectorXd v = gaussian_vec(counter, n);
    double r = std::pow(u01(counter * 0x20003ULL + 7), 1.0 / n) * radius;
    double nv = v.norm();
    if (nv < 1e-300) return Eigen::VectorXd::Zero(n);
    return (r / nv) * v;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace homog
