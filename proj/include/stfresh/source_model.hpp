#pragma once

// Two-state discrete-time Markov source: transition matrix, stationary law,
// closed-form multi-step evolution, and binary entropy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace stfresh {

struct SourceParams {
  double q = 0.005;  // 0 -> 1 transition probability per slot
  double eta = 1.0;  // asymmetry factor; the 1 -> 0 probability is eta * q

  // q = 0 is accepted as the frozen-source degenerate case.
  void validate() const {
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("source: q must lie in [0, 1]");
    if (!(eta > 0.0))
      throw std::invalid_argument("source: eta must be positive");
    if (!(eta * q <= 1.0))
      throw std::invalid_argument("source: eta * q must not exceed 1");
  }

  friend bool operator==(const SourceParams&, const SourceParams&) = default;
};

// Distribution over the two source states.
struct Dist2 {
  double p0 = 1.0;
  double p1 = 0.0;

  void validate(double tol = 1e-12) const {
    if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0))
      throw std::invalid_argument("dist: probabilities must lie in [0, 1]");
    if (std::abs(p0 + p1 - 1.0) > tol)
      throw std::invalid_argument("dist: probabilities must sum to 1");
  }

  friend bool operator==(const Dist2&, const Dist2&) = default;
};

// 2x2 row-stochastic matrix; a[r][c] = P(next = c | current = r).
struct Matrix2 {
  double a[2][2];
};

inline Matrix2 transition_matrix(const SourceParams& sp) {
  sp.validate();
  return {{{1.0 - sp.q, sp.q}, {sp.eta * sp.q, 1.0 - sp.eta * sp.q}}};
}

inline Dist2 stationary_dist(const SourceParams& sp) {
  sp.validate();
  return {sp.eta / (1.0 + sp.eta), 1.0 / (1.0 + sp.eta)};
}

// Second eigenvalue of the transition matrix. |mixing_rate| < 1 makes the
// chain ergodic; the distance to the stationary law shrinks by this factor
// each slot. Negative values (q * (1 + eta) > 1) give an oscillating
// approach.
inline double mixing_rate(const SourceParams& sp) noexcept {
  return 1.0 - sp.q * (1.0 + sp.eta);
}

// Distribution after `steps` applications of the transition matrix, in
// closed form: each component decays toward its stationary value as
// mixing_rate^steps. O(1) regardless of steps.
inline Dist2 evolve(const Dist2& dist, const SourceParams& sp, std::uint64_t steps) {
  const Dist2 st = stationary_dist(sp);
  const double decay = std::pow(mixing_rate(sp), static_cast<double>(steps));
  return {std::clamp(st.p0 + (dist.p0 - st.p0) * decay, 0.0, 1.0),
          std::clamp(st.p1 + (dist.p1 - st.p1) * decay, 0.0, 1.0)};
}

// Entropy in bits, with the 0 * log2(0) = 0 convention. Clamped to [0, 1],
// the analytic range for a binary distribution.
inline double entropy_bits(const Dist2& dist) noexcept {
  const auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return std::clamp(term(dist.p0) + term(dist.p1), 0.0, 1.0);
}

}  // namespace stfresh
