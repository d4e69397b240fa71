#pragma once

// Slotted ALOHA over a collision channel: a slot delivers a message iff
// exactly one transmission survives erasure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stfresh {

struct ChannelConfig {
  double zeta = 1e-4;      // per-slot transmit probability
  double epsilon = 0.1;    // erasure probability
  double node_count = 0.0;  // population; real-valued for analysis

  double effective_tx_prob() const noexcept { return zeta * (1.0 - epsilon); }

  void validate() const {
    if (!(zeta >= 0.0 && zeta <= 1.0))
      throw std::invalid_argument("channel: zeta must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::invalid_argument("channel: epsilon must lie in [0, 1)");
    if (!(node_count > 0.0))
      throw std::invalid_argument("channel: node_count must be positive");
  }

  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

// Per-slot delivery probability m * p * (1 - p)^(m - 1) with
// p = zeta * (1 - epsilon). The power is evaluated in log space so large
// populations do not underflow prematurely.
inline double success_prob(const ChannelConfig& cc) {
  cc.validate();
  const double p = cc.effective_tx_prob();
  if (p == 0.0) return 0.0;
  if (p == 1.0) return cc.node_count == 1.0 ? 1.0 : 0.0;
  return cc.node_count * p * std::exp((cc.node_count - 1.0) * std::log1p(-p));
}

// Stationary AoI law: geometric on delta >= 0, P(delta) = ps * (1 - ps)^delta.
// delta = 0 is the slot of a reception itself.
inline double aoi_pmf(double ps, std::uint64_t delta) {
  if (!(ps > 0.0 && ps <= 1.0))
    throw std::domain_error("aoi_pmf: success probability must lie in (0, 1]");
  if (delta == 0) return ps;
  return ps * std::exp(static_cast<double>(delta) * std::log1p(-ps));
}

struct AoiRadius {
  double radius;           // (pi*rho*zeta*(1-epsilon))^(-1/2): unit channel load
  double radius_eps_form;  // variant with epsilon in place of 1-epsilon, reported for reference
  int grid_rings;          // nearest ring count on the radius grid, at least 1
  double grid_radius;      // grid_rings * ring_width
};

// Coverage radius at which the expected number of unerased transmissions per
// slot equals one, the throughput-optimal operating point of the channel:
// solving rho*pi*R^2 * zeta*(1-epsilon) = 1 for R.
inline AoiRadius aoi_optimal_radius(double rho, double zeta, double epsilon,
                                    double ring_width) {
  if (!(rho > 0.0) || !(zeta > 0.0) || !(epsilon >= 0.0 && epsilon < 1.0) ||
      !(ring_width > 0.0))
    throw std::invalid_argument("aoi_optimal_radius: parameters out of range");
  const double pi = std::numbers::pi;
  const double r = 1.0 / std::sqrt(pi * rho * zeta * (1.0 - epsilon));
  const double r_eps = epsilon > 0.0
                           ? 1.0 / std::sqrt(pi * rho * zeta * epsilon)
                           : std::numeric_limits<double>::infinity();
  int k = static_cast<int>(std::llround(r / ring_width));
  if (k < 1) k = 1;
  return {r, r_eps, k, k * ring_width};
}

}  // namespace stfresh
