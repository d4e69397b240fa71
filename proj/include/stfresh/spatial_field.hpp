#pragma once

// Coverage geometry: a disc of radius num_rings * ring_width split into
// annular rings of equal width, populated uniformly at a given density.
// Reading reliability decays with the ring index of the sender.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace stfresh {

struct SpatialConfig {
  double ring_width = 10.0;  // meters
  int num_rings = 15;
  double density = 0.05;  // nodes per square meter
  double alpha = 0.02;    // reliability exponent

  double coverage_radius() const noexcept { return num_rings * ring_width; }

  void validate() const {
    if (!(ring_width > 0.0))
      throw std::invalid_argument("spatial: ring_width must be positive");
    if (num_rings < 1)
      throw std::invalid_argument("spatial: num_rings must be at least 1");
    if (!(density > 0.0))
      throw std::invalid_argument("spatial: density must be positive");
    if (!(alpha >= 0.0))
      throw std::invalid_argument("spatial: alpha must be non-negative");
  }

  friend bool operator==(const SpatialConfig&, const SpatialConfig&) = default;
};

struct NodeCount {
  double analytic;         // density * pi * Rm^2, used by the closed-form analysis
  std::int64_t simulated;  // nearest integer population for the simulator
};

inline NodeCount node_count(const SpatialConfig& sc) {
  sc.validate();
  const double rm = sc.coverage_radius();
  const double m = sc.density * std::numbers::pi * rm * rm;
  return {m, std::llround(m)};
}

// Probability that a decoded message originates from ring d. Integrating the
// uniform position density 2r/Rm^2 over the annulus gives (2d + 1) / K^2.
inline std::vector<double> region_pmf(const SpatialConfig& sc) {
  sc.validate();
  const double k2 = static_cast<double>(sc.num_rings) * sc.num_rings;
  std::vector<double> pmf(static_cast<std::size_t>(sc.num_rings));
  for (int d = 0; d < sc.num_rings; ++d)
    pmf[static_cast<std::size_t>(d)] = (2.0 * d + 1.0) / k2;
  return pmf;
}

// Probability that a node in ring `region` reports the true source state:
// (1 + region * ring_width)^(-alpha). Equals 1 in the innermost ring and for
// alpha = 0.
inline double reliability(const SpatialConfig& sc, int region) {
  if (region < 0 || region >= sc.num_rings)
    throw std::out_of_range("spatial: region index out of range");
  return std::pow(1.0 + region * sc.ring_width, -sc.alpha);
}

// Ring index of a uniformly placed node. The radius has density 2r/Rm^2 on
// [0, Rm), so r = Rm * sqrt(U) and the index is floor(r / ring_width).
template <class Rng>
int sample_region(const SpatialConfig& sc, Rng& rng) {
  const double scaled = sc.num_rings * std::sqrt(rng.uniform01());
  const int d = static_cast<int>(scaled);
  return d < sc.num_rings ? d : sc.num_rings - 1;
}

}  // namespace stfresh
