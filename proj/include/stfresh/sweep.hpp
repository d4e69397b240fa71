#pragma once

// Radius curves and optimization: average conditional entropy as a function
// of the ring count, the entropy-minimizing radius, and one-parameter sweeps
// of that optimum.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "stfresh/belief_engine.hpp"
#include "stfresh/experiment.hpp"

namespace stfresh {

struct RadiusPoint {
  int num_rings;
  double radius;
  double avg_entropy;
  double ps;
  double correct_prob;
};

inline RadiusPoint evaluate_radius(const ExperimentConfig& base, int num_rings) {
  ExperimentConfig cfg = base;
  cfg.spatial.num_rings = num_rings;
  const ChannelConfig channel = cfg.analysis_channel();
  return {num_rings, cfg.spatial.coverage_radius(),
          avg_conditional_entropy(cfg.source, cfg.spatial, channel),
          success_prob(channel), aggregate_correct_prob(cfg.spatial)};
}

// Entropy-vs-radius curve over an increasing grid of ring counts.
inline std::vector<RadiusPoint> entropy_vs_radius(const ExperimentConfig& base,
                                                  std::span<const int> ring_counts) {
  if (ring_counts.empty())
    throw std::invalid_argument("entropy_vs_radius: empty ring-count grid");
  for (std::size_t i = 0; i < ring_counts.size(); ++i) {
    if (ring_counts[i] < 1)
      throw std::invalid_argument("entropy_vs_radius: ring counts must be positive");
    if (i > 0 && ring_counts[i] <= ring_counts[i - 1])
      throw std::invalid_argument(
          "entropy_vs_radius: ring counts must be strictly increasing");
  }
  std::vector<RadiusPoint> curve;
  curve.reserve(ring_counts.size());
  for (const int k : ring_counts) curve.push_back(evaluate_radius(base, k));
  return curve;
}

// Default scan bound: twice the AoI-optimal radius, in rings.
inline int default_max_rings(const ExperimentConfig& cfg) {
  const AoiRadius aoi = aoi_optimal_radius(cfg.spatial.density, cfg.channel.zeta,
                                           cfg.channel.epsilon, cfg.spatial.ring_width);
  return static_cast<int>(std::ceil(2.0 * aoi.radius / cfg.spatial.ring_width));
}

struct OptResult {
  int k_star = 0;
  double r_m_star = 0.0;
  double h_star = 0.0;
  double r_aoi = 0.0;
  std::vector<RadiusPoint> curve;
};

// Exhaustive scan over ring counts 1..max_rings. Ties break toward the
// smaller radius (fewer polled sensors).
inline OptResult optimal_radius(const ExperimentConfig& base, int max_rings) {
  if (max_rings < 1)
    throw std::invalid_argument("optimal_radius: max_rings must be at least 1");
  OptResult result;
  result.curve.reserve(static_cast<std::size_t>(max_rings));
  for (int k = 1; k <= max_rings; ++k) {
    result.curve.push_back(evaluate_radius(base, k));
    if (k == 1 || result.curve.back().avg_entropy < result.h_star) {
      result.k_star = k;
      result.h_star = result.curve.back().avg_entropy;
      result.r_m_star = result.curve.back().radius;
    }
  }
  result.r_aoi = aoi_optimal_radius(base.spatial.density, base.channel.zeta,
                                    base.channel.epsilon, base.spatial.ring_width)
                     .radius;
  return result;
}

enum class SweepParam { kEta, kAlpha, kZeta, kEpsilon, kQ };

inline SweepParam sweep_param_from_name(std::string_view name) {
  if (name == "eta") return SweepParam::kEta;
  if (name == "alpha") return SweepParam::kAlpha;
  if (name == "zeta") return SweepParam::kZeta;
  if (name == "epsilon") return SweepParam::kEpsilon;
  if (name == "q") return SweepParam::kQ;
  if (name == "K" || name == "k")
    throw std::invalid_argument(
        "sweep: the ring count is the optimization variable; use an entropy-vs-radius "
        "scan for ring-count grids");
  throw std::invalid_argument("sweep: unknown parameter name");
}

struct SweepSpec {
  SweepParam param = SweepParam::kEta;
  std::vector<double> grid;  // non-empty, strictly increasing
  ExperimentConfig base;
  int max_rings = 0;  // 0 = default_max_rings per grid point

  void validate() const {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] <= grid[i - 1])
        throw std::invalid_argument("sweep: grid must be strictly increasing");
    base.validate();
  }
};

inline ExperimentConfig apply_sweep_value(const ExperimentConfig& base,
                                          SweepParam param, double value) {
  ExperimentConfig cfg = base;
  switch (param) {
    case SweepParam::kEta: cfg.source.eta = value; break;
    case SweepParam::kAlpha: cfg.spatial.alpha = value; break;
    case SweepParam::kZeta: cfg.channel.zeta = value; break;
    case SweepParam::kEpsilon: cfg.channel.epsilon = value; break;
    case SweepParam::kQ: cfg.source.q = value; break;
  }
  return cfg;
}

struct SweepRow {
  double value;
  int k_star;
  double r_m_star;
  double h_star;
  double r_aoi;
};

struct SweepDiagnostics {
  bool radius_nondecreasing = true;
  bool entropy_nonincreasing = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepDiagnostics diagnostics;
};

// One optimal-radius solve per grid point, with trend diagnostics over the
// grid.
inline SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.rows.reserve(spec.grid.size());
  for (const double value : spec.grid) {
    const ExperimentConfig cfg = apply_sweep_value(spec.base, spec.param, value);
    cfg.validate();
    const int max_rings = spec.max_rings > 0 ? spec.max_rings : default_max_rings(cfg);
    const OptResult opt = optimal_radius(cfg, max_rings);
    result.rows.push_back({value, opt.k_star, opt.r_m_star, opt.h_star, opt.r_aoi});
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].r_m_star < result.rows[i - 1].r_m_star)
      result.diagnostics.radius_nondecreasing = false;
    if (result.rows[i].h_star > result.rows[i - 1].h_star)
      result.diagnostics.entropy_nonincreasing = false;
  }
  return result;
}

}  // namespace stfresh
