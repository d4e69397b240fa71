#pragma once

// One full experiment: source, geometry, channel, simulation directives and
// output settings, plus the named presets bundled with the CLI.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stfresh/aloha_channel.hpp"
#include "stfresh/source_model.hpp"
#include "stfresh/spatial_field.hpp"

namespace stfresh {

enum class SimMethod {
  kPerNode,   // reference semantics: one Bernoulli pair per node per slot
  kBinomial,  // equivalent fast path: draw the unerased count, then the sender
};

struct ChannelParams {
  double zeta = 1e-4;
  double epsilon = 0.1;

  void validate() const {
    if (!(zeta >= 0.0 && zeta <= 1.0))
      throw std::invalid_argument("channel: zeta must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::invalid_argument("channel: epsilon must lie in [0, 1)");
  }

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct SimSettings {
  std::uint64_t slots = 1'000'000;
  int topologies = 20;
  std::uint64_t base_seed = 1;
  std::uint64_t trace_decimation = 1;
  SimMethod method = SimMethod::kBinomial;

  void validate() const {
    if (slots < 1) throw std::invalid_argument("sim: slots must be at least 1");
    if (topologies < 1)
      throw std::invalid_argument("sim: topologies must be at least 1");
    if (trace_decimation < 1)
      throw std::invalid_argument("sim: trace_decimation must be at least 1");
  }

  friend bool operator==(const SimSettings&, const SimSettings&) = default;
};

struct OutputSettings {
  std::string path;  // empty = stdout
  std::string format = "csv";

  void validate() const {
    if (format != "csv" && format != "json")
      throw std::invalid_argument("output: format must be csv or json");
  }

  friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct ExperimentConfig {
  SourceParams source;
  SpatialConfig spatial;
  ChannelParams channel;
  SimSettings sim;
  OutputSettings output;

  void validate() const {
    source.validate();
    spatial.validate();
    channel.validate();
    sim.validate();
    output.validate();
  }

  // Channel view for the closed-form analysis: real-valued population.
  ChannelConfig analysis_channel() const {
    return {channel.zeta, channel.epsilon, node_count(spatial).analytic};
  }

  // Channel view for the simulator: rounded population, at least one node.
  ChannelConfig sim_channel() const {
    const NodeCount nodes = node_count(spatial);
    if (nodes.simulated < 1)
      throw std::invalid_argument("simulation needs at least one node in coverage");
    return {channel.zeta, channel.epsilon, static_cast<double>(nodes.simulated)};
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Named presets for the bundled experiment scenarios. fig2a/fig2b are the
// timeline runs (higher transmit probability, short traces); fig3/fig4 the
// radius sweep and optimization base; fig5 the uncertainty-CDF setting, with
// a 5 m ring width so the 25 m and 125 m radii sit exactly on the grid.
inline ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;  // defaults equal the fig3 base parameter set
  if (name == "fig3" || name == "fig4" || name == "default") return cfg;
  if (name == "fig2a" || name == "fig2b") {
    cfg.channel.zeta = 5e-4;
    cfg.spatial.num_rings = name == "fig2a" ? 6 : 15;
    cfg.sim.slots = 2000;
    cfg.sim.topologies = 1;
    return cfg;
  }
  if (name == "fig5") {
    cfg.spatial.ring_width = 5.0;
    cfg.spatial.num_rings = 25;
    return cfg;
  }
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

}  // namespace stfresh
