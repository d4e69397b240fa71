#pragma once

// JSON (de)serialization for ExperimentConfig. The document mirrors the
// struct layout one to one; unknown keys are rejected so typos fail loudly.
// Parsing applies present keys on top of a caller-supplied base, which is
// how file values override preset defaults.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "stfresh/experiment.hpp"

namespace stfresh {

using json = nlohmann::ordered_json;

inline std::string sim_method_name(SimMethod m) {
  return m == SimMethod::kPerNode ? "per_node" : "binomial";
}

inline SimMethod sim_method_from_name(const std::string& name) {
  if (name == "per_node") return SimMethod::kPerNode;
  if (name == "binomial") return SimMethod::kBinomial;
  throw std::invalid_argument("config: sim.method must be per_node or binomial");
}

inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["source"] = {{"q", cfg.source.q}, {"eta", cfg.source.eta}};
  j["spatial"] = {{"ring_width", cfg.spatial.ring_width},
                  {"num_rings", cfg.spatial.num_rings},
                  {"density", cfg.spatial.density},
                  {"alpha", cfg.spatial.alpha}};
  j["channel"] = {{"zeta", cfg.channel.zeta}, {"epsilon", cfg.channel.epsilon}};
  j["sim"] = {{"slots", cfg.sim.slots},
              {"topologies", cfg.sim.topologies},
              {"base_seed", cfg.sim.base_seed},
              {"trace_decimation", cfg.sim.trace_decimation},
              {"method", sim_method_name(cfg.sim.method)}};
  j["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
  return j;
}

namespace detail {

template <class T>
void take(const json& section, const std::string& key, T& field) {
  if (section.contains(key)) field = section.at(key).get<T>();
}

inline void check_keys(const json& section, const std::string& name,
                       std::initializer_list<const char*> known) {
  for (const auto& [key, value] : section.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " + name);
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j,
                                         ExperimentConfig base = ExperimentConfig{}) {
  detail::check_keys(j, "document", {"source", "spatial", "channel", "sim", "output"});
  if (j.contains("source")) {
    const json& s = j.at("source");
    detail::check_keys(s, "source", {"q", "eta"});
    detail::take(s, "q", base.source.q);
    detail::take(s, "eta", base.source.eta);
  }
  if (j.contains("spatial")) {
    const json& s = j.at("spatial");
    detail::check_keys(s, "spatial", {"ring_width", "num_rings", "density", "alpha"});
    detail::take(s, "ring_width", base.spatial.ring_width);
    detail::take(s, "num_rings", base.spatial.num_rings);
    detail::take(s, "density", base.spatial.density);
    detail::take(s, "alpha", base.spatial.alpha);
  }
  if (j.contains("channel")) {
    const json& s = j.at("channel");
    detail::check_keys(s, "channel", {"zeta", "epsilon"});
    detail::take(s, "zeta", base.channel.zeta);
    detail::take(s, "epsilon", base.channel.epsilon);
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    detail::check_keys(s, "sim",
                       {"slots", "topologies", "base_seed", "trace_decimation", "method"});
    detail::take(s, "slots", base.sim.slots);
    detail::take(s, "topologies", base.sim.topologies);
    detail::take(s, "base_seed", base.sim.base_seed);
    detail::take(s, "trace_decimation", base.sim.trace_decimation);
    if (s.contains("method"))
      base.sim.method = sim_method_from_name(s.at("method").get<std::string>());
  }
  if (j.contains("output")) {
    const json& s = j.at("output");
    detail::check_keys(s, "output", {"path", "format"});
    detail::take(s, "path", base.output.path);
    detail::take(s, "format", base.output.format);
  }
  base.validate();
  return base;
}

inline std::string dump_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

inline ExperimentConfig parse_config(const std::string& text,
                                     ExperimentConfig base = ExperimentConfig{}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return config_from_json(j, base);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field type: ") + e.what());
  }
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = ExperimentConfig{}) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

}  // namespace stfresh
