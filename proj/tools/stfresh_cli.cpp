// stfresh command-line front end: entropy-vs-radius sweeps, uncertainty
// timelines and CDFs, radius optimization, and Monte-Carlo validation runs.
// All outputs are byte-deterministic given (config, flags, seed).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stfresh/belief_engine.hpp"
#include "stfresh/config_io.hpp"
#include "stfresh/monte_carlo.hpp"
#include "stfresh/sweep.hpp"
#include "stfresh/text_format.hpp"

namespace {

using namespace stfresh;

struct CommonOpts {
  std::string preset_name = "default";
  std::string config_path;
  std::optional<double> q, eta, alpha, zeta, epsilon, rho, ring_width;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool json = false;
  bool dump = false;
};

void attach_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--preset", o.preset_name,
                  "named preset: fig2a, fig2b, fig3, fig4, fig5, default");
  sub->add_option("--config", o.config_path, "JSON config file, applied over the preset");
  sub->add_option("--q", o.q, "source 0->1 transition probability");
  sub->add_option("--eta", o.eta, "source asymmetry factor");
  sub->add_option("--alpha", o.alpha, "reliability exponent");
  sub->add_option("--zeta", o.zeta, "per-slot transmit probability");
  sub->add_option("--epsilon", o.epsilon, "erasure probability");
  sub->add_option("--rho", o.rho, "node density [nodes/m^2]");
  sub->add_option("--ring-width", o.ring_width, "ring width [m]");
  sub->add_option("--k", o.k, "number of rings (coverage radius = k * ring width)");
  sub->add_option("--seed", o.seed, "base seed (overrides sim.base_seed)");
  sub->add_option("--out", o.out, "output path (default: stdout)");
  sub->add_flag("--dump-config", o.dump, "print the effective config as JSON and exit");
}

ExperimentConfig resolve(const CommonOpts& o) {
  ExperimentConfig cfg = preset(o.preset_name);
  if (!o.config_path.empty()) cfg = load_config_file(o.config_path, cfg);
  if (o.q) cfg.source.q = *o.q;
  if (o.eta) cfg.source.eta = *o.eta;
  if (o.alpha) cfg.spatial.alpha = *o.alpha;
  if (o.zeta) cfg.channel.zeta = *o.zeta;
  if (o.epsilon) cfg.channel.epsilon = *o.epsilon;
  if (o.rho) cfg.spatial.density = *o.rho;
  if (o.ring_width) cfg.spatial.ring_width = *o.ring_width;
  if (o.k) cfg.spatial.num_rings = *o.k;
  if (o.seed) cfg.sim.base_seed = *o.seed;
  if (o.out) cfg.output.path = *o.out;
  if (o.json) cfg.output.format = "json";
  cfg.validate();
  return cfg;
}

// Runs the writer against the configured sink (file or stdout).
template <class Writer>
void emit(const ExperimentConfig& cfg, Writer&& writer) {
  if (cfg.output.path.empty()) {
    writer(std::cout);
    std::cout.flush();
  } else {
    std::ofstream out(cfg.output.path);
    if (!out) throw std::invalid_argument("cannot open output file " + cfg.output.path);
    writer(out);
  }
}

int ring_count_for_radius(const SpatialConfig& sc, double radius) {
  const double ratio = radius / sc.ring_width;
  const auto k = static_cast<std::int64_t>(std::llround(ratio));
  if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("radius " + format_double(radius) +
                                " is not a positive multiple of the ring width");
  return static_cast<int>(k);
}

void cmd_entropy_sweep(const ExperimentConfig& cfg, int k_min, int k_max) {
  if (k_max == 0) k_max = default_max_rings(cfg);
  if (k_min < 1 || k_max < k_min)
    throw std::invalid_argument("entropy-sweep: empty ring-count range");
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) grid.push_back(k);
  const auto curve = entropy_vs_radius(cfg, grid);
  emit(cfg, [&](std::ostream& os) {
    os << "K,R_m,H_bits,p_s,c\n";
    for (const RadiusPoint& p : curve)
      os << p.num_rings << ',' << format_double(p.radius) << ','
         << format_double(p.avg_entropy) << ',' << format_double(p.ps) << ','
         << format_double(p.correct_prob) << '\n';
  });
}

void cmd_timeline(const ExperimentConfig& cfg, std::optional<std::uint64_t> slots) {
  const std::uint64_t n = slots.value_or(cfg.sim.slots);
  if (n < 1) throw std::invalid_argument("timeline: slots must be at least 1");
  const auto trace = timeline(cfg, cfg.sim.base_seed, n);
  emit(cfg, [&](std::ostream& os) {
    os << "slot,h_bits,y,delta,reception\n";
    for (const TimelinePoint& p : trace) {
      if (p.slot % cfg.sim.trace_decimation != 0) continue;
      os << p.slot << ',' << format_double(p.h_bits) << ',' << p.reading << ','
         << p.age << ',' << (p.reception ? 1 : 0) << '\n';
    }
  });
}

void cmd_cdf(const ExperimentConfig& cfg, std::vector<double> radii,
             std::vector<double> alphas, double w_min, double w_max, int w_count) {
  if (radii.empty()) radii.push_back(cfg.spatial.coverage_radius());
  if (alphas.empty()) alphas.push_back(cfg.spatial.alpha);
  if (w_count < 2 || !(w_max > w_min))
    throw std::invalid_argument("cdf: threshold grid needs w_max > w_min and >= 2 points");
  std::vector<double> thresholds(static_cast<std::size_t>(w_count));
  for (int i = 0; i < w_count; ++i)
    thresholds[static_cast<std::size_t>(i)] =
        w_min + (w_max - w_min) * i / (w_count - 1);

  std::vector<int> ring_counts;
  ring_counts.reserve(radii.size());
  for (const double radius : radii)
    ring_counts.push_back(ring_count_for_radius(cfg.spatial, radius));

  emit(cfg, [&](std::ostream& os) {
    os << "alpha,R_m,w_bits,cdf\n";
    for (const double alpha : alphas) {
      for (std::size_t r = 0; r < radii.size(); ++r) {
        const double radius = radii[r];
        SpatialConfig spatial = cfg.spatial;
        spatial.alpha = alpha;
        spatial.num_rings = ring_counts[r];
        const ChannelConfig channel{cfg.channel.zeta, cfg.channel.epsilon,
                                    node_count(spatial).analytic};
        const auto values = uncertainty_cdf(cfg.source, spatial, channel, thresholds);
        for (std::size_t i = 0; i < thresholds.size(); ++i)
          os << format_double(alpha) << ',' << format_double(radius) << ','
             << format_double(thresholds[i]) << ',' << format_double(values[i])
             << '\n';
      }
    }
  });
}

double current_sweep_value(const ExperimentConfig& cfg, SweepParam param) {
  switch (param) {
    case SweepParam::kEta: return cfg.source.eta;
    case SweepParam::kAlpha: return cfg.spatial.alpha;
    case SweepParam::kZeta: return cfg.channel.zeta;
    case SweepParam::kEpsilon: return cfg.channel.epsilon;
    case SweepParam::kQ: return cfg.source.q;
  }
  return 0.0;
}

void cmd_optimize(const ExperimentConfig& cfg, const std::string& param_name,
                  std::vector<double> values, int max_rings) {
  SweepSpec spec;
  spec.param = sweep_param_from_name(param_name);
  spec.base = cfg;
  spec.max_rings = max_rings;
  spec.grid = values.empty() ? std::vector<double>{current_sweep_value(cfg, spec.param)}
                             : std::move(values);
  const SweepResult result = sweep(spec);

  if (cfg.output.format == "json") {
    json rows = json::array();
    for (const SweepRow& r : result.rows) {
      const ExperimentConfig point = apply_sweep_value(cfg, spec.param, r.value);
      const AoiRadius aoi =
          aoi_optimal_radius(point.spatial.density, point.channel.zeta,
                             point.channel.epsilon, point.spatial.ring_width);
      rows.push_back({{"sweep_value", r.value},
                      {"K_star", r.k_star},
                      {"R_m_star", r.r_m_star},
                      {"H_star", r.h_star},
                      {"R_aoi", r.r_aoi},
                      {"R_aoi_eps_form", aoi.radius_eps_form}});
    }
    emit(cfg, [&](std::ostream& os) { os << rows.dump(2) << '\n'; });
  } else {
    emit(cfg, [&](std::ostream& os) {
      os << "sweep_value,K_star,R_m_star,H_star,R_aoi\n";
      for (const SweepRow& r : result.rows)
        os << format_double(r.value) << ',' << r.k_star << ','
           << format_double(r.r_m_star) << ',' << format_double(r.h_star) << ','
           << format_double(r.r_aoi) << '\n';
    });
  }

  const AoiRadius aoi = aoi_optimal_radius(cfg.spatial.density, cfg.channel.zeta,
                                           cfg.channel.epsilon, cfg.spatial.ring_width);
  std::cerr << "R_aoi(unit load) = " << format_double(aoi.radius)
            << " m, eps-form variant = " << format_double(aoi.radius_eps_form)
            << " m\n"
            << "diagnostics: radius_nondecreasing="
            << (result.diagnostics.radius_nondecreasing ? 1 : 0)
            << " entropy_nonincreasing="
            << (result.diagnostics.entropy_nonincreasing ? 1 : 0) << '\n';
}

void cmd_simulate(const ExperimentConfig& cfg, std::optional<int> runs,
                  std::optional<std::uint64_t> slots) {
  const int n_runs = runs.value_or(cfg.sim.topologies);
  const std::uint64_t n_slots = slots.value_or(cfg.sim.slots);
  if (n_runs < 1) throw std::invalid_argument("simulate: runs must be at least 1");
  if (n_slots < 1) throw std::invalid_argument("simulate: slots must be at least 1");

  const BatchResult batch = run_batch(cfg, n_runs, n_slots, cfg.sim.base_seed);
  const double analytic =
      avg_conditional_entropy(cfg.source, cfg.spatial, cfg.analysis_channel());
  const double rel_err = std::abs(batch.mean_h - analytic) / analytic;

  emit(cfg, [&](std::ostream& os) {
    os << "run,seed,time_avg_h,empirical_ps,aoi_mean\n";
    for (std::size_t i = 0; i < batch.runs.size(); ++i) {
      const SimResult& r = batch.runs[i];
      os << i << ',' << batch_run_seed(cfg.sim.base_seed, i) << ','
         << format_double(r.time_avg_h) << ',' << format_double(r.empirical_ps)
         << ',' << format_double(r.empirical_aoi_mean) << '\n';
    }
    os << "mean,stderr,analytic_H,rel_err\n";
    os << format_double(batch.mean_h) << ',' << format_double(batch.stderr_h) << ','
       << format_double(analytic) << ',' << format_double(rel_err) << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatio-temporal freshness of a Markov source tracked over slotted ALOHA"};
  app.require_subcommand(1);

  CommonOpts sweep_opts;
  int k_min = 1, k_max = 0;
  auto* sweep_cmd =
      app.add_subcommand("entropy-sweep", "average conditional entropy vs coverage radius");
  attach_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--k-min", k_min, "smallest ring count");
  sweep_cmd->add_option("--k-max", k_max, "largest ring count (0 = twice the AoI radius)");

  CommonOpts tl_opts;
  std::optional<std::uint64_t> tl_slots;
  auto* tl_cmd = app.add_subcommand("timeline", "per-slot uncertainty trace of one run");
  attach_common(tl_cmd, tl_opts);
  tl_cmd->add_option("--slots", tl_slots, "number of slots to trace");

  CommonOpts cdf_opts;
  std::vector<double> cdf_radii, cdf_alphas;
  double w_min = 0.0, w_max = 1.0;
  int w_count = 201;
  auto* cdf_cmd = app.add_subcommand("cdf", "CDF of the per-slot uncertainty");
  attach_common(cdf_cmd, cdf_opts);
  cdf_cmd->add_option("--radii", cdf_radii, "coverage radii [m], comma separated")
      ->delimiter(',');
  cdf_cmd->add_option("--alphas", cdf_alphas, "reliability exponents, comma separated")
      ->delimiter(',');
  cdf_cmd->add_option("--w-min", w_min, "lowest threshold [bit]");
  cdf_cmd->add_option("--w-max", w_max, "highest threshold [bit]");
  cdf_cmd->add_option("--w-count", w_count, "number of thresholds");

  CommonOpts opt_opts;
  std::string sweep_param = "eta";
  std::vector<double> sweep_values;
  int opt_k_max = 0;
  auto* opt_cmd =
      app.add_subcommand("optimize", "entropy-minimizing radius, optionally swept");
  attach_common(opt_cmd, opt_opts);
  opt_cmd->add_option("--sweep-param", sweep_param,
                      "swept parameter: eta, alpha, zeta, epsilon, q");
  opt_cmd->add_option("--sweep-values", sweep_values, "grid values, comma separated")
      ->delimiter(',');
  opt_cmd->add_option("--k-max", opt_k_max, "scan bound in rings (0 = twice the AoI radius)");
  opt_cmd->add_flag("--json", opt_opts.json, "emit a JSON array instead of CSV");

  CommonOpts sim_opts;
  std::optional<int> sim_runs;
  std::optional<std::uint64_t> sim_slots;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Monte-Carlo batch vs the closed-form value");
  attach_common(sim_cmd, sim_opts);
  sim_cmd->add_option("--runs", sim_runs, "number of independent topologies");
  sim_cmd->add_option("--slots", sim_slots, "slots per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sweep_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(sweep_opts);
      if (sweep_opts.dump) { emit(cfg, [&](std::ostream& os) { os << dump_config(cfg); }); return 0; }
      cmd_entropy_sweep(cfg, k_min, k_max);
    } else if (tl_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(tl_opts);
      if (tl_opts.dump) { emit(cfg, [&](std::ostream& os) { os << dump_config(cfg); }); return 0; }
      cmd_timeline(cfg, tl_slots);
    } else if (cdf_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(cdf_opts);
      if (cdf_opts.dump) { emit(cfg, [&](std::ostream& os) { os << dump_config(cfg); }); return 0; }
      cmd_cdf(cfg, cdf_radii, cdf_alphas, w_min, w_max, w_count);
    } else if (opt_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(opt_opts);
      if (opt_opts.dump) { emit(cfg, [&](std::ostream& os) { os << dump_config(cfg); }); return 0; }
      cmd_optimize(cfg, sweep_param, sweep_values, opt_k_max);
    } else if (sim_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(sim_opts);
      if (sim_opts.dump) { emit(cfg, [&](std::ostream& os) { os << dump_config(cfg); }); return 0; }
      cmd_simulate(cfg, sim_runs, sim_slots);
    }
  } catch (const stfresh::truncation_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
