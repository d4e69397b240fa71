#pragma once

// Slot-level simulator with a static topology: the source evolves, nodes
// contend over slotted ALOHA, and the forgetful receiver tracks the last
// decoded reading and its age. The per-slot uncertainty is evaluated with
// the analytic aggregate correct-probability, mirroring a location-unaware
// receiver.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "stfresh/belief_engine.hpp"
#include "stfresh/experiment.hpp"
#include "stfresh/rng.hpp"

namespace stfresh {

// Static node placement, reduced to ring indices (reliability depends only
// on the ring). Reproducible from (spatial config, seed).
struct Topology {
  std::vector<std::int32_t> ring_index;
  std::uint64_t seed = 0;
};

inline Topology make_topology(const SpatialConfig& sc, std::uint64_t seed) {
  const NodeCount nodes = node_count(sc);
  if (nodes.simulated < 1)
    throw std::invalid_argument("topology: no nodes fall within coverage");
  Topology topo;
  topo.seed = seed;
  topo.ring_index.reserve(static_cast<std::size_t>(nodes.simulated));
  Xoshiro256 rng(stream_key(seed, 0));
  for (std::int64_t i = 0; i < nodes.simulated; ++i)
    topo.ring_index.push_back(static_cast<std::int32_t>(sample_region(sc, rng)));
  return topo;
}

struct SimResult {
  double time_avg_h = 0.0;
  double empirical_ps = 0.0;
  double empirical_aoi_mean = 0.0;  // mean age per slot, from the first reception on
  std::uint64_t reception_count = 0;
  std::uint64_t flip_count = 0;  // decoded readings that disagreed with the state
  std::vector<std::pair<std::uint64_t, double>> h_samples;  // decimated (slot, h)
};

namespace detail {

// Inversion sampling of Binomial(n, p), walking the PMF from k = 0.
// Expected O(1 + n*p) iterations. Used only to classify a slot as zero, one
// or many unerased transmissions; once n*p is large enough for P(0) to
// underflow, the single-transmission probability is zero to double
// precision anyway.
inline std::uint64_t sample_binomial(Xoshiro256& rng, std::uint64_t n, double p) {
  if (p <= 0.0 || n == 0) return 0;
  if (p >= 1.0) return n;
  const double u = rng.uniform01();
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double cdf = pmf;
  const double odds = p / (1.0 - p);
  std::uint64_t k = 0;
  while (u >= cdf && k < n) {
    pmf *= odds * (static_cast<double>(n - k) / (static_cast<double>(k) + 1.0));
    ++k;
    cdf += pmf;
  }
  return k;
}

}  // namespace detail

// Core slot loop. The observer sees every slot:
//   observer(slot, h_bits, reading, age, reception)
// with reading = -1 before the first reception (warm-up, h = H(X); the age
// then counts slots since the start of the run).
template <class Observer>
SimResult run_observed(const ExperimentConfig& cfg, std::uint64_t seed,
                       Observer&& observer) {
  cfg.validate();
  const ChannelConfig channel = cfg.sim_channel();
  const auto num_nodes = static_cast<std::uint64_t>(channel.node_count);
  const Topology topo = make_topology(cfg.spatial, seed);

  const SourceParams& sp = cfg.source;
  const Dist2 st = stationary_dist(sp);
  const double stationary_entropy = entropy_bits(st);
  const double c = aggregate_correct_prob(cfg.spatial);
  const double p_tx = cfg.channel.zeta;
  const double p_keep = 1.0 - cfg.channel.epsilon;
  const double p_eff = channel.effective_tx_prob();
  const double p_flip_from[2] = {sp.q, sp.eta * sp.q};

  std::vector<double> lambda(static_cast<std::size_t>(cfg.spatial.num_rings));
  for (int d = 0; d < cfg.spatial.num_rings; ++d)
    lambda[static_cast<std::size_t>(d)] = reliability(cfg.spatial, d);

  // Lazily grown h(y, delta) table so the emitted trace matches
  // conditional_entropy_h bit for bit.
  std::vector<double> h_table[2];
  const auto h_of = [&](int y, std::uint64_t age) {
    auto& table = h_table[y];
    while (table.size() <= age)
      table.push_back(conditional_entropy_h(sp, c, y, table.size()));
    return table[age];
  };

  Xoshiro256 rng(stream_key(seed, 1));
  int state = rng.bernoulli(st.p1) ? 1 : 0;  // initial state from the stationary law
  ReceiverState receiver;

  SimResult result;
  detail::KahanSum h_sum;
  std::uint64_t aoi_sum = 0;
  std::uint64_t aoi_slots = 0;

  for (std::uint64_t slot = 0; slot < cfg.sim.slots; ++slot) {
    if (rng.uniform01() < p_flip_from[state]) state = 1 - state;

    int sender_ring = -1;
    if (cfg.sim.method == SimMethod::kPerNode) {
      std::uint64_t unerased = 0;
      for (const std::int32_t ring : topo.ring_index) {
        if (rng.bernoulli(p_tx) && rng.bernoulli(p_keep)) {
          ++unerased;
          sender_ring = ring;
        }
      }
      if (unerased != 1) sender_ring = -1;
    } else {
      if (detail::sample_binomial(rng, num_nodes, p_eff) == 1)
        sender_ring = topo.ring_index[rng.below(num_nodes)];
    }

    const bool reception = sender_ring >= 0;
    if (reception) {
      const bool correct = rng.bernoulli(lambda[static_cast<std::size_t>(sender_ring)]);
      if (!correct) ++result.flip_count;
      receiver.on_reception(correct ? state : 1 - state);
      ++result.reception_count;
    } else {
      receiver.on_silence();
    }

    const double h = receiver.has_reading() ? h_of(receiver.last_reading, receiver.age)
                                            : stationary_entropy;
    h_sum.add(h);
    if (receiver.has_reading()) {
      aoi_sum += receiver.age;
      ++aoi_slots;
    }
    observer(slot, h, receiver.last_reading, receiver.age, reception);
  }

  result.time_avg_h = h_sum.value() / static_cast<double>(cfg.sim.slots);
  result.empirical_ps = static_cast<double>(result.reception_count) /
                        static_cast<double>(cfg.sim.slots);
  result.empirical_aoi_mean =
      aoi_slots > 0 ? static_cast<double>(aoi_sum) / static_cast<double>(aoi_slots)
                    : 0.0;
  return result;
}

inline SimResult run(const ExperimentConfig& cfg, std::uint64_t seed,
                     bool collect_trace = false) {
  if (!collect_trace)
    return run_observed(cfg, seed, [](std::uint64_t, double, int, std::uint64_t, bool) {});
  std::vector<std::pair<std::uint64_t, double>> samples;
  SimResult result = run_observed(
      cfg, seed, [&](std::uint64_t slot, double h, int, std::uint64_t, bool) {
        if (slot % cfg.sim.trace_decimation == 0) samples.emplace_back(slot, h);
      });
  result.h_samples = std::move(samples);
  return result;
}

struct TimelinePoint {
  std::uint64_t slot;
  double h_bits;
  int reading;  // -1 before the first reception
  std::uint64_t age;
  bool reception;
};

// Full per-slot trace, for plotting the uncertainty path.
inline std::vector<TimelinePoint> timeline(const ExperimentConfig& cfg,
                                           std::uint64_t seed,
                                           std::uint64_t num_slots) {
  ExperimentConfig local = cfg;
  local.sim.slots = num_slots;
  std::vector<TimelinePoint> points;
  points.reserve(num_slots);
  run_observed(local, seed,
               [&](std::uint64_t slot, double h, int reading, std::uint64_t age,
                   bool reception) {
                 points.push_back({slot, h, reading, age, reception});
               });
  return points;
}

// Fixed splitting rule for batch runs: run i owns seed
// mix64(mix64(base_seed) + i), a pure function of (base_seed, i).
constexpr std::uint64_t batch_run_seed(std::uint64_t base_seed,
                                       std::uint64_t run_index) noexcept {
  return mix64(mix64(base_seed) + run_index);
}

struct BatchResult {
  double mean_h = 0.0;
  double stderr_h = 0.0;
  std::vector<SimResult> runs;
};

// Independent topologies in parallel. Results land in index order, so the
// aggregate is identical no matter how the runs are scheduled.
inline BatchResult run_batch(const ExperimentConfig& cfg, int num_topologies,
                             std::uint64_t slots_per_run, std::uint64_t base_seed) {
  if (num_topologies < 1)
    throw std::invalid_argument("run_batch: need at least one topology");
  ExperimentConfig local = cfg;
  local.sim.slots = slots_per_run;
  local.validate();

  BatchResult batch;
  batch.runs.resize(static_cast<std::size_t>(num_topologies));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto worker = [&]() {
    for (int i = next.fetch_add(1); i < num_topologies; i = next.fetch_add(1)) {
      try {
        batch.runs[static_cast<std::size_t>(i)] =
            run(local, batch_run_seed(base_seed, static_cast<std::uint64_t>(i)));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads = std::min<unsigned>(static_cast<unsigned>(num_topologies), hw);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  detail::KahanSum mean_acc;
  for (const SimResult& r : batch.runs) mean_acc.add(r.time_avg_h);
  batch.mean_h = mean_acc.value() / num_topologies;
  if (num_topologies > 1) {
    detail::KahanSum var_acc;
    for (const SimResult& r : batch.runs) {
      const double d = r.time_avg_h - batch.mean_h;
      var_acc.add(d * d);
    }
    batch.stderr_h = std::sqrt(var_acc.value() / (num_topologies - 1)) /
                     std::sqrt(static_cast<double>(num_topologies));
  }
  return batch;
}

}  // namespace stfresh
