#pragma once

// Belief tracking for the forgetful receiver: the posterior over the source
// state given the last decoded reading and its age, the per-state
// uncertainty h(y, delta), its stationary average, and its distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stfresh/aloha_channel.hpp"
#include "stfresh/source_model.hpp"
#include "stfresh/spatial_field.hpp"

namespace stfresh {

// Raised when the geometric age sum cannot be truncated within the iteration
// budget (pathological corners such as a period-two source combined with a
// near-zero success probability).
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr double kTailMassTol = 1e-10;
inline constexpr double kGapTol = 1e-16;
inline constexpr std::uint64_t kMaxSumTerms = 1ull << 28;
inline constexpr std::uint64_t kMaxCdfAtoms = 1ull << 24;

// Neumaier-compensated accumulation; keeps long geometric sums exact to a
// few ulp.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  double value() const noexcept { return sum + comp; }
};

}  // namespace detail

// Probability that a decoded reading is correct, marginalized over the
// sender's ring: c = sum_d region_pmf[d] * reliability(d).
inline double aggregate_correct_prob(const SpatialConfig& sc) {
  const auto pmf = region_pmf(sc);
  double c = 0.0;
  for (int d = 0; d < sc.num_rings; ++d)
    c += pmf[static_cast<std::size_t>(d)] * reliability(sc, d);
  return std::min(c, 1.0);
}

// Posterior over the source state in the slot of a reception: Bayes with the
// stationary prior. Receiving at all is independent of the state, so only
// the reading value enters the likelihood.
inline Dist2 posterior_at_reception(const SourceParams& sp, double c, int reading) {
  if (!(c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("belief: c must lie in [0, 1]");
  if (reading != 0 && reading != 1)
    throw std::invalid_argument("belief: reading must be 0 or 1");
  const Dist2 prior = stationary_dist(sp);
  const double num0 = (reading == 0 ? c : 1.0 - c) * prior.p0;
  const double num1 = (reading == 1 ? c : 1.0 - c) * prior.p1;
  const double den = num0 + num1;
  if (!(den > 0.0)) throw std::domain_error("belief: degenerate posterior");
  return {num0 / den, num1 / den};
}

// Uncertainty h(y, delta): entropy of the reception posterior evolved delta
// slots forward.
inline double conditional_entropy_h(const SourceParams& sp, double c, int reading,
                                    std::uint64_t delta) {
  return entropy_bits(evolve(posterior_at_reception(sp, c, reading), sp, delta));
}

// Stationary law of the reading content: p(y) = c * pi_y + (1 - c) * pi_{1-y}.
inline Dist2 reading_marginal(const SourceParams& sp, double c) {
  const Dist2 st = stationary_dist(sp);
  return {c * st.p0 + (1.0 - c) * st.p1, c * st.p1 + (1.0 - c) * st.p0};
}

// Forgetful receiver memory: the last decoded reading and its age. Before
// any reception the reading is kNoReading and the age counts slots since the
// start of the run.
struct ReceiverState {
  static constexpr int kNoReading = -1;

  int last_reading = kNoReading;
  std::uint64_t age = 0;

  bool has_reading() const noexcept { return last_reading >= 0; }
  void on_reception(int reading) noexcept {
    last_reading = reading;
    age = 0;
  }
  void on_silence() noexcept { ++age; }
};

// Reception-time statistics bundle: the posterior for each reading value,
// the stationary reading marginal, and the aggregate correct probability.
struct BeliefTable {
  Dist2 reset_posterior[2];
  Dist2 marginal;
  double correct_prob;
};

inline BeliefTable make_belief_table(const SourceParams& sp, double c) {
  return {{posterior_at_reception(sp, c, 0), posterior_at_reception(sp, c, 1)},
          reading_marginal(sp, c),
          c};
}

inline BeliefTable make_belief_table(const SourceParams& sp, const SpatialConfig& sc) {
  return make_belief_table(sp, aggregate_correct_prob(sc));
}

struct Truncation {
  std::uint64_t delta_max;  // last age enumerated explicitly
  double tail_mass;         // geometric mass beyond delta_max, carried at H(X)
};

// Where to cut the geometric sum over ages. Enumeration stops once the
// remaining AoI mass drops below 1e-10, or earlier once the posterior gap has
// decayed below 1e-16 -- past that point h(y, delta) equals the stationary
// entropy to machine precision, so the tail telescopes exactly. Either way
// the lumped tail is carried at value H(X) and the induced error stays below
// 1e-10 bits.
inline Truncation delta_truncation(double ps, const SourceParams& sp, double c) {
  if (!(ps > 0.0 && ps <= 1.0))
    throw std::domain_error("truncation: success probability must lie in (0, 1]");

  constexpr auto kNoLimit = static_cast<std::uint64_t>(-1);

  std::uint64_t d_mass = 0;
  if (ps < 1.0) {
    const double t = std::log(detail::kTailMassTol) / std::log1p(-ps);
    d_mass = t < 9.0e18 ? static_cast<std::uint64_t>(t) : kNoLimit;
  }

  double gap = 0.0;
  for (int y : {0, 1}) {
    const Dist2 post = posterior_at_reception(sp, c, y);
    const Dist2 st = stationary_dist(sp);
    gap = std::max(gap, std::abs(post.p1 - st.p1));
  }
  const double rate = std::abs(mixing_rate(sp));

  std::uint64_t d_gap;
  if (gap < detail::kGapTol) {
    d_gap = 0;
  } else if (rate == 0.0) {
    d_gap = 1;
  } else if (rate >= 1.0) {
    d_gap = kNoLimit;  // no decay: frozen or period-two chain
  } else {
    const double x = (std::log(detail::kGapTol) - std::log(gap)) / std::log(rate);
    if (x < 0.0)
      d_gap = 0;
    else
      d_gap = x < 9.0e18 ? static_cast<std::uint64_t>(x) + 1 : kNoLimit;
  }

  const std::uint64_t d = std::min(d_mass, d_gap);
  if (d > detail::kMaxSumTerms)
    throw truncation_error("age sum does not converge within the iteration budget");
  const double tail =
      ps < 1.0 ? std::exp((static_cast<double>(d) + 1.0) * std::log1p(-ps)) : 0.0;
  return {d, tail};
}

// Average conditional entropy H(X_n | Y_n, Delta_n): the expectation of
// h(y, delta) under the product law p(y) * ps * (1 - ps)^delta, truncated per
// delta_truncation with the tail mass carried at H(X).
inline double avg_conditional_entropy(const SourceParams& sp, const SpatialConfig& sc,
                                      const ChannelConfig& cc) {
  sp.validate();
  const double ps = success_prob(cc);
  if (!(ps > 0.0 && ps <= 1.0))
    throw std::domain_error(
        "avg_conditional_entropy: success probability must lie in (0, 1]");
  const double c = aggregate_correct_prob(sc);
  const Dist2 st = stationary_dist(sp);
  const BeliefTable table = make_belief_table(sp, c);
  const double p_y[2] = {table.marginal.p0, table.marginal.p1};
  const double mu = mixing_rate(sp);
  const Truncation tr = delta_truncation(ps, sp, c);

  double gap0[2], gap1[2];
  for (int y : {0, 1}) {
    gap0[y] = table.reset_posterior[y].p0 - st.p0;
    gap1[y] = table.reset_posterior[y].p1 - st.p1;
  }

  detail::KahanSum acc;
  double weight = ps;
  double decay = 1.0;
  for (std::uint64_t delta = 0; delta <= tr.delta_max; ++delta) {
    for (int y : {0, 1}) {
      const Dist2 belief{std::clamp(st.p0 + gap0[y] * decay, 0.0, 1.0),
                         std::clamp(st.p1 + gap1[y] * decay, 0.0, 1.0)};
      acc.add(p_y[y] * weight * entropy_bits(belief));
    }
    weight *= 1.0 - ps;
    decay *= mu;
  }
  acc.add(tr.tail_mass * entropy_bits(st));
  return std::clamp(acc.value(), 0.0, 1.0);
}

// Finite distribution of h(y, delta) under the stationary law, with the
// truncated tail folded in as one atom at H(X). Atoms are sorted by value;
// exactly equal values share one atom.
struct HDistribution {
  std::vector<double> values;      // ascending
  std::vector<double> cumulative;  // inclusive prefix masses

  // P(h <= w); right-continuous by construction.
  double cdf(double w) const {
    const auto it = std::upper_bound(values.begin(), values.end(), w);
    if (it == values.begin()) return 0.0;
    return cumulative[static_cast<std::size_t>(it - values.begin()) - 1];
  }

  double support_min() const { return values.front(); }
  double support_max() const { return values.back(); }
};

inline HDistribution h_distribution(const SourceParams& sp, const SpatialConfig& sc,
                                    const ChannelConfig& cc) {
  sp.validate();
  const double ps = success_prob(cc);
  if (!(ps > 0.0 && ps <= 1.0))
    throw std::domain_error(
        "h_distribution: success probability must lie in (0, 1]");
  const double c = aggregate_correct_prob(sc);
  const Dist2 st = stationary_dist(sp);
  const BeliefTable table = make_belief_table(sp, c);
  const double p_y[2] = {table.marginal.p0, table.marginal.p1};
  const double mu = mixing_rate(sp);
  const Truncation tr = delta_truncation(ps, sp, c);

  if (2 * (tr.delta_max + 1) + 1 > detail::kMaxCdfAtoms)
    throw truncation_error("uncertainty distribution would exceed the atom budget");

  double gap0[2], gap1[2];
  for (int y : {0, 1}) {
    gap0[y] = table.reset_posterior[y].p0 - st.p0;
    gap1[y] = table.reset_posterior[y].p1 - st.p1;
  }

  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(2 * (tr.delta_max + 1) + 1);
  double weight = ps;
  double decay = 1.0;
  for (std::uint64_t delta = 0; delta <= tr.delta_max; ++delta) {
    for (int y : {0, 1}) {
      const Dist2 belief{std::clamp(st.p0 + gap0[y] * decay, 0.0, 1.0),
                         std::clamp(st.p1 + gap1[y] * decay, 0.0, 1.0)};
      atoms.emplace_back(entropy_bits(belief), p_y[y] * weight);
    }
    weight *= 1.0 - ps;
    decay *= mu;
  }
  atoms.emplace_back(entropy_bits(st), tr.tail_mass);
  std::sort(atoms.begin(), atoms.end());

  HDistribution dist;
  dist.values.reserve(atoms.size());
  dist.cumulative.reserve(atoms.size());
  detail::KahanSum mass;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    mass.add(atoms[i].second);
    if (!dist.values.empty() && atoms[i].first == dist.values.back())
      dist.cumulative.back() = mass.value();
    else {
      dist.values.push_back(atoms[i].first);
      dist.cumulative.push_back(mass.value());
    }
  }
  return dist;
}

// CDF of the uncertainty evaluated on a caller-supplied non-decreasing
// threshold grid.
inline std::vector<double> uncertainty_cdf(const SourceParams& sp,
                                           const SpatialConfig& sc,
                                           const ChannelConfig& cc,
                                           std::span<const double> thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] < thresholds[i - 1])
      throw std::invalid_argument("uncertainty_cdf: thresholds must be sorted");
  const HDistribution dist = h_distribution(sp, sc, cc);
  std::vector<double> out(thresholds.size());
  for (std::size_t i = 0; i < thresholds.size(); ++i) out[i] = dist.cdf(thresholds[i]);
  return out;
}

}  // namespace stfresh
