#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stfresh/aloha_channel.hpp"
#include "stfresh/rng.hpp"

using namespace stfresh;

namespace {

double binomial_coeff(int n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

// Oracle: enumerate the number s of transmitting nodes; a slot succeeds when
// exactly one of the s transmissions survives erasure.
double success_prob_by_enumeration(int m, double zeta, double epsilon) {
  double total = 0.0;
  for (int s = 1; s <= m; ++s) {
    const double p_s_transmitters = binomial_coeff(m, s) * std::pow(zeta, s) *
                                    std::pow(1.0 - zeta, m - s);
    const double p_one_survivor =
        s * (1.0 - epsilon) * std::pow(epsilon, s - 1);
    total += p_s_transmitters * p_one_survivor;
  }
  return total;
}

}  // namespace

TEST_CASE("success probability basics", "[aloha_channel]") {
  CHECK(success_prob({0.3, 0.0, 1.0}) == Catch::Approx(0.3).margin(1e-15));
  CHECK(success_prob({0.5, 0.0, 2.0}) == Catch::Approx(0.5).margin(1e-15));
  CHECK(success_prob({0.5, 0.5, 3.0}) == Catch::Approx(0.421875).margin(1e-15));
  CHECK(success_prob({0.0, 0.1, 100.0}) == 0.0);
  CHECK(success_prob({1.0, 0.0, 1.0}) == 1.0);
  CHECK(success_prob({1.0, 0.0, 5.0}) == 0.0);
  CHECK_THROWS_AS(success_prob({0.5, 1.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(success_prob({0.5, 0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("success probability matches exhaustive enumeration", "[aloha_channel]") {
  Xoshiro256 rng(17);
  double worst = 0.0;
  for (int m = 1; m <= 10; ++m) {
    for (int trial = 0; trial < 50; ++trial) {
      const double zeta = rng.uniform01() * 0.98 + 0.01;
      const double epsilon = rng.uniform01() * 0.95;
      const double direct = success_prob({zeta, epsilon, static_cast<double>(m)});
      const double oracle = success_prob_by_enumeration(m, zeta, epsilon);
      worst = std::max(worst, std::abs(direct - oracle));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("success probability is unimodal in the population", "[aloha_channel]") {
  for (const double p_eff : {1e-3, 1e-4}) {
    const int m_hi = static_cast<int>(3.0 / p_eff);
    double best = 0.0;
    int best_m = 1;
    int sign_changes = 0;
    double prev = 0.0;
    bool rising = true;
    for (int m = 1; m <= m_hi; ++m) {
      const double ps = success_prob({p_eff, 0.0, static_cast<double>(m)});
      if (m > 1) {
        if (rising && ps < prev) {
          rising = false;
          ++sign_changes;
        } else if (!rising && ps > prev) {
          ++sign_changes;  // would mean a second mode
        }
      }
      if (ps > best) {
        best = ps;
        best_m = m;
      }
      prev = ps;
    }
    CHECK(sign_changes == 1);
    CHECK(std::abs(best_m * p_eff - 1.0) < 0.05);
  }
}

TEST_CASE("AoI pmf", "[aloha_channel]") {
  CHECK(aoi_pmf(0.3, 0) == 0.3);
  CHECK(aoi_pmf(1.0, 0) == 1.0);
  CHECK(aoi_pmf(1.0, 5) == 0.0);
  CHECK_THROWS_AS(aoi_pmf(0.0, 3), std::domain_error);

  // normalization with the analytic geometric tail
  for (const double ps : {0.5, 0.1, 0.01, 0.001}) {
    const auto horizon = static_cast<std::uint64_t>(std::ceil(50.0 / ps));
    double sum = 0.0;
    for (std::uint64_t d = 0; d <= horizon; ++d) sum += aoi_pmf(ps, d);
    const double tail = std::exp((static_cast<double>(horizon) + 1.0) * std::log1p(-ps));
    CHECK(std::abs(sum + tail - 1.0) < 1e-12);
  }

  // geometric mean: (1 - ps) / ps
  const double ps = 0.5;
  double mean = 0.0;
  for (std::uint64_t d = 0; d <= 2000; ++d) mean += d * aoi_pmf(ps, d);
  CHECK(mean == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("AoI-optimal radius", "[aloha_channel]") {
  const AoiRadius r = aoi_optimal_radius(0.05, 1e-4, 0.1, 10.0);
  CHECK(r.radius == Catch::Approx(265.9615202676218).margin(1e-9));
  CHECK(r.grid_rings == 27);
  CHECK(r.grid_radius == Catch::Approx(270.0).margin(1e-12));

  const AoiRadius unit = aoi_optimal_radius(1.0 / std::numbers::pi, 1.0, 0.0, 0.5);
  CHECK(unit.radius == Catch::Approx(1.0).margin(1e-12));
  CHECK(unit.grid_rings == 2);

  // the continuous radius sits at the argmax of the success probability:
  // scan populations densely around m(r) and compare
  const double m_at_radius = 0.05 * std::numbers::pi * r.radius * r.radius;
  double best_m = 1.0, best_ps = 0.0;
  for (double m = 1.0; m <= 4.0 * m_at_radius; m += 1.0) {
    const double ps = success_prob({1e-4, 0.1, m});
    if (ps > best_ps) {
      best_ps = ps;
      best_m = m;
    }
  }
  CHECK(std::abs(best_m - m_at_radius) / m_at_radius < 0.01);
}
