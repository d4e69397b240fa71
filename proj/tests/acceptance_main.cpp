// Acceptance suite: exercises the library end to end and prints one
// pass/fail line per criterion. Criterion 4 runs a reduced-scale batch by
// default; pass --full for the long 20 x 1e6 validation. The first argument
// is the path to the CLI binary (used by the determinism criterion).

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stfresh/belief_engine.hpp"
#include "stfresh/monte_carlo.hpp"
#include "stfresh/rng.hpp"
#include "stfresh/sweep.hpp"

using namespace stfresh;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ": " << detail << '\n';
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- criterion 1: success probability vs exhaustive enumeration ----------

double binomial_coeff(int n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

double success_prob_by_enumeration(int m, double zeta, double epsilon) {
  double total = 0.0;
  for (int s = 1; s <= m; ++s)
    total += binomial_coeff(m, s) * std::pow(zeta, s) * std::pow(1.0 - zeta, m - s) *
             s * (1.0 - epsilon) * std::pow(epsilon, s - 1);
  return total;
}

void criterion1() {
  Xoshiro256 rng(101);
  double worst = 0.0;
  for (int m = 1; m <= 10; ++m) {
    for (int trial = 0; trial < 40; ++trial) {
      const double zeta = rng.uniform01() * 0.98 + 0.01;
      const double epsilon = rng.uniform01() * 0.95;
      const double direct = success_prob({zeta, epsilon, static_cast<double>(m)});
      const double oracle = success_prob_by_enumeration(m, zeta, epsilon);
      worst = std::max(worst, std::abs(direct - oracle));
    }
  }
  report("C1", worst < 1e-12,
         "success_prob vs exhaustive enumeration, m <= 10 (max err " + fmt(worst) + ")");
}

// ---- criterion 2: closed-form evolve vs matrix power ----------------------

Dist2 evolve_by_matrix_power(const Dist2& dist, const SourceParams& sp,
                             std::uint64_t steps) {
  const Matrix2 a = transition_matrix(sp);
  double p0 = dist.p0, p1 = dist.p1;
  for (std::uint64_t i = 0; i < steps; ++i) {
    const double n0 = p0 * a.a[0][0] + p1 * a.a[1][0];
    const double n1 = p0 * a.a[0][1] + p1 * a.a[1][1];
    p0 = n0;
    p1 = n1;
  }
  return {p0, p1};
}

void criterion2() {
  Xoshiro256 rng(202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    SourceParams sp;
    sp.q = rng.uniform01() * 0.999 + 0.001;
    sp.eta = std::max(1e-6, rng.uniform01() * (1.0 / sp.q - 1e-9));
    const double p1 = rng.uniform01();
    const Dist2 dist{1.0 - p1, p1};
    const std::uint64_t steps = rng.below(1001);
    const Dist2 fast = evolve(dist, sp, steps);
    const Dist2 slow = evolve_by_matrix_power(dist, sp, steps);
    worst = std::max({worst, std::abs(fast.p0 - slow.p0), std::abs(fast.p1 - slow.p1)});
  }
  report("C2", worst < 1e-12,
         "closed-form evolve vs matrix power, 1000 cases, steps <= 1000 (max err " +
             fmt(worst) + ")");
}

// ---- criterion 3: normalization and limit suite ---------------------------

void criterion3() {
  bool ok = true;
  std::string detail;

  double worst_sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const auto pmf = region_pmf({10.0, k, 0.05, 0.02});
    double sum = 0.0;
    for (const double p : pmf) sum += p;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  if (worst_sum >= 1e-12) {
    ok = false;
    detail += " region_pmf sum err " + fmt(worst_sum) + ";";
  }

  for (const double ps : {0.4, 0.05, 0.002}) {
    const auto horizon = static_cast<std::uint64_t>(std::ceil(50.0 / ps));
    double sum = 0.0;
    for (std::uint64_t d = 0; d <= horizon; ++d) sum += aoi_pmf(ps, d);
    const double tail = std::exp((static_cast<double>(horizon) + 1.0) * std::log1p(-ps));
    if (std::abs(sum + tail - 1.0) >= 1e-12) {
      ok = false;
      detail += " aoi_pmf normalization failed at ps=" + fmt(ps) + ";";
    }
  }

  // vanishing transmit probability: the average collapses to the stationary
  // entropy and h has converged at the truncation point
  ExperimentConfig cfg = preset("fig3");
  cfg.channel.zeta = 3e-13;
  const ChannelConfig cc = cfg.analysis_channel();
  const double ps = success_prob(cc);
  const double c = aggregate_correct_prob(cfg.spatial);
  const double hx = entropy_bits(stationary_dist(cfg.source));
  const Truncation tr = delta_truncation(ps, cfg.source, c);
  const double h_end0 = conditional_entropy_h(cfg.source, c, 0, tr.delta_max);
  const double h_end1 = conditional_entropy_h(cfg.source, c, 1, tr.delta_max);
  const double avg = avg_conditional_entropy(cfg.source, cfg.spatial, cc);
  if (!(ps < 1e-6)) {
    ok = false;
    detail += " ps not small;";
  }
  if (std::abs(h_end0 - hx) >= 1e-9 || std::abs(h_end1 - hx) >= 1e-9) {
    ok = false;
    detail += " h at delta_max off by " + fmt(std::abs(h_end0 - hx)) + ";";
  }
  if (std::abs(avg - hx) >= 1e-6) {
    ok = false;
    detail += " avg off by " + fmt(std::abs(avg - hx)) + ";";
  }

  report("C3", ok,
         "normalization and limits (ps=" + fmt(ps) + ", |avg-H(X)|=" +
             fmt(std::abs(avg - hx)) + ")" + detail);
}

// ---- criterion 4: analysis vs simulation ----------------------------------

void criterion4(bool full_scale) {
  const int topologies = full_scale ? 20 : 5;
  const std::uint64_t slots = full_scale ? 1'000'000 : 100'000;
  const double tolerance = full_scale ? 0.02 : 0.05;

  bool ok = true;
  double worst = 0.0;
  std::uint64_t seed = 777;
  for (const double eta : {1.0, 5.0}) {
    for (const int rings : {3, 6, 12, 24}) {
      ExperimentConfig cfg = preset("fig3");
      cfg.source.eta = eta;
      cfg.spatial.num_rings = rings;
      const double analytic =
          avg_conditional_entropy(cfg.source, cfg.spatial, cfg.analysis_channel());
      const BatchResult batch = run_batch(cfg, topologies, slots, seed++);
      const double rel = std::abs(batch.mean_h - analytic) / analytic;
      worst = std::max(worst, rel);
      if (rel >= tolerance) ok = false;
    }
  }
  report("C4", ok,
         std::string(full_scale ? "full" : "desk") + "-scale batch vs closed form, " +
             "eta in {1,5} x K in {3,6,12,24} (worst rel err " + fmt(worst) +
             ", tol " + fmt(tolerance) + ")");
}

// ---- criterion 5: interior minimum below the AoI-optimal radius ------------

void criterion5() {
  const ExperimentConfig cfg = preset("fig3");
  const OptResult opt = optimal_radius(cfg, 40);
  const double r_aoi =
      1.0 / std::sqrt(std::numbers::pi * 0.05 * 1e-4 * 0.9);  // independent form
  const bool interior = opt.k_star > 1 && opt.k_star < 40;
  const bool below = opt.r_m_star < r_aoi;
  const bool consistent = std::abs(opt.r_aoi - r_aoi) < 1e-6;
  report("C5", interior && below && consistent,
         "interior argmin at R_m*=" + fmt(opt.r_m_star) + " m < R_aoi=" + fmt(r_aoi) +
             " m (K*=" + std::to_string(opt.k_star) + ")");
}

// ---- criterion 6: monotone trends of the optimum ---------------------------

void criterion6() {
  const std::vector<double> etas{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
  SweepSpec spec;
  spec.param = SweepParam::kEta;
  spec.grid = etas;
  spec.base = preset("fig4");
  spec.max_rings = 54;

  spec.base.spatial.alpha = 0.02;
  const SweepResult mild = sweep(spec);
  spec.base.spatial.alpha = 0.06;
  const SweepResult steep = sweep(spec);

  bool ok = true;
  std::string detail;
  if (!mild.diagnostics.radius_nondecreasing || !steep.diagnostics.radius_nondecreasing) {
    ok = false;
    detail += " R_m* not non-decreasing;";
  }
  if (!mild.diagnostics.entropy_nonincreasing || !steep.diagnostics.entropy_nonincreasing) {
    ok = false;
    detail += " H* not non-increasing;";
  }
  for (const SweepResult* res : {&mild, &steep}) {
    const double r_aoi = res->rows.front().r_aoi;
    const double gap_first = r_aoi - res->rows.front().r_m_star;
    const double gap_last = r_aoi - res->rows.back().r_m_star;
    if (!(gap_last < gap_first) || !(res->rows.back().r_m_star >= 0.75 * r_aoi)) {
      ok = false;
      detail += " no approach to R_aoi;";
    }
  }
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (steep.rows[i].r_m_star > mild.rows[i].r_m_star) {
      ok = false;
      detail += " alpha=0.06 radius above alpha=0.02 at eta=" + fmt(etas[i]) + ";";
    }
  }
  report("C6", ok,
         "R_m*(eta) non-decreasing toward R_aoi, H*(eta) non-increasing, higher alpha "
         "shrinks the optimum (R_m* at eta=50: " +
             fmt(mild.rows.back().r_m_star) + "/" + fmt(steep.rows.back().r_m_star) +
             " m)" + detail);
}

// ---- criterion 7: CDF support ordering -------------------------------------

void criterion7() {
  const ExperimentConfig fig5 = preset("fig5");
  const auto dist_for = [&](double alpha, int rings) {
    SpatialConfig sc = fig5.spatial;
    sc.alpha = alpha;
    sc.num_rings = rings;
    const ChannelConfig cc{fig5.channel.zeta, fig5.channel.epsilon,
                           node_count(sc).analytic};
    return h_distribution(fig5.source, sc, cc);
  };

  const HDistribution near_mild = dist_for(0.02, 5);    // R_m = 25 m
  const HDistribution far_mild = dist_for(0.02, 25);    // R_m = 125 m
  const HDistribution near_steep = dist_for(0.06, 5);
  const HDistribution far_steep = dist_for(0.06, 25);

  bool ok = true;
  std::string detail;
  if (!(far_mild.support_min() > near_mild.support_min())) {
    ok = false;
    detail += " support ordering violated;";
  }
  if (!(far_mild.support_min() >= 0.35)) {
    ok = false;
    detail += " far minimum below 0.35;";
  }
  if (!(near_mild.support_min() <= 0.35)) {
    ok = false;
    detail += " near minimum above 0.35;";
  }
  // alpha = 0.06 stochastically larger at both radii
  for (int i = 0; i <= 400; ++i) {
    const double w = i / 400.0;
    if (near_steep.cdf(w) > near_mild.cdf(w) + 1e-12 ||
        far_steep.cdf(w) > far_mild.cdf(w) + 1e-12) {
      ok = false;
      detail += " stochastic ordering violated at w=" + fmt(w) + ";";
      break;
    }
  }
  report("C7", ok,
         "CDF support minima " + fmt(near_mild.support_min()) + " (25 m) vs " +
             fmt(far_mild.support_min()) + " (125 m), alpha=0.06 shifted right" +
             detail);
}

// ---- criterion 8: expectation identity --------------------------------------

void criterion8() {
  Xoshiro256 rng(808);
  bool ok = true;
  double worst = 0.0;
  int done = 0;
  while (done < 10) {
    SourceParams sp{0.005 + rng.uniform01() * 0.15, 1.0 + rng.uniform01() * 8.0};
    if (sp.q * sp.eta > 1.0) continue;
    const SpatialConfig sc{5.0 + rng.uniform01() * 15.0,
                           1 + static_cast<int>(rng.below(35)),
                           0.05, rng.uniform01() * 0.08};
    const ChannelConfig cc{3e-5 + rng.uniform01() * 3e-4, rng.uniform01() * 0.5,
                           node_count(sc).analytic};
    const double avg = avg_conditional_entropy(sp, sc, cc);
    const HDistribution dist = h_distribution(sp, sc, cc);
    const int n = 20000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += 1.0 - dist.cdf((i + 0.5) / n);
    integral /= n;
    const double err = std::abs(integral - avg);
    worst = std::max(worst, err);
    if (err >= 1e-4) ok = false;
    ++done;
  }
  report("C8", ok,
         "integral of (1 - CDF) equals the average entropy on 10 random configs "
         "(worst err " + fmt(worst) + ")");
}

// ---- criterion 9: CLI determinism -------------------------------------------

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

void criterion9(const std::string& cli) {
  if (cli.empty()) {
    report("C9", false, "no CLI path given (pass the binary path as argv[1])");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "stfresh_acceptance";
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sweep", "entropy-sweep --preset fig3 --k-min 1 --k-max 12"},
      {"timeline", "timeline --preset fig2a --slots 3000 --seed 7"},
      {"cdf", "cdf --preset fig5 --radii 25,125 --alphas 0.02,0.06 --w-count 101"},
      {"optimize", "optimize --preset fig4 --sweep-param eta --sweep-values 1,5 --k-max 30"},
      {"optimize_json",
       "optimize --preset fig4 --sweep-param eta --sweep-values 1,5 --k-max 30 --json"},
      {"simulate", "simulate --preset fig3 --k 6 --runs 2 --slots 20000 --seed 3"},
  };

  bool ok = true;
  std::string detail;
  for (const auto& [name, args] : commands) {
    const fs::path out_a = dir / (name + "_a.out");
    const fs::path out_b = dir / (name + "_b.out");
    const std::string base = "\"" + cli + "\" " + args + " --out ";
    const int rc_a = run_command(base + "\"" + out_a.string() + "\" 2>/dev/null");
    const int rc_b = run_command(base + "\"" + out_b.string() + "\" 2>/dev/null");
    if (rc_a != 0 || rc_b != 0) {
      ok = false;
      detail += " " + name + " exited nonzero;";
      continue;
    }
    const std::string bytes_a = read_bytes(out_a);
    if (bytes_a.empty() || bytes_a != read_bytes(out_b)) {
      ok = false;
      detail += " " + name + " not byte-identical;";
    }
  }

  // usage and config errors exit with code 2
  const std::vector<std::string> bad = {
      "entropy-sweep --preset fig3 --k-min 5 --k-max 3",
      "simulate --preset fig3 --runs 0 --slots 10",
      "timeline --preset nosuch",
      "cdf --preset fig3 --radii 33",
      "optimize --preset fig3 --sweep-param K",
  };
  for (const std::string& args : bad) {
    const int rc = run_command("\"" + cli + "\" " + args + " >/dev/null 2>/dev/null");
    if (rc != 2) {
      ok = false;
      detail += " expected exit 2 for \"" + args + "\" (got " + std::to_string(rc) + ");";
    }
  }

  report("C9", ok, "CLI outputs byte-identical under fixed seeds; errors exit 2" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  bool full = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full")
      full = true;
    else
      cli = arg;
  }
  if (std::getenv("STFRESH_ACCEPT_FULL")) full = true;

  criterion1();
  criterion2();
  criterion3();
  criterion4(full);
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9(cli);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
