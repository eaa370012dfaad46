// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion prints the measured quantities next to its gate so
// a red line carries enough context to investigate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "robnet/experiments.hpp"
#include "robnet/graph.hpp"
#include "robnet/graph_models.hpp"
#include "robnet/graphon_nbhd.hpp"
#include "robnet/info_indices.hpp"
#include "robnet/metrics.hpp"
#include "robnet/posteriors.hpp"
#include "robnet/rng.hpp"
#include "robnet/robustify.hpp"
#include "test_support.hpp"

namespace {

using robnet::Rng;
using robnet::WeightedSample;

struct Gate {
  bool ok = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool in_band(double v, double lo, double hi) {
  return std::isfinite(v) && v >= lo && v <= hi;
}

// Minimize the dual objective over its scalar multiplier: double an upper
// bracket until the objective turns upward (it is unimodal), then golden
// section.  When the ball swallows the max-loss face the objective decreases
// toward its infimum and the capped bracket still lands within tolerance.
double min_psi_dual(const WeightedSample& s, double C) {
  auto psi = [&](double lam) { return robnet::psi_dual(s, C, lam); };
  double hi = 1.0;
  int guard = 0;
  while (guard++ < 60 && psi(2.0 * hi) < psi(hi)) hi *= 2.0;
  return testsupport::golden_min(psi, 1e-6, 2.0 * hi, 1e-9 * std::max(hi, 1.0));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// --------------------------------------------------------------------------
// 1. Decision-switching radius closed form.
// --------------------------------------------------------------------------
Gate criterion_switching_radius() {
  const double v = robnet::switching_radius(1e-6);
  return {std::abs(v - 6.2146) <= 1e-3, "switching_radius(1e-6)=" + fmt(v)};
}

// --------------------------------------------------------------------------
// 2. Information indices: closed forms, optimizer location, small-signal law.
// --------------------------------------------------------------------------
Gate criterion_information_indices() {
  const double I = robnet::per_vertex_kl_I(3.0, 0.4);
  const auto cj = robnet::chernoff_J(3.0, 0.4);
  const auto rep = robnet::info_index_report(3.0, 0.05);
  const double ratio_I = rep.I_exact / rep.I_smallsignal;
  const double ratio_J = rep.J_exact / rep.J_smallsignal;
  const bool ok = std::abs(I - 0.013373) <= 1e-6 &&
                  std::abs(cj.J - 0.0033520341606453810) <= 1e-5 &&
                  std::abs(cj.t_star - 0.5) <= 0.02 &&
                  in_band(ratio_I, 0.98, 1.02) && in_band(ratio_J, 0.98, 1.02);
  return {ok, "I=" + fmt(I) + " J=" + fmt(cj.J) + " t*=" + fmt(cj.t_star) +
                  " ratios=" + fmt(ratio_I) + "," + fmt(ratio_J)};
}

// --------------------------------------------------------------------------
// 3. Dual minimum, dense grid search, and mirror descent all agree with the
//    closed-form tilt solver on seeded random samples.
// --------------------------------------------------------------------------
Gate criterion_solver_agreement() {
  double max_dual_gap = 0.0, max_grid_gap = 0.0, max_mirror_gap = 0.0;
  int grid_checks = 0;
  for (int r = 0; r < 100; ++r) {
    Rng rng(9000u + static_cast<std::uint64_t>(r));
    const int support = 2 + (r % 49);
    const auto sample = testsupport::random_sample(support, rng);
    const double C = 0.02 + 0.5 * rng.uniform01();
    const auto tilt = robnet::kl_tilt_solve(sample, C, 1e-12);
    max_dual_gap = std::max(max_dual_gap,
                            std::abs(min_psi_dual(sample, C) - tilt.robust_risk));
    if (support <= 4) {
      ++grid_checks;
      const double grid = testsupport::simplex_grid_worst_risk(sample, C);
      max_grid_gap = std::max(max_grid_gap, std::abs(tilt.robust_risk - grid));
    }
    const auto mirror = robnet::mirror_descent_adversary(
        sample, {robnet::BallKind::KL, C}, robnet::default_mirror_step(sample),
        5000);
    max_mirror_gap = std::max(max_mirror_gap,
                              std::abs(mirror.robust_risk - tilt.robust_risk));
  }
  const bool ok = max_dual_gap <= 1e-6 && max_grid_gap <= 2e-3 &&
                  max_mirror_gap <= 1e-4 && grid_checks >= 6;
  return {ok, "dual_gap=" + fmt(max_dual_gap) + " grid_gap=" + fmt(max_grid_gap) +
                  " (" + std::to_string(grid_checks) + " cases)" +
                  " mirror_gap=" + fmt(max_mirror_gap)};
}

// --------------------------------------------------------------------------
// 4. Small-radius law on Gaussian-loss samples.
// --------------------------------------------------------------------------
Gate criterion_small_radius_law() {
  double lo = 1e300, hi = -1e300;
  for (int t = 0; t < 20; ++t) {
    Rng rng(4400u + static_cast<std::uint64_t>(t));
    const int support = 40;
    std::vector<double> atoms, weights, losses;
    double acc = 0.0;
    for (int i = 0; i < support; ++i) {
      atoms.push_back(rng.uniform01());
      weights.push_back(0.05 + rng.uniform01());
      acc += weights.back();
      losses.push_back(3.0 + rng.normal());
    }
    for (double& w : weights) w /= acc;
    const auto sample = robnet::make_weighted_sample(atoms, weights, losses);
    double mean = 0.0;
    for (int i = 0; i < support; ++i) mean += weights[i] * losses[i];
    double var = 0.0, maxdev = 0.0;
    for (int i = 0; i < support; ++i) {
      var += weights[i] * (losses[i] - mean) * (losses[i] - mean);
      maxdev = std::max(maxdev, std::abs(losses[i] - mean));
    }
    const double C = 1e-4 * var / (maxdev * maxdev);
    const auto tilt = robnet::kl_tilt_solve(sample, C, C * 1e-6);
    const double ratio =
        (tilt.robust_risk - mean) / (std::sqrt(2.0 * var) * std::sqrt(C));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {in_band(lo, 0.85, 1.15) && in_band(hi, 0.85, 1.15),
          "ratio range [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

// --------------------------------------------------------------------------
// 5. Two-point risk curve: flat normalized band over two decades of radius.
// --------------------------------------------------------------------------
Gate criterion_two_point_curve() {
  const std::vector<double> radii{1e-4, 3.1622776601683795e-4, 1e-3,
                                  3.1622776601683795e-3, 1e-2};
  const auto res = robnet::run_experiment_a(400, 3.0, 0.4, 1000, radii, 20501);
  const auto& norm = res.series.at("norm_rho");
  double lo = 1e300, hi = -1e300;
  for (double v : norm) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const bool ok = in_band(lo, 3.0, 5.0) && in_band(hi, 3.0, 5.0) &&
                  hi / lo <= 1.4;
  return {ok, "normalized band [" + fmt(lo) + ", " + fmt(hi) +
                  "] max/min=" + fmt(hi / lo)};
}

// --------------------------------------------------------------------------
// 6. Susceptibility scaling study: sensitivity constant and log-log slopes,
//    at working scale and at full scale with a tighter slope gate.
// --------------------------------------------------------------------------
Gate criterion_susceptibility_scaling() {
  const std::vector<double> deltas{0.40, 0.30, 0.25, 0.20, 0.17, 0.15};
  const auto desk = robnet::run_experiment_b(2000, deltas, 100, 2000,
                                             {1e-4, 1e-3}, 1e-3, 30101);
  double sens_lo = 1e300, sens_hi = -1e300;
  for (double v : desk.series.at("sens_norm")) {
    sens_lo = std::min(sens_lo, v);
    sens_hi = std::max(sens_hi, v);
  }
  const double sb = desk.scalars.at("slope_base");
  const double sr = desk.scalars.at("slope_rob");
  const bool desk_ok = in_band(sens_lo, 1.8, 3.2) && in_band(sens_hi, 1.8, 3.2) &&
                       in_band(sb, 3.0, 5.0) && in_band(sr, 3.0, 5.0);
  const auto full = robnet::run_experiment_b(5000, deltas, 100, 2000,
                                             {1e-4, 1e-3}, 1e-3, 30201);
  const double fb = full.scalars.at("slope_base");
  const double fr = full.scalars.at("slope_rob");
  const bool full_ok = in_band(fb, 4.0, 5.0) && in_band(fr, 4.0, 5.0);
  return {desk_ok && full_ok,
          "sens=[" + fmt(sens_lo) + ", " + fmt(sens_hi) + "] slopes n2000=(" +
              fmt(sb) + ", " + fmt(sr) + ") n5000=(" + fmt(fb) + ", " + fmt(fr) +
              ")"};
}

// --------------------------------------------------------------------------
// 7. Radius-path exponents across the size grid.
// --------------------------------------------------------------------------
Gate criterion_radius_paths() {
  const double alpha = robnet::chernoff_J(3.0, 0.2).J;
  const std::vector<robnet::RadiusPath> paths = {
      robnet::RadiusPath::exp_shrink(alpha),
      robnet::RadiusPath::constant(1e-3),
      robnet::RadiusPath::linear_grow(0.1),
  };
  const auto res = robnet::run_experiment_d({400, 800, 1600, 3200, 6400}, 3.0,
                                            0.2, paths, 400, 40301);
  const auto& base = res.series.at("base_exp:exp_shrink#0");
  const auto& rob = res.series.at("rob_exp:exp_shrink#0");
  const double gap = std::abs(rob.back() - base.back()) / base.back();
  const auto& const_exp = res.series.at("rob_exp:constant#1");
  bool decreasing = true;
  for (std::size_t i = 1; i < const_exp.size(); ++i)
    decreasing = decreasing && std::isfinite(const_exp[i]) &&
                 const_exp[i] < const_exp[i - 1];
  const auto& grow = res.series.at("Rrob:linear_grow#2");
  double grow_min = 1e300;
  for (double v : grow) grow_min = std::min(grow_min, v);
  const bool ok = std::isfinite(gap) && gap < 0.05 && decreasing &&
                  grow_min >= 0.99;
  return {ok, "exponent gap@6400=" + fmt(gap) +
                  " const-path decreasing=" + (decreasing ? "yes" : "no") +
                  " grow-path min Rrob=" + fmt(grow_min)};
}

// --------------------------------------------------------------------------
// 8. Dirichlet expected divergence: closed form vs Monte Carlo and
//    asymptotics.
// --------------------------------------------------------------------------
Gate criterion_dirichlet_divergence() {
  const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  const double v100 = robnet::dirichlet_expected_kl(uniform, 100.0);
  // Monte Carlo oracle: average divergence of a Dirichlet draw from its
  // center, 1e6 draws, standard error tracked online.
  Rng rng(88);
  double mean = 0.0, m2 = 0.0;
  const int draws = 1000000;
  for (int d = 1; d <= draws; ++d) {
    double g[4], tot = 0.0;
    for (int p = 0; p < 4; ++p) {
      g[p] = rng.gamma(100.0 * uniform[p]);
      tot += g[p];
    }
    double kl = 0.0;
    for (int p = 0; p < 4; ++p) {
      const double q = g[p] / tot;
      kl += q * std::log(q / uniform[p]);
    }
    const double delta = kl - mean;
    mean += delta / d;
    m2 += delta * (kl - mean);
  }
  const double se = std::sqrt(m2 / (static_cast<double>(draws) - 1.0) / draws);
  bool asym_ok = true;
  std::string asym_detail;
  for (double alpha : {50.0, 100.0, 500.0}) {
    const double v = robnet::dirichlet_expected_kl(uniform, alpha);
    const double resid = std::abs(v - 1.5 / alpha);
    asym_ok = asym_ok && resid <= 5.0 / (alpha * alpha);
    asym_detail += " resid(" + fmt(alpha) + ")=" + fmt(resid);
  }
  const bool ok = std::abs(v100 - 0.014874) <= 1e-5 &&
                  std::abs(v100 - mean) <= 3.0 * se && asym_ok;
  return {ok, "closed=" + fmt(v100) + " mc=" + fmt(mean) + "±" + fmt(se) +
                  asym_detail};
}

// --------------------------------------------------------------------------
// 9. Susceptibility of a subcritical configuration model.
// --------------------------------------------------------------------------
Gate criterion_susceptibility_limit() {
  const auto deg = robnet::DegreeModel::poisson(0.8);
  double sum = 0.0;
  for (int s = 0; s < 200; ++s) {
    const auto g = robnet::sample_configuration_model(
        5000, deg, Rng::derive_seed(777, static_cast<std::uint64_t>(s)));
    sum += robnet::empirical_susceptibility(g);
  }
  const double mean = sum / 200.0;
  return {in_band(mean, 4.5, 5.5), "mean susceptibility=" + fmt(mean)};
}

// --------------------------------------------------------------------------
// 10. Determinism: every seeded CLI invocation reproduces byte-identical
//     output, plus a compact property sweep mirroring the unit suites.
// --------------------------------------------------------------------------
Gate criterion_determinism() {
  // Property sweep: sampler validity and solver feasibility on fresh seeds.
  for (int s = 0; s < 20; ++s) {
    const auto g = robnet::sample_two_block_sbm(
        robnet::make_sbm_params(200, 4.0, 1.5),
        Rng::derive_seed(51, static_cast<std::uint64_t>(s)));
    robnet::validate_graph(g);
    const double cl = robnet::global_clustering(g);
    if (!(cl >= 0.0 && cl <= 1.0)) return {false, "clustering out of range"};
    Rng rng(600u + static_cast<std::uint64_t>(s));
    const auto sample = testsupport::random_sample(2 + (s % 20), rng);
    const double C = 0.01 + 0.3 * rng.uniform01();
    const auto tilt = robnet::kl_tilt_solve(sample, C);
    double tot = 0.0, base = 0.0;
    for (std::size_t i = 0; i < sample.atoms.size(); ++i) {
      tot += tilt.tilted_weights[i];
      base += sample.weights[i] * sample.losses[i];
    }
    if (std::abs(tot - 1.0) > 1e-9 || tilt.robust_risk < base - 1e-12 ||
        tilt.achieved_kl > C + 1e-9)
      return {false, "tilt feasibility violated at seed " + std::to_string(s)};
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::path("accept_cli_tmp");
  fs::create_directories(dir);
  const std::string edges = (dir / "edges.txt").string();
  const std::string ws = (dir / "sample.csv").string();
  const std::string center = (dir / "center.json").string();
  const std::string cfg = (dir / "expa.json").string();
  robnet::write_edge_list(robnet::sample_sparse_er({200, 3.0}, 9), edges);
  {
    Rng rng(31);
    robnet::write_weighted_sample_csv(testsupport::random_sample(12, rng), ws);
    std::ofstream(center) << "{\"K\":2,\"pi\":[0.5,0.5],"
                             "\"B\":[[0.10,0.02],[0.02,0.08]]}\n";
    std::ofstream(cfg) << "{\"n\":100,\"c\":3.0,\"lambda\":0.4,"
                          "\"n_reps\":10,\"radii\":[0.001]}\n";
  }
  const std::vector<std::pair<std::string, std::string>> invocations = {
      {"metrics", "metrics --in " + edges + " --refs 3 --seed 5"},
      {"indices", "indices --c 3 --lambda 0.4 --n 400"},
      {"tilt", "tilt --in " + ws + " --radii 1e-4 1e-3 1e-2"},
      {"mirror", "mirror --in " + ws + " --radius 0.05 --ball chi2 --iters 800"},
      {"graphon", "graphon --center-file " + center +
                      " --radius 5.0 --n 60 --moves 50 --seed 4"},
      {"experiment", "experiment a --config " + cfg + " --seed 3"},
  };
  for (const auto& [name, args] : invocations) {
    const std::string o1 = (dir / (name + "_1.csv")).string();
    const std::string o2 = (dir / (name + "_2.csv")).string();
    for (const std::string& out : {o1, o2}) {
      const std::string cmd =
          std::string(ROBNET_CLI_PATH) + " " + args + " --out " + out;
      if (std::system(cmd.c_str()) != 0)
        return {false, name + " invocation failed"};
    }
    const std::string b1 = read_file(o1), b2 = read_file(o2);
    if (b1.empty() || b1 != b2)
      return {false, name + " rerun not byte-identical"};
  }
  return {true, "6 CLI reruns byte-identical; property sweep clean"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Gate()>>> criteria = {
      {"switching radius closed form", criterion_switching_radius},
      {"information indices", criterion_information_indices},
      {"solver agreement (dual/grid/mirror)", criterion_solver_agreement},
      {"small-radius law", criterion_small_radius_law},
      {"two-point risk curve", criterion_two_point_curve},
      {"susceptibility scaling study", criterion_susceptibility_scaling},
      {"radius-path exponents", criterion_radius_paths},
      {"Dirichlet expected divergence", criterion_dirichlet_divergence},
      {"subcritical susceptibility limit", criterion_susceptibility_limit},
      {"determinism and property sweep", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Gate gate;
    try {
      gate = criteria[i].second();
    } catch (const std::exception& e) {
      gate = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("criterion %2zu [%s] %-38s %s (%.1fs)\n", i + 1,
                gate.ok ? "PASS" : "FAIL", criteria[i].first,
                gate.detail.c_str(), secs);
    std::fflush(stdout);
    if (!gate.ok) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
