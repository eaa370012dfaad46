#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph_models.hpp"
#include "robnet/info_indices.hpp"
#include "robnet/posteriors.hpp"
#include "robnet/robustify.hpp"
#include "robnet/rng.hpp"

namespace robnet {

// ---------------------------------------------------------------------------
// Radius paths: how the robustness budget scales with network size
// ---------------------------------------------------------------------------

struct RadiusPath {
  enum class Kind { ExpShrink, Polynomial, Constant, LinearGrow };
  Kind kind = Kind::Constant;
  double param = 0.0;  // alpha / kappa / c0 / c1 depending on kind

  double radius_at(int n) const {
    switch (kind) {
      case Kind::ExpShrink:  return std::exp(-2.0 * param * n);
      case Kind::Polynomial: return param / n;
      case Kind::Constant:   return param;
      case Kind::LinearGrow: return param * n;
    }
    return param;
  }

  const char* kind_name() const {
    switch (kind) {
      case Kind::ExpShrink:  return "exp_shrink";
      case Kind::Polynomial: return "polynomial";
      case Kind::Constant:   return "constant";
      case Kind::LinearGrow: return "linear_grow";
    }
    return "constant";
  }

  static RadiusPath exp_shrink(double alpha) { return {Kind::ExpShrink, alpha}; }
  static RadiusPath polynomial(double kappa) { return {Kind::Polynomial, kappa}; }
  static RadiusPath constant(double c0) { return {Kind::Constant, c0}; }
  static RadiusPath linear_grow(double c1) { return {Kind::LinearGrow, c1}; }
};

inline void validate(const RadiusPath& p) {
  if (!(p.param > 0.0) || !std::isfinite(p.param))
    throw parameter_error("radius path: parameter must be positive and finite");
}

// ---------------------------------------------------------------------------
// Result container (CSV-shaped rows plus typed summaries for tests)
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string config_echo;  // canonical parameter echo; hashed into the CSV header
  std::uint64_t seed = 0;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;
};

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_experiment_csv(const ExperimentResult& result,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "# config_hash=" << fnv1a_hex(result.config_echo) << '\n';
  out << "# " << result.config_echo << '\n';
  for (std::size_t i = 0; i < result.columns.size(); ++i)
    out << (i ? "," : "") << result.columns[i];
  out << '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

// Ordinary least squares on (x, y); intended for log-log scaling fits.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline SlopeFit fit_loglog_slope(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw parameter_error("fit_loglog_slope: need >= 2 aligned points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw parameter_error("fit_loglog_slope: non-finite input point");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw parameter_error("fit_loglog_slope: x values all equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;  // constant y: exact fit
  return fit;
}

namespace detail {

// Deterministic parallel map: slot i is computed by fn(i) regardless of the
// thread schedule, so results never depend on the thread count.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline long long binomial_count(std::uint64_t trials, double p, Rng& rng) {
  long long count = 0;
  bernoulli_subset(trials, p, rng, [&](std::uint64_t) { ++count; });
  return count;
}

inline std::string fmt(double v) { return format_double(v); }

inline std::string fmt_vector(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt(v[i]);
  }
  return s + "]";
}

inline void check_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw parameter_error("experiment: empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw parameter_error("experiment: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw parameter_error("experiment: radii must be increasing");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment A: robust misclassification for ER vs two-block at fixed n
// ---------------------------------------------------------------------------

// One replicate of the two-point testing pipeline. The posterior depends on
// the graph only through the within/cross-label edge counts, so the counts
// are drawn directly as binomials (exact in distribution) via the same
// geometric-skipping primitive the graph samplers use.
inline double two_point_replicate_e0(int n, double c, double lambda,
                                     bool under_alt, Rng& rng) {
  const std::uint64_t half = static_cast<std::uint64_t>(n) / 2;
  const std::uint64_t n_in = half * (half - 1);  // n(n-2)/4 for even n
  const std::uint64_t n_out = half * half;
  const double nd = static_cast<double>(n);
  const double p = c / nd, p_in = (c + lambda) / nd, p_out = (c - lambda) / nd;
  const long long m_in = detail::binomial_count(n_in, under_alt ? p_in : p, rng);
  const long long m_out = detail::binomial_count(n_out, under_alt ? p_out : p, rng);
  const double log_bf =
      static_cast<double>(m_in) * std::log(p_in / p) +
      static_cast<double>(n_in - m_in) * std::log((1.0 - p_in) / (1.0 - p)) +
      static_cast<double>(m_out) * std::log(p_out / p) +
      static_cast<double>(n_out - m_out) * std::log((1.0 - p_out) / (1.0 - p));
  // e0 = min(p0, p1) = sigmoid(-|log_bf|), computed without overflow.
  const double e = std::exp(-std::abs(log_bf));
  return e / (1.0 + e);
}

namespace detail {

struct TwoPointBatch {
  std::vector<double> e0;  // per replicate; the first floor(n_reps/2) are null draws
};

inline TwoPointBatch two_point_batch(int n, double c, double lambda, int n_reps,
                                     std::uint64_t seed, std::uint64_t stream_salt,
                                     int threads) {
  if (n < 2 || n % 2 != 0)
    throw parameter_error("experiment: n must be even and >= 2");
  if (n_reps < 1) throw parameter_error("experiment: n_reps must be >= 1");
  validate(SparseErParams{n, c});
  if (!(std::abs(lambda) < c)) throw parameter_error("experiment: need |lambda| < c");
  if (!((c + lambda) / n < 1.0 && (c - lambda) / n > 0.0))
    throw parameter_error("experiment: edge probabilities must lie in (0,1)");
  TwoPointBatch batch;
  batch.e0.assign(static_cast<std::size_t>(n_reps), 0.0);
  const int null_reps = n_reps / 2;  // remainder goes to the alternative
  parallel_for(n_reps, threads, [&](int r) {
    Rng rng(seed, stream_salt + static_cast<std::uint64_t>(r));
    batch.e0[static_cast<std::size_t>(r)] =
        two_point_replicate_e0(n, c, lambda, r >= null_reps, rng);
  });
  return batch;
}

}  // namespace detail

inline ExperimentResult run_experiment_a(int n, double c, double lambda,
                                         int n_reps,
                                         const std::vector<double>& radii,
                                         std::uint64_t seed, int threads = 1) {
  detail::check_radii(radii);
  const detail::TwoPointBatch batch =
      detail::two_point_batch(n, c, lambda, n_reps, seed, 0, threads);
  double r0 = 0.0;
  for (double e : batch.e0) r0 += e;
  r0 /= static_cast<double>(n_reps);
  if (r0 <= 0.0 || r0 >= 1.0)
    throw degenerate_input_error(
        "run_experiment_a: baseline risk degenerate at 0 or 1 — increase n_reps "
        "or reduce n so the posterior is not numerically certain");

  ExperimentResult result;
  result.seed = seed;
  result.config_echo = "experiment=a n=" + std::to_string(n) +
                       " c=" + detail::fmt(c) + " lambda=" + detail::fmt(lambda) +
                       " n_reps=" + std::to_string(n_reps) +
                       " radii=" + detail::fmt_vector(radii) +
                       " seed=" + std::to_string(seed);
  result.columns = {"C",      "sqrt_C",   "R0",       "Rrob",
                    "excess", "norm_rho", "norm_var", "norm_per_replicate"};
  result.scalars["R0"] = r0;
  result.series["radii"] = radii;
  for (double C : radii) {
    double rrob = 0.0;
    double per_rep = 0.0;
    for (double e0 : batch.e0) {
      const double erob = two_point_robust_error(e0, C);
      rrob += erob;
      const double denom = std::sqrt(2.0 * e0 * (1.0 - e0)) * std::sqrt(C);
      const double excess_r = erob - e0;
      per_rep += denom == 0.0 ? 0.0 : excess_r / denom;  // 0/0 counted as 0
    }
    rrob /= static_cast<double>(n_reps);
    per_rep /= static_cast<double>(n_reps);
    const double excess = rrob - r0;
    // Aggregate-then-normalize conventions; both emitted, labeled.
    const double norm_rho = excess / (r0 * std::sqrt(C));
    const double norm_var = excess / (std::sqrt(2.0 * r0 * (1.0 - r0)) * std::sqrt(C));
    result.series["Rrob"].push_back(rrob);
    result.series["norm_rho"].push_back(norm_rho);
    result.series["norm_var"].push_back(norm_var);
    result.series["norm_per_replicate"].push_back(per_rep);
    result.rows.push_back({detail::fmt(C), detail::fmt(std::sqrt(C)),
                           detail::fmt(r0), detail::fmt(rrob), detail::fmt(excess),
                           detail::fmt(norm_rho), detail::fmt(norm_var),
                           detail::fmt(per_rep)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Experiment B: susceptibility risk scaling for the configuration model
// ---------------------------------------------------------------------------

struct SusceptibilityRisk {
  double a_star = 0.0;          // Bayes action: posterior mean of 1/(1 - mu)
  double rho0 = 0.0;            // baseline risk = posterior variance of 1/(1 - mu)
  std::vector<double> rho_rob;  // aligned with the requested radii
};

// Risk computations shared by the harness and by oracle tests that inject a
// hand-built posterior sample.
inline SusceptibilityRisk susceptibility_risk_profile(
    const WeightedSample& posterior, const std::vector<double>& radii) {
  validate(posterior);
  double a_star = 0.0;
  for (std::size_t i = 0; i < posterior.atoms.size(); ++i)
    a_star += posterior.weights[i] * susceptibility_of_mean(posterior.atoms[i]);
  const WeightedSample with_losses = susceptibility_losses(posterior, a_star);
  SusceptibilityRisk out;
  out.a_star = a_star;
  for (std::size_t i = 0; i < with_losses.atoms.size(); ++i)
    out.rho0 += with_losses.weights[i] * with_losses.losses[i];
  out.rho_rob.reserve(radii.size());
  for (double C : radii)
    out.rho_rob.push_back(kl_tilt_solve(with_losses, C).robust_risk);
  return out;
}

inline ExperimentResult run_experiment_b(int n, const std::vector<double>& deltas,
                                         int n_reps, int n_post_draws,
                                         const std::vector<double>& radii,
                                         double C_slope, std::uint64_t seed,
                                         int threads = 1,
                                         double delta_star =
                                             std::numeric_limits<double>::quiet_NaN()) {
  if (n < 1) throw parameter_error("run_experiment_b: n must be positive");
  if (deltas.empty()) throw parameter_error("run_experiment_b: empty delta grid");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0))
      throw parameter_error("run_experiment_b: deltas must lie in (0,1)");
  if (n_reps < 1) throw parameter_error("run_experiment_b: n_reps must be >= 1");
  if (n_post_draws < 1)
    throw parameter_error("run_experiment_b: n_post_draws must be >= 1");
  detail::check_radii(radii);
  if (!(C_slope > 0.0))
    throw parameter_error("run_experiment_b: C_slope must be positive");
  // Designated delta for the sensitivity section: the grid value closest to
  // 0.2 unless the caller names one.
  if (std::isnan(delta_star)) {
    delta_star = deltas[0];
    for (double d : deltas)
      if (std::abs(d - 0.2) < std::abs(delta_star - 0.2)) delta_star = d;
  }
  std::size_t star_index = deltas.size();
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (deltas[i] == delta_star) star_index = i;
  if (star_index == deltas.size())
    throw parameter_error("run_experiment_b: delta_star must be one of the deltas");

  // Radii evaluated per replicate: the sensitivity grid plus C_slope.
  std::vector<double> eval_radii = radii;
  eval_radii.push_back(C_slope);

  const int cells = static_cast<int>(deltas.size()) * n_reps;
  std::vector<double> rho0_cell(static_cast<std::size_t>(cells),
                                std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<double>> rob_cell(
      static_cast<std::size_t>(cells),
      std::vector<double>(eval_radii.size(),
                          std::numeric_limits<double>::quiet_NaN()));
  std::vector<int> flagged(static_cast<std::size_t>(cells), 0);

  detail::parallel_for(cells, threads, [&](int cell) {
    const int di = cell / n_reps;
    const double mu = 1.0 - deltas[static_cast<std::size_t>(di)];
    const std::uint64_t graph_seed =
        Rng::derive_seed(seed, 2 * static_cast<std::uint64_t>(cell));
    const std::uint64_t post_seed =
        Rng::derive_seed(seed, 2 * static_cast<std::uint64_t>(cell) + 1);
    const Graph g =
        sample_configuration_model(n, DegreeModel::poisson(mu), graph_seed);
    WeightedSample posterior;
    try {
      posterior = poisson_mean_pseudo_posterior(g, 1.0, 1.0, n_post_draws, post_seed);
    } catch (const degenerate_input_error&) {
      flagged[static_cast<std::size_t>(cell)] = 1;  // truncation-degenerate
      return;
    }
    const SusceptibilityRisk risk = susceptibility_risk_profile(posterior, eval_radii);
    rho0_cell[static_cast<std::size_t>(cell)] = risk.rho0;
    rob_cell[static_cast<std::size_t>(cell)] = risk.rho_rob;
  });

  ExperimentResult result;
  result.seed = seed;
  result.config_echo =
      "experiment=b n=" + std::to_string(n) + " deltas=" + detail::fmt_vector(deltas) +
      " n_reps=" + std::to_string(n_reps) +
      " n_post_draws=" + std::to_string(n_post_draws) +
      " radii=" + detail::fmt_vector(radii) + " C_slope=" + detail::fmt(C_slope) +
      " delta_star=" + detail::fmt(delta_star) + " seed=" + std::to_string(seed);
  result.columns = {"section",      "delta",     "C",      "sqrt_C",
                    "rho0",         "rho_rob",   "norm_rho", "neg_log_delta",
                    "scaling_term", "fit_slope", "fit_r2",   "flagged"};

  // Per-delta aggregates over non-flagged replicates.
  const std::size_t n_radii = radii.size();
  std::vector<double> rho0_bar(deltas.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> rob_slope_bar(deltas.size(),
                                    std::numeric_limits<double>::quiet_NaN());
  std::vector<std::vector<double>> rob_bar(
      deltas.size(),
      std::vector<double>(n_radii, std::numeric_limits<double>::quiet_NaN()));
  std::vector<int> flagged_per_delta(deltas.size(), 0);
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    double acc0 = 0.0, acc_slope = 0.0;
    std::vector<double> acc_rob(n_radii, 0.0);
    int kept = 0;
    for (int r = 0; r < n_reps; ++r) {
      const std::size_t cell =
          di * static_cast<std::size_t>(n_reps) + static_cast<std::size_t>(r);
      if (flagged[cell]) {
        ++flagged_per_delta[di];
        continue;
      }
      ++kept;
      acc0 += rho0_cell[cell];
      for (std::size_t j = 0; j < n_radii; ++j) acc_rob[j] += rob_cell[cell][j];
      acc_slope += rob_cell[cell][n_radii];  // the appended C_slope entry
    }
    if (kept > 0) {
      rho0_bar[di] = acc0 / kept;
      rob_slope_bar[di] = acc_slope / kept;
      for (std::size_t j = 0; j < n_radii; ++j) rob_bar[di][j] = acc_rob[j] / kept;
    }
  }

  // Section 1: sensitivity curve at the designated delta.
  result.series["sens_radii"] = radii;
  for (std::size_t j = 0; j < n_radii; ++j) {
    const double C = radii[j];
    const double rho0 = rho0_bar[star_index];
    const double rob = rob_bar[star_index][j];
    const double norm = (rob - rho0) / (rho0 * std::sqrt(C));
    result.series["sens_norm"].push_back(norm);
    result.rows.push_back({"sensitivity", detail::fmt(delta_star), detail::fmt(C),
                           detail::fmt(std::sqrt(C)), detail::fmt(rho0),
                           detail::fmt(rob), detail::fmt(norm), "", "", "", "",
                           std::to_string(flagged_per_delta[star_index])});
  }

  // Section 2: per-delta scaling terms feeding the slope fits.
  std::vector<double> xs, ys_base, ys_rob;
  result.series["deltas"] = deltas;
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    const double x = -std::log(delta);
    const double rho0 = rho0_bar[di];
    const double rob = rob_slope_bar[di];
    const double term = static_cast<double>(n) * (rob - rho0) / std::sqrt(C_slope);
    result.series["rho0_bar"].push_back(rho0);
    result.series["rho_rob_slope"].push_back(rob);
    result.rows.push_back({"scaling", detail::fmt(delta), detail::fmt(C_slope), "",
                           detail::fmt(rho0), detail::fmt(rob), "", detail::fmt(x),
                           detail::fmt(term), "", "",
                           std::to_string(flagged_per_delta[di])});
    if (std::isfinite(rho0) && rho0 > 0.0) {
      xs.push_back(x);
      ys_base.push_back(std::log(static_cast<double>(n) * rho0));
      ys_rob.push_back(std::isfinite(term) && term > 0.0
                           ? std::log(term)
                           : std::numeric_limits<double>::quiet_NaN());
    }
  }

  // Section 3: fitted slopes of the two scaling laws against -log(delta).
  std::vector<double> xr, yr;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isfinite(ys_rob[i])) {
      xr.push_back(xs[i]);
      yr.push_back(ys_rob[i]);
    }
  }
  if (xs.size() >= 2) {
    const SlopeFit base = fit_loglog_slope(xs, ys_base);
    result.scalars["slope_base"] = base.slope;
    result.scalars["r2_base"] = base.r2;
    result.rows.push_back({"fit_base", "", "", "", "", "", "", "", "",
                           detail::fmt(base.slope), detail::fmt(base.r2), ""});
  }
  if (xr.size() >= 2) {
    const SlopeFit rob = fit_loglog_slope(xr, yr);
    result.scalars["slope_rob"] = rob.slope;
    result.scalars["r2_rob"] = rob.r2;
    result.rows.push_back({"fit_rob", "", "", "", "", "", "", "", "",
                           detail::fmt(rob.slope), detail::fmt(rob.r2), ""});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Experiment D: radius paths and error exponents across the n-grid
// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment_d(const std::vector<int>& n_grid, double c,
                                         double lambda,
                                         const std::vector<RadiusPath>& paths,
                                         int n_reps, std::uint64_t seed,
                                         int threads = 1) {
  if (n_grid.empty()) throw parameter_error("run_experiment_d: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2 || n_grid[i] % 2 != 0)
      throw parameter_error("run_experiment_d: grid entries must be even and >= 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw parameter_error("run_experiment_d: n grid must be increasing");
  }
  if (paths.empty()) throw parameter_error("run_experiment_d: no radius paths");
  for (const RadiusPath& p : paths) validate(p);
  if (n_reps < 1) throw parameter_error("run_experiment_d: n_reps must be >= 1");

  ExperimentResult result;
  result.seed = seed;
  {
    std::string echo = "experiment=d n_grid=[";
    for (std::size_t i = 0; i < n_grid.size(); ++i)
      echo += (i ? "," : "") + std::to_string(n_grid[i]);
    echo += "] c=" + detail::fmt(c) + " lambda=" + detail::fmt(lambda) + " paths=[";
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (i) echo += ",";
      echo += std::string(paths[i].kind_name()) + "(" + detail::fmt(paths[i].param) + ")";
    }
    echo += "] n_reps=" + std::to_string(n_reps) + " seed=" + std::to_string(seed);
    result.config_echo = echo;
  }
  result.columns = {"n",       "path", "path_param",    "C_n",
                    "R0",      "Rrob", "base_exponent", "rob_exponent",
                    "rel_gap", "censored"};
  for (int nv : n_grid) result.series["n_grid"].push_back(static_cast<double>(nv));

  // One e0 batch per n, shared by every radius path at that n.
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const int n = n_grid[ni];
    const detail::TwoPointBatch batch = detail::two_point_batch(
        n, c, lambda, n_reps, seed,
        static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(n_reps) * 4,
        threads);
    double r0 = 0.0;
    for (double e : batch.e0) r0 += e;
    r0 /= static_cast<double>(n_reps);
    result.series["R0"].push_back(r0);

    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      const RadiusPath& path = paths[pi];
      const double C_n = path.radius_at(n);
      double rrob = 0.0;
      for (double e0 : batch.e0) rrob += two_point_robust_error(e0, C_n);
      rrob /= static_cast<double>(n_reps);
      // A zero observed risk carries no exponent information at this n_reps;
      // such cells are censored rather than reported as infinite.
      const bool censored = !(r0 > 0.0) || !(rrob > 0.0);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const double base_exp = censored ? nan : -std::log(r0) / n;
      const double rob_exp = censored ? nan : -std::log(rrob) / n;
      const double rel_gap = censored ? nan : std::abs(rob_exp - base_exp) / base_exp;
      const std::string key = std::string(path.kind_name()) + "#" + std::to_string(pi);
      result.series["Rrob:" + key].push_back(rrob);
      result.series["base_exp:" + key].push_back(base_exp);
      result.series["rob_exp:" + key].push_back(rob_exp);
      result.rows.push_back({std::to_string(n), path.kind_name(),
                             detail::fmt(path.param), detail::fmt(C_n),
                             detail::fmt(r0), detail::fmt(rrob),
                             censored ? "nan" : detail::fmt(base_exp),
                             censored ? "nan" : detail::fmt(rob_exp),
                             censored ? "nan" : detail::fmt(rel_gap),
                             censored ? "1" : "0"});
    }
  }
  return result;
}

// Heuristic-plus-refined robustness radius: seed C = (inflation/2)^2, then
// expand and bisect on the exact tilt solver until the robust risk inflates
// the baseline by the requested factor (relative tolerance 0.5%).
inline double calibrate_radius(const WeightedSample& sample, double inflation) {
  if (!(inflation > 0.0 && inflation < 1.0))
    throw parameter_error("calibrate_radius: inflation must lie in (0,1)");
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  if (weighted_loss_variance(sample) <= 0.0)
    throw degenerate_input_error("calibrate_radius: zero loss variance — no radius "
                                 "achieves the requested inflation");
  const double rho0 = ws.baseline;
  if (!(rho0 > 0.0))
    throw degenerate_input_error("calibrate_radius: baseline risk must be positive "
                                 "for a multiplicative inflation target");
  const double target = (1.0 + inflation) * rho0;
  if (!(target < ws.max_loss))
    throw degenerate_input_error("calibrate_radius: inflation target exceeds the "
                                 "maximum loss — unreachable at any radius");
  double hi = 0.25 * inflation * inflation;  // the heuristic seed
  double lo = 0.0;
  int guard = 0;
  while (kl_tilt_solve(sample, hi).robust_risk < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200)
      throw convergence_error("calibrate_radius: bracket expansion failed", hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double risk = kl_tilt_solve(sample, mid).robust_risk;
    if (std::abs(risk - target) <= 0.005 * target) return mid;
    if (risk < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace robnet
