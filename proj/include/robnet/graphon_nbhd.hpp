#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph_models.hpp"
#include "robnet/info_indices.hpp"
#include "robnet/rng.hpp"

namespace robnet {

// ---------------------------------------------------------------------------
// Digamma (recurrence to x >= 10, then the asymptotic series; absolute error
// below 1e-12 on the positive axis)
// ---------------------------------------------------------------------------

inline double digamma(double x) {
  if (!(x > 0.0)) throw parameter_error("digamma: x must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x, inv2 = inv * inv;
  double series = std::log(x) - 0.5 * inv;
  double term = inv2;
  series -= term / 12.0;          // B_2
  term *= inv2;
  series += term / 120.0;         // B_4
  term *= inv2;
  series -= term / 252.0;         // B_6
  term *= inv2;
  series += term / 240.0;         // B_8
  term *= inv2;
  series -= term / 132.0;         // B_10
  return acc + series;
}

// ---------------------------------------------------------------------------
// Graph-law KL between step graphons
// ---------------------------------------------------------------------------

namespace detail {

inline void check_common_partition(const StepGraphon& w, const StepGraphon& wstar,
                                   const char* who) {
  validate(w);
  validate(wstar);
  if (w.K != wstar.K)
    throw parameter_error(std::string(who) + ": block counts differ");
  for (int a = 0; a < w.K; ++a)
    if (std::abs(w.pi[static_cast<std::size_t>(a)] -
                 wstar.pi[static_cast<std::size_t>(a)]) > 1e-12)
      throw parameter_error(std::string(who) + ": block fractions differ");
}

}  // namespace detail

// Continuum per-edge divergence for step functions on a common partition:
// sum over blocks of pi_a pi_b kl(B_ab, B*_ab).
inline double per_edge_graphon_kl(const StepGraphon& w, const StepGraphon& wstar) {
  detail::check_common_partition(w, wstar, "per_edge_graphon_kl");
  double acc = 0.0;
  for (int a = 0; a < w.K; ++a)
    for (int b = 0; b < w.K; ++b)
      acc += w.pi[static_cast<std::size_t>(a)] * w.pi[static_cast<std::size_t>(b)] *
             bernoulli_kl(w.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                          wstar.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
  return acc;
}

// Exact KL divergence between the n-vertex graph laws on a common partition:
// the conditional divergence C(n,2) * per-edge value (latent blocks shared).
inline double graph_law_kl(const StepGraphon& w, const StepGraphon& wstar, int n) {
  if (n < 1) throw parameter_error("graph_law_kl: n must be positive");
  const double pairs = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  return pairs * per_edge_graphon_kl(w, wstar);
}

struct GraphonKlEstimate {
  double estimate = 0.0;        // Monte Carlo mean over latent draws
  double std_error = 0.0;       // MC standard error (0 when mc_reps == 1)
  double per_edge_exact = 0.0;  // continuum per-edge value, computed exactly
};

// Monte Carlo estimate of the divergence between the induced n-vertex graph
// laws: average over latent draws of the pairwise-sum of Bernoulli KLs. For
// step graphons each replicate reduces to block-occupancy counts.
inline GraphonKlEstimate graphon_kl_mc(const StepGraphon& w,
                                       const StepGraphon& wstar, int n,
                                       int mc_reps, std::uint64_t seed) {
  detail::check_common_partition(w, wstar, "graphon_kl_mc");
  if (n < 1) throw parameter_error("graphon_kl_mc: n must be positive");
  if (mc_reps < 1) throw parameter_error("graphon_kl_mc: mc_reps must be >= 1");
  GraphonKlEstimate out;
  out.per_edge_exact = per_edge_graphon_kl(w, wstar);
  const int K = w.K;
  std::vector<double> kl_cell(static_cast<std::size_t>(K) * K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      kl_cell[static_cast<std::size_t>(a * K + b)] =
          bernoulli_kl(w.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                       wstar.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
  Rng rng(seed);
  double mean = 0.0, m2 = 0.0;
  std::vector<long long> counts(static_cast<std::size_t>(K));
  for (int rep = 0; rep < mc_reps; ++rep) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      double u = rng.uniform01();
      double acc = 0.0;
      int block = K - 1;
      for (int a = 0; a < K; ++a) {
        acc += w.pi[static_cast<std::size_t>(a)];
        if (u < acc) {
          block = a;
          break;
        }
      }
      ++counts[static_cast<std::size_t>(block)];
    }
    double total = 0.0;
    for (int a = 0; a < K; ++a) {
      const double ca = static_cast<double>(counts[static_cast<std::size_t>(a)]);
      total += 0.5 * ca * (ca - 1.0) * kl_cell[static_cast<std::size_t>(a * K + a)];
      for (int b = a + 1; b < K; ++b)
        total += ca * static_cast<double>(counts[static_cast<std::size_t>(b)]) *
                 kl_cell[static_cast<std::size_t>(a * K + b)];
    }
    // Running mean/variance (Welford) keeps one pass and stays stable.
    const double delta = total - mean;
    mean += delta / (rep + 1);
    m2 += delta * (total - mean);
  }
  out.estimate = mean;
  out.std_error =
      mc_reps > 1 ? std::sqrt(m2 / (static_cast<double>(mc_reps) - 1.0) /
                              static_cast<double>(mc_reps))
                  : 0.0;
  return out;
}

// Expected KL divergence of a Dirichlet(alpha * pstar) perturbation from its
// base vector: sum of pstar_i (digamma(alpha pstar_i + 1) - digamma(alpha + 1)
// - log pstar_i).
inline double dirichlet_expected_kl(const std::vector<double>& pstar, double alpha) {
  if (pstar.empty()) throw parameter_error("dirichlet_expected_kl: empty base vector");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw parameter_error("dirichlet_expected_kl: alpha must be positive");
  double total = 0.0;
  for (double p : pstar) {
    if (!(p > 0.0))
      throw parameter_error("dirichlet_expected_kl: base entries must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw parameter_error("dirichlet_expected_kl: base vector must sum to 1");
  const double psi_all = digamma(alpha + 1.0);
  double acc = 0.0;
  for (double p : pstar)
    acc += p * (digamma(alpha * p + 1.0) - psi_all - std::log(p));
  return acc;
}

// ---------------------------------------------------------------------------
// KL ball around a center graphon, and the two chain moves inside it
// ---------------------------------------------------------------------------

struct GraphonBall {
  StepGraphon center;
  double radius = 0.0;
  int n = 0;                  // vertex count of the induced graph law
  double stored_scale = 0.0;  // sum of all center B entries at creation time
};

inline GraphonBall make_graphon_ball(StepGraphon center, double radius, int n) {
  validate(center);
  if (!(radius > 0.0)) throw parameter_error("graphon ball: radius must be positive");
  if (n < 2) throw parameter_error("graphon ball: n must be >= 2");
  double scale = 0.0;
  for (const auto& row : center.B)
    for (double v : row) scale += v;
  if (!(scale > 0.0))
    throw parameter_error("graphon ball: center must have positive total mass");
  return GraphonBall{std::move(center), radius, n, scale};
}

struct MoveResult {
  StepGraphon next;
  bool accepted = false;
};

namespace detail {

constexpr double kEntryFloor = 1e-9;  // entries stay inside (0,1) after moves

inline double clamp_entry(double v) {
  return std::min(std::max(v, kEntryFloor), 1.0 - kEntryFloor);
}

// Ball membership. Both chain moves preserve the center's partition, so the
// exact closed form applies; the MC estimator (with its estimate + 2 SE
// conservative rule) is kept for graphons where only sampling is available
// and for validating the estimator itself.
inline bool inside_ball(const StepGraphon& w, const GraphonBall& ball) {
  return graph_law_kl(w, ball.center, ball.n) <= ball.radius;
}

}  // namespace detail

inline bool graphon_ball_contains(const StepGraphon& w, const GraphonBall& ball) {
  detail::check_common_partition(w, ball.center, "graphon_ball_contains");
  return detail::inside_ball(w, ball);
}

// Dirichlet-style perturbation: Gamma draws on the unordered block pairs
// (mirrored to keep B symmetric), normalized over all K^2 cells, then mapped
// back to edge-probability units through the ball's stored scale. alpha is a
// row-major K^2 concentration vector; the (a,b) entry with a <= b drives the
// shared draw for (a,b) and (b,a).
inline MoveResult perturb_step(const StepGraphon& current, const GraphonBall& ball,
                               const std::vector<double>& alpha,
                               std::uint64_t seed) {
  detail::check_common_partition(current, ball.center, "perturb_step");
  const int K = current.K;
  if (alpha.size() != static_cast<std::size_t>(K) * static_cast<std::size_t>(K))
    throw parameter_error("perturb_step: alpha must have K^2 entries");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a))
      throw parameter_error("perturb_step: alpha entries must be positive");
  Rng rng(seed);
  std::vector<std::vector<double>> y(static_cast<std::size_t>(K),
                                     std::vector<double>(static_cast<std::size_t>(K)));
  double total = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = a; b < K; ++b) {
      const double draw = rng.gamma(alpha[static_cast<std::size_t>(a * K + b)]);
      y[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = draw;
      y[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = draw;
      total += (a == b) ? draw : 2.0 * draw;
    }
  StepGraphon proposal = current;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      proposal.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          detail::clamp_entry(y[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /
                              total * ball.stored_scale);
  if (detail::inside_ball(proposal, ball)) return MoveResult{std::move(proposal), true};
  return MoveResult{current, false};
}

// Rescaling move: with probability 1/2 multiply a uniformly chosen nonempty
// subset of unordered cell pairs by a factor uniform on (1-rho, 1+rho),
// clamped into (0,1); otherwise stay put. Acceptance uses the same ball rule.
inline MoveResult rescale_step(const StepGraphon& current, const GraphonBall& ball,
                               double rho, std::uint64_t seed) {
  detail::check_common_partition(current, ball.center, "rescale_step");
  if (!(rho >= 0.0 && rho < 1.0))
    throw parameter_error("rescale_step: rho must lie in [0,1)");
  Rng rng(seed);
  if (rng.uniform01() < 0.5) return MoveResult{current, true};  // lazy half
  const int K = current.K;
  const int cells = K * (K + 1) / 2;
  std::vector<bool> pick(static_cast<std::size_t>(cells), false);
  bool any = false;
  while (!any) {
    for (int i = 0; i < cells; ++i) {
      pick[static_cast<std::size_t>(i)] = rng.uniform01() < 0.5;
      any = any || pick[static_cast<std::size_t>(i)];
    }
  }
  const double factor = 1.0 - rho + 2.0 * rho * rng.uniform01();
  StepGraphon proposal = current;
  int cell = 0;
  for (int a = 0; a < K; ++a)
    for (int b = a; b < K; ++b, ++cell)
      if (pick[static_cast<std::size_t>(cell)]) {
        const double v = detail::clamp_entry(
            current.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * factor);
        proposal.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = v;
        proposal.B[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = v;
      }
  if (detail::inside_ball(proposal, ball)) return MoveResult{std::move(proposal), true};
  return MoveResult{current, false};
}

}  // namespace robnet
