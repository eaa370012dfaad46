#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "robnet/errors.hpp"

namespace robnet {

// KL divergence between Bernoulli(p) and Bernoulli(q), natural logs,
// 0*log 0 = 0. A q on the boundary with mismatched p yields +infinity (an
// explicit infinite-divergence signal, not an overflow).
inline double bernoulli_kl(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("bernoulli_kl: p must be in [0,1]");
  if (!(q >= 0.0 && q <= 1.0)) throw parameter_error("bernoulli_kl: q must be in [0,1]");
  if (q == 0.0) return p == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (q == 1.0) return p == 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  double acc = 0.0;
  if (p > 0.0) acc += p * std::log(p / q);
  // log((1-p)/(1-q)) in log1p form to avoid cancellation for small p, q.
  if (p < 1.0) acc += (1.0 - p) * std::log1p((q - p) / (1.0 - q));
  return acc;
}

namespace detail {

inline void check_signal(double c, double lambda, const char* who) {
  if (!(c > 0.0)) throw parameter_error(std::string(who) + ": c must be positive");
  if (!(std::abs(lambda) < c))
    throw parameter_error(std::string(who) + ": need |lambda| < c");
}

// Golden-section maximization of f on [lo, hi] to interval width `width`.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double width) {
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > width) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

// Grid scan plus golden-section refinement of f over [0, 1].
template <class F>
std::pair<double, double> maximize_unit_interval(F&& f, int grid_size) {
  if (grid_size < 3) throw parameter_error("t-grid size must be >= 3");
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_size; ++i) {
    double t = static_cast<double>(i) / (grid_size - 1);
    double v = f(t);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = static_cast<double>(best > 0 ? best - 1 : 0) / (grid_size - 1);
  double hi = static_cast<double>(best < grid_size - 1 ? best + 1 : grid_size - 1) /
              (grid_size - 1);
  auto [t_star, val] = golden_max(f, lo, hi, 1e-10);
  if (best_val > val) return {static_cast<double>(best) / (grid_size - 1), best_val};
  return {t_star, val};
}

}  // namespace detail

// Limiting per-vertex KL rate for the balanced two-block model against ER:
// ((c+l)*log((c+l)/c) + (c-l)*log((c-l)/c)) / 4.
inline double per_vertex_kl_I(double c, double lambda) {
  detail::check_signal(c, lambda, "per_vertex_kl_I");
  if (lambda == 0.0) return 0.0;
  const double up = c + lambda, dn = c - lambda;
  return 0.25 * (up * std::log(up / c) + dn * std::log(dn / c));
}

struct ChernoffIndex {
  double J = 0.0;
  double t_star = 0.5;
};

// Limiting per-vertex Chernoff rate: the sup over t in [0,1] of
// (2c - c^{1-t}((c+l)^t + (c-l)^t)) / 4, located by grid + golden section.
inline ChernoffIndex chernoff_J(double c, double lambda, int t_grid_size = 201) {
  detail::check_signal(c, lambda, "chernoff_J");
  if (lambda == 0.0) return {0.0, 0.5};
  const double up = c + lambda, dn = c - lambda;
  auto objective = [&](double t) {
    return 0.25 * (2.0 * c -
                   std::pow(c, 1.0 - t) * (std::pow(up, t) + std::pow(dn, t)));
  };
  auto [t_star, val] = detail::maximize_unit_interval(objective, t_grid_size);
  return {std::max(val, 0.0), t_star};
}

namespace detail {

inline double clamp_prob(double p) {
  return std::min(std::max(p, 1e-300), 1.0 - 1e-16);
}

// -log( r^{1-t} q^t + (1-r)^{1-t} (1-q)^t ), written with expm1/log1p so the
// near-1 sum does not lose precision in the sparse regime.
inline double chernoff_phi(double r, double q, double t) {
  r = clamp_prob(r);
  q = clamp_prob(q);
  const double a = std::exp((1.0 - t) * std::log(r) + t * std::log(q));
  const double lb = (1.0 - t) * std::log1p(-r) + t * std::log1p(-q);
  return -std::log1p(a + std::expm1(lb));
}

inline void check_finite_n(int n, const char* who) {
  if (n < 2 || n % 2 != 0)
    throw parameter_error(std::string(who) + ": n must be even and >= 2");
}

}  // namespace detail

// Exact KL divergence between the two labelled graph laws at size n:
// N_in * kl(p_in, p) + N_out * kl(p_out, p) with N_in = n(n-2)/4,
// N_out = n^2/4.
inline double finite_n_kl(int n, double c, double lambda) {
  detail::check_finite_n(n, "finite_n_kl");
  detail::check_signal(c, lambda, "finite_n_kl");
  const double nd = static_cast<double>(n);
  const double p = c / nd, p_in = (c + lambda) / nd, p_out = (c - lambda) / nd;
  if (!(p_in < 1.0 && p_out > 0.0))
    throw parameter_error("finite_n_kl: edge probabilities must lie in (0,1)");
  const double n_in = nd * (nd - 2.0) / 4.0;
  const double n_out = nd * nd / 4.0;
  return n_in * bernoulli_kl(detail::clamp_prob(p_in), detail::clamp_prob(p)) +
         n_out * bernoulli_kl(detail::clamp_prob(p_out), detail::clamp_prob(p));
}

// Exact finite-n Chernoff divergence between the same two laws: the sup over
// t of N_in*phi(p, p_in; t) + N_out*phi(p, p_out; t).
inline double finite_n_chernoff(int n, double c, double lambda,
                                int t_grid_size = 201) {
  detail::check_finite_n(n, "finite_n_chernoff");
  detail::check_signal(c, lambda, "finite_n_chernoff");
  const double nd = static_cast<double>(n);
  const double p = c / nd, p_in = (c + lambda) / nd, p_out = (c - lambda) / nd;
  if (!(p_in < 1.0 && p_out > 0.0))
    throw parameter_error("finite_n_chernoff: edge probabilities must lie in (0,1)");
  const double n_in = nd * (nd - 2.0) / 4.0;
  const double n_out = nd * nd / 4.0;
  auto objective = [&](double t) {
    return n_in * detail::chernoff_phi(p, p_in, t) +
           n_out * detail::chernoff_phi(p, p_out, t);
  };
  auto [t_star, val] = detail::maximize_unit_interval(objective, t_grid_size);
  (void)t_star;
  return std::max(val, 0.0);
}

// Smallest KL radius at which a two-point risk e0 can be pushed to 1/2:
// kl(1/2, e0). e0 = 0 signals an infinite radius.
inline double switching_radius(double e0) {
  if (!(e0 >= 0.0 && e0 <= 0.5))
    throw parameter_error("switching_radius: e0 must lie in [0, 1/2]");
  if (e0 == 0.0) return std::numeric_limits<double>::infinity();
  return bernoulli_kl(0.5, e0);
}

// Bundle of exact and small-signal indices for one (c, lambda) pair, plus the
// finite-n per-vertex values when n > 0. Backs the `indices` CLI subcommand.
struct InfoIndexReport {
  double c = 0.0;
  double lambda = 0.0;
  double I_exact = 0.0;
  double I_smallsignal = 0.0;  // lambda^2 / (4c)
  double J_exact = 0.0;
  double J_smallsignal = 0.0;  // lambda^2 / (16c)
  double t_star = 0.5;
  double Dn_over_n = std::numeric_limits<double>::quiet_NaN();
  double Cn_over_n = std::numeric_limits<double>::quiet_NaN();
};

inline InfoIndexReport info_index_report(double c, double lambda, int n = 0,
                                         int t_grid_size = 201) {
  InfoIndexReport r;
  r.c = c;
  r.lambda = lambda;
  r.I_exact = per_vertex_kl_I(c, lambda);
  r.I_smallsignal = lambda * lambda / (4.0 * c);
  const ChernoffIndex cj = chernoff_J(c, lambda, t_grid_size);
  r.J_exact = cj.J;
  r.J_smallsignal = lambda * lambda / (16.0 * c);
  r.t_star = cj.t_star;
  if (n > 0) {
    r.Dn_over_n = finite_n_kl(n, c, lambda) / n;
    r.Cn_over_n = finite_n_chernoff(n, c, lambda, t_grid_size) / n;
  }
  return r;
}

}  // namespace robnet
