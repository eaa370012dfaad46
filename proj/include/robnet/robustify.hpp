#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/info_indices.hpp"
#include "robnet/posteriors.hpp"

namespace robnet {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TiltSolution {
  // Dual optimum; 0 for the degenerate/zero-radius cases, +infinity when the
  // ball swallows the max-loss face, and unused (0) for mirror-descent output.
  double lambda_star = 0.0;
  std::vector<double> tilted_weights;
  double robust_risk = 0.0;
  double achieved_kl = 0.0;  // divergence of the tilted weights from baseline
};

enum class BallKind { KL, ChiSquared };

struct PhiBall {
  BallKind kind = BallKind::KL;
  double radius = 0.0;
  // Curvature of the generator at 1: 1 for KL, 2 for chi^2 with (t-1)^2.
  double curvature() const { return kind == BallKind::KL ? 1.0 : 2.0; }
};

enum class Normalization { RhoSqrtC, VarSqrtC, None };

struct SensitivityCurve {
  std::vector<double> radii;
  double baseline_risk = 0.0;
  std::vector<double> robust_risks;
  // RhoSqrtC: (rob-base)/(base*sqrt(C)); VarSqrtC: (rob-base)/(sqrt(2 Var L)*sqrt(C));
  // None: plain rob-base. 0/0 is reported as 0.
  std::vector<double> normalized;
};

// ---------------------------------------------------------------------------
// Internal helpers
// ---------------------------------------------------------------------------

namespace detail {

struct TiltWorkspace {
  std::vector<std::size_t> support;   // indices with positive weight
  std::vector<double> log_w;          // over support
  std::vector<double> loss;           // over support
  double baseline = 0.0;
  double max_loss = 0.0;
  double min_loss = 0.0;
};

inline TiltWorkspace tilt_workspace(const WeightedSample& sample) {
  validate(sample);
  if (sample.losses.empty())
    throw parameter_error("robustify: sample has no cached losses");
  TiltWorkspace ws;
  for (std::size_t i = 0; i < sample.weights.size(); ++i) {
    if (!std::isfinite(sample.losses[i]))
      throw parameter_error("robustify: non-finite loss value");
    if (sample.weights[i] > 0.0) {
      ws.support.push_back(i);
      ws.log_w.push_back(std::log(sample.weights[i]));
      ws.loss.push_back(sample.losses[i]);
      ws.baseline += sample.weights[i] * sample.losses[i];
    }
  }
  if (ws.support.empty())
    throw parameter_error("robustify: sample has empty support");
  ws.max_loss = *std::max_element(ws.loss.begin(), ws.loss.end());
  ws.min_loss = *std::min_element(ws.loss.begin(), ws.loss.end());
  return ws;
}

// Tilted weights over the support for a given lambda, with the resulting KL
// divergence from the baseline and the tilted mean loss. All log-sum-exp
// computations are max-stabilized.
struct TiltEval {
  std::vector<double> q;
  double kl = 0.0;
  double mean_loss = 0.0;
};

inline TiltEval eval_tilt(const TiltWorkspace& ws, double lambda) {
  const std::size_t s = ws.support.size();
  TiltEval ev;
  ev.q.resize(s);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s; ++i) {
    ev.q[i] = ws.log_w[i] + lambda * ws.loss[i];
    shift = std::max(shift, ev.q[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    ev.q[i] = std::exp(ev.q[i] - shift);
    z += ev.q[i];
  }
  const double log_z = shift + std::log(z);
  for (std::size_t i = 0; i < s; ++i) {
    ev.q[i] /= z;
    ev.mean_loss += ev.q[i] * ws.loss[i];
  }
  // KL(q||w) = lambda * E_q[L] - log Z for q proportional to w*exp(lambda L).
  ev.kl = std::max(lambda * ev.mean_loss - log_z, 0.0);
  return ev;
}

inline std::vector<double> scatter_to_full(const TiltWorkspace& ws,
                                           const std::vector<double>& q_support,
                                           std::size_t full_size) {
  std::vector<double> full(full_size, 0.0);
  for (std::size_t i = 0; i < ws.support.size(); ++i)
    full[ws.support[i]] = q_support[i];
  return full;
}

inline double kl_weights(const std::vector<double>& q,
                         const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) acc += q[i] * std::log(q[i] / w[i]);
  return std::max(acc, 0.0);
}

inline double chi2_weights(const std::vector<double>& q,
                           const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double d = q[i] - w[i];
    acc += d * d / w[i];
  }
  return acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entropic tilting over a KL ball (exact dual solve)
// ---------------------------------------------------------------------------

// Worst-case expected loss over the KL ball of radius C around the sample
// weights. Bisection runs on the KL-constraint function K(lambda), which
// increases monotonically from 0 toward -log(weight of the argmax-loss set).
// If the ball already contains that face, the solution is the information
// projection onto it: q proportional to w restricted to the argmax set (the
// limit of the tilt family), with robust risk max L. The bisection keeps the
// feasible endpoint, so achieved_kl never exceeds C.
inline TiltSolution kl_tilt_solve(const WeightedSample& sample, double C,
                                  double tol = 1e-10) {
  if (!(C >= 0.0)) throw parameter_error("kl_tilt_solve: C must be nonnegative");
  if (!(tol > 0.0)) throw parameter_error("kl_tilt_solve: tol must be positive");
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  TiltSolution sol;
  sol.tilted_weights = sample.weights;
  sol.robust_risk = ws.baseline;
  sol.achieved_kl = 0.0;
  sol.lambda_star = 0.0;
  if (C == 0.0) return sol;
  // Degenerate: all losses equal — tilting cannot move the risk.
  const double loss_scale =
      std::max({std::abs(ws.max_loss), std::abs(ws.min_loss), 1.0});
  if (ws.max_loss - ws.min_loss <= 1e-14 * loss_scale) return sol;

  // Saturation: mass of the argmax-loss face.
  const double tie_eps = 1e-12 * loss_scale;
  double face_mass = 0.0;
  for (std::size_t i = 0; i < ws.support.size(); ++i)
    if (ws.loss[i] >= ws.max_loss - tie_eps) face_mass += std::exp(ws.log_w[i]);
  const double face_kl = -std::log(face_mass);
  if (face_kl <= C) {
    std::vector<double> q(ws.support.size(), 0.0);
    double risk = 0.0;
    for (std::size_t i = 0; i < ws.support.size(); ++i)
      if (ws.loss[i] >= ws.max_loss - tie_eps) {
        q[i] = std::exp(ws.log_w[i]) / face_mass;
        risk += q[i] * ws.loss[i];
      }
    sol.lambda_star = std::numeric_limits<double>::infinity();
    sol.tilted_weights = detail::scatter_to_full(ws, q, sample.weights.size());
    sol.robust_risk = risk;
    sol.achieved_kl = std::max(face_kl, 0.0);
    return sol;
  }

  // Bracket [lo, hi] with K(lo) <= C < K(hi); K is monotone increasing.
  double lo = 0.0;
  double hi = 1.0 / loss_scale;
  detail::TiltEval ev_hi = detail::eval_tilt(ws, hi);
  int guard = 0;
  while (ev_hi.kl <= C) {
    hi *= 2.0;
    ev_hi = detail::eval_tilt(ws, hi);
    if (++guard > 400)
      throw convergence_error("kl_tilt_solve: bracket expansion failed", ev_hi.mean_loss);
  }
  detail::TiltEval ev_lo = detail::eval_tilt(ws, lo);
  for (int it = 0; it < 200; ++it) {
    if (C - ev_lo.kl <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in double precision
    detail::TiltEval ev_mid = detail::eval_tilt(ws, mid);
    if (ev_mid.kl > C) {
      hi = mid;
    } else {
      lo = mid;
      ev_lo = std::move(ev_mid);
    }
  }
  sol.lambda_star = lo;
  sol.tilted_weights = detail::scatter_to_full(ws, ev_lo.q, sample.weights.size());
  sol.robust_risk = std::max(ev_lo.mean_loss, ws.baseline);
  sol.achieved_kl = ev_lo.kl;
  return sol;
}

// Dual objective (C + log sum w_s exp(lambda L_s)) / lambda; its infimum over
// lambda > 0 equals the robust risk.
inline double psi_dual(const WeightedSample& sample, double C, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("psi_dual: lambda must be positive");
  if (!(C >= 0.0)) throw parameter_error("psi_dual: C must be nonnegative");
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  double shift = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(ws.support.size());
  for (std::size_t i = 0; i < ws.support.size(); ++i) {
    terms[i] = ws.log_w[i] + lambda * ws.loss[i];
    shift = std::max(shift, terms[i]);
  }
  double z = 0.0;
  for (double t : terms) z += std::exp(t - shift);
  return (C + shift + std::log(z)) / lambda;
}

// ---------------------------------------------------------------------------
// Exact two-point robust error
// ---------------------------------------------------------------------------

// Worst-case misclassification probability for a two-point posterior with
// baseline error e0 under a KL ball of radius C: the q in [e0, 1] solving
// kl(q, e0) = C, or 1 when even the point mass fits inside the ball.
inline double two_point_robust_error(double e0, double C, double tol = 1e-12) {
  if (!(e0 >= 0.0 && e0 <= 1.0))
    throw parameter_error("two_point_robust_error: e0 must lie in [0,1]");
  if (!(C >= 0.0)) throw parameter_error("two_point_robust_error: C must be nonnegative");
  if (!(tol > 0.0)) throw parameter_error("two_point_robust_error: tol must be positive");
  if (C == 0.0 || e0 == 0.0) return e0;  // the ball around a point mass is the point
  if (e0 == 1.0) return 1.0;
  if (-std::log(e0) <= C) return 1.0;  // kl(1, e0) = -log e0: vertex reachable
  double lo = e0, hi = 1.0;
  double kl_lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    if (C - kl_lo <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double kl_mid = bernoulli_kl(mid, e0);
    if (kl_mid > C) {
      hi = mid;
    } else {
      lo = mid;
      kl_lo = kl_mid;
    }
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Mirror-descent adversary over phi-divergence balls
// ---------------------------------------------------------------------------

// Step-size heuristic for the mirror adversary: half the reciprocal of the
// largest loss deviation from the baseline, so one step cannot overshoot the
// tilt scale.
inline double default_mirror_step(const WeightedSample& sample) {
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  double dev = 0.0;
  for (double l : ws.loss) dev = std::max(dev, std::abs(l - ws.baseline));
  return dev == 0.0 ? 1.0 : 0.5 / dev;
}

// Projected mirror ascent in log-tilt space. Each iteration takes a
// multiplicative step toward higher loss, then projects back onto the ball:
//  * KL ball: geometric mixture q ~ w^(1-beta) qtilde^beta with beta chosen
//    by bisection so KL(q||w) = radius (exact Bregman projection along the
//    tilt path);
//  * chi^2 ball: shrink along the chord q = (1-gamma) w + gamma qtilde; the
//    divergence is quadratic in gamma, so gamma = sqrt(radius/chi2(qtilde)).
// The log-tilt state is refreshed from the projected point every iteration.
inline TiltSolution mirror_descent_adversary(const WeightedSample& sample,
                                             const PhiBall& ball, double step,
                                             int iters) {
  if (!(ball.radius > 0.0))
    throw parameter_error("mirror_descent_adversary: radius must be positive");
  if (!(step > 0.0) || !std::isfinite(step))
    throw parameter_error("mirror_descent_adversary: step must be positive");
  if (iters < 1) throw parameter_error("mirror_descent_adversary: iters must be >= 1");
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  const std::size_t s = ws.support.size();
  std::vector<double> w(s);
  for (std::size_t i = 0; i < s; ++i) w[i] = std::exp(ws.log_w[i]);

  std::vector<double> u(s, 0.0), q(w), qt(s), log_qt(s);
  auto renormalize_tilt = [&](const std::vector<double>& logits,
                              std::vector<double>& out) {
    double shift = -std::numeric_limits<double>::infinity();
    for (double x : logits) shift = std::max(shift, x);
    double z = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      out[i] = std::exp(logits[i] - shift);
      z += out[i];
    }
    for (std::size_t i = 0; i < s; ++i) out[i] /= z;
  };

  for (int t = 0; t < iters; ++t) {
    double mean_loss = 0.0;
    for (std::size_t i = 0; i < s; ++i) mean_loss += q[i] * ws.loss[i];
    for (std::size_t i = 0; i < s; ++i)
      log_qt[i] = u[i] + ws.log_w[i] + step * (ws.loss[i] - mean_loss);
    renormalize_tilt(log_qt, qt);

    if (ball.kind == BallKind::KL) {
      if (detail::kl_weights(qt, w) <= ball.radius) {
        q = qt;
      } else {
        // Geometric path between w (beta=0) and qt (beta=1); KL(q(beta)||w)
        // increases in beta, keep the feasible endpoint.
        std::vector<double> cand(s), logits(s);
        double lo = 0.0, hi = 1.0;
        for (int it2 = 0; it2 < 100; ++it2) {
          const double beta = 0.5 * (lo + hi);
          for (std::size_t i = 0; i < s; ++i)
            logits[i] = (1.0 - beta) * ws.log_w[i] +
                        beta * (u[i] + ws.log_w[i] + step * ws.loss[i]);
          renormalize_tilt(logits, cand);
          if (detail::kl_weights(cand, w) > ball.radius) hi = beta;
          else lo = beta;
        }
        for (std::size_t i = 0; i < s; ++i)
          logits[i] = (1.0 - lo) * ws.log_w[i] +
                      lo * (u[i] + ws.log_w[i] + step * ws.loss[i]);
        renormalize_tilt(logits, q);
      }
    } else {
      const double chi2 = detail::chi2_weights(qt, w);
      const double gamma = chi2 <= ball.radius ? 1.0 : std::sqrt(ball.radius / chi2);
      for (std::size_t i = 0; i < s; ++i) q[i] = (1.0 - gamma) * w[i] + gamma * qt[i];
    }
    for (std::size_t i = 0; i < s; ++i)
      u[i] = std::log(std::max(q[i], 1e-300)) - ws.log_w[i];
  }

  TiltSolution sol;
  sol.lambda_star = 0.0;  // not meaningful for the iterative adversary
  sol.tilted_weights = detail::scatter_to_full(ws, q, sample.weights.size());
  double risk = 0.0;
  for (std::size_t i = 0; i < s; ++i) risk += q[i] * ws.loss[i];
  sol.robust_risk = risk;
  sol.achieved_kl = ball.kind == BallKind::KL ? detail::kl_weights(q, w)
                                              : detail::chi2_weights(q, w);
  return sol;
}

// ---------------------------------------------------------------------------
// Small-radius expansion and sensitivity curves
// ---------------------------------------------------------------------------

// First-order worst-case risk: m + sqrt(2 Var L) * sqrt(C). Callers needing
// the squared-loss corollary pass loss_variance = 2 * baseline^2.
inline double small_radius_prediction(double baseline_risk, double loss_variance,
                                      double C) {
  if (!(loss_variance >= 0.0))
    throw parameter_error("small_radius_prediction: variance must be nonnegative");
  if (!(C >= 0.0)) throw parameter_error("small_radius_prediction: C must be nonnegative");
  return baseline_risk + std::sqrt(2.0 * loss_variance) * std::sqrt(C);
}

inline double weighted_loss_variance(const WeightedSample& sample) {
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  double var = 0.0;
  for (std::size_t i = 0; i < ws.support.size(); ++i) {
    const double d = ws.loss[i] - ws.baseline;
    var += std::exp(ws.log_w[i]) * d * d;
  }
  return var;
}

inline SensitivityCurve sensitivity_curve(const WeightedSample& sample,
                                          const std::vector<double>& radii,
                                          Normalization normalization,
                                          double tol = 1e-10) {
  if (radii.empty()) throw parameter_error("sensitivity_curve: empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw parameter_error("sensitivity_curve: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw parameter_error("sensitivity_curve: radii must be increasing");
  }
  SensitivityCurve curve;
  curve.radii = radii;
  const detail::TiltWorkspace ws = detail::tilt_workspace(sample);
  curve.baseline_risk = ws.baseline;
  const double var = weighted_loss_variance(sample);
  for (double C : radii) {
    const TiltSolution sol = kl_tilt_solve(sample, C, tol);
    curve.robust_risks.push_back(sol.robust_risk);
    const double excess = sol.robust_risk - curve.baseline_risk;
    double denom = 1.0;
    switch (normalization) {
      case Normalization::RhoSqrtC:
        denom = curve.baseline_risk * std::sqrt(C);
        break;
      case Normalization::VarSqrtC:
        denom = std::sqrt(2.0 * var) * std::sqrt(C);
        break;
      case Normalization::None:
        denom = 1.0;
        break;
    }
    curve.normalized.push_back(
        denom == 0.0 ? (excess == 0.0 ? 0.0 : excess / denom) : excess / denom);
  }
  return curve;
}

}  // namespace robnet
