#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph.hpp"
#include "robnet/graph_models.hpp"
#include "robnet/rng.hpp"

namespace robnet {

// ---------------------------------------------------------------------------
// Two-point posterior (model 0 vs model 1)
// ---------------------------------------------------------------------------

struct TwoPointPosterior {
  double p0 = 0.5;
  double p1 = 0.5;
  double log_bf = 0.0;  // log Bayes factor including prior odds
};

// Stable sigmoid: p1 = 1/(1+exp(-log_bf)) without overflow for |log_bf|
// up to and beyond 700 (saturates to exactly {0,1} in the tails).
inline TwoPointPosterior two_point_from_log_bf(double log_bf) {
  TwoPointPosterior post;
  post.log_bf = log_bf;
  if (log_bf >= 0.0) {
    const double e = std::exp(-log_bf);
    post.p1 = 1.0 / (1.0 + e);
    post.p0 = e / (1.0 + e);
  } else {
    const double e = std::exp(log_bf);
    post.p1 = e / (1.0 + e);
    post.p0 = 1.0 / (1.0 + e);
  }
  return post;
}

// Exact posterior for ER (model 0) vs labelled two-block (model 1). The
// Bayes factor depends on the graph only through the within/cross-label edge
// counts, so the sum runs over edges plus a closed-form non-edge count per
// pair class: O(m + 1), not O(n^2).
inline TwoPointPosterior er_vs_sbm_posterior(const Graph& g,
                                             const std::vector<int>& labels,
                                             double c, double lambda,
                                             double prior_odds) {
  LabelledSbmParams params{g.n, c, lambda, labels};
  validate(params);
  if (!(prior_odds > 0.0) || !std::isfinite(prior_odds))
    throw parameter_error("er_vs_sbm_posterior: prior odds must be positive and finite");
  const double nd = static_cast<double>(g.n);
  const double p = c / nd, p_in = (c + lambda) / nd, p_out = (c - lambda) / nd;
  if (!(p > 0.0 && p < 1.0))
    throw parameter_error("er_vs_sbm_posterior: need 0 < c < n");
  double m_in = 0.0, m_out = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j : g.adjacency[static_cast<std::size_t>(i)])
      if (i < j) {
        if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)])
          m_in += 1.0;
        else
          m_out += 1.0;
      }
  const double n_in = nd * (nd - 2.0) / 4.0;
  const double n_out = nd * nd / 4.0;
  const double log_bf = std::log(prior_odds) +
                        m_in * std::log(p_in / p) +
                        (n_in - m_in) * std::log((1.0 - p_in) / (1.0 - p)) +
                        m_out * std::log(p_out / p) +
                        (n_out - m_out) * std::log((1.0 - p_out) / (1.0 - p));
  return two_point_from_log_bf(log_bf);
}

struct BayesDecision {
  int action = 1;     // argmax posterior model; ties resolve to model 1
  double e0 = 0.5;    // min(p0, p1): the posterior misclassification risk
};

inline BayesDecision bayes_action_and_error(const TwoPointPosterior& post) {
  BayesDecision d;
  d.action = post.p1 >= post.p0 ? 1 : 0;
  d.e0 = std::min(post.p0, post.p1);
  return d;
}

// ---------------------------------------------------------------------------
// Weighted posterior samples
// ---------------------------------------------------------------------------

struct WeightedSample {
  std::vector<double> atoms;
  std::vector<double> weights;  // normalized, nonnegative
  std::vector<double> losses;   // empty until a loss is attached
};

inline void validate(const WeightedSample& s) {
  if (s.atoms.empty()) throw parameter_error("weighted sample: no atoms");
  if (s.weights.size() != s.atoms.size())
    throw parameter_error("weighted sample: weight/atom length mismatch");
  if (!s.losses.empty() && s.losses.size() != s.atoms.size())
    throw parameter_error("weighted sample: loss/atom length mismatch");
  double total = 0.0;
  for (double w : s.weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw parameter_error("weighted sample: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw parameter_error("weighted sample: weights must sum to 1");
}

inline WeightedSample make_weighted_sample(std::vector<double> atoms,
                                           std::vector<double> weights,
                                           std::vector<double> losses = {}) {
  WeightedSample s{std::move(atoms), std::move(weights), std::move(losses)};
  validate(s);
  return s;
}

inline WeightedSample uniform_weighted_sample(std::vector<double> atoms) {
  const std::size_t n = atoms.size();
  if (n == 0) throw parameter_error("weighted sample: no atoms");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return WeightedSample{std::move(atoms), std::move(w), {}};
}

// ---------------------------------------------------------------------------
// Truncated-Gamma pseudo-posterior for the Poisson degree mean
// ---------------------------------------------------------------------------

struct TruncatedGammaPosterior {
  double shape = 1.0;
  double rate = 1.0;
  // Truncation: the mean parameter is restricted to (0, 1), the subcritical
  // region for Poisson degrees.
};

// Conjugate update: shape' = prior_shape + sum of degrees, rate' =
// prior_rate + n; draws from the Gamma posterior are rejected at >= 1.
inline WeightedSample poisson_mean_pseudo_posterior(const Graph& g,
                                                    double prior_shape,
                                                    double prior_rate,
                                                    int n_draws,
                                                    std::uint64_t seed) {
  if (!(prior_shape > 0.0) || !(prior_rate > 0.0))
    throw parameter_error("poisson_mean_pseudo_posterior: prior parameters must be positive");
  if (n_draws < 1)
    throw parameter_error("poisson_mean_pseudo_posterior: n_draws must be >= 1");
  const double degree_sum = 2.0 * static_cast<double>(num_edges(g));
  const TruncatedGammaPosterior post{prior_shape + degree_sum,
                                     prior_rate + static_cast<double>(g.n)};
  Rng rng(seed);
  std::vector<double> atoms;
  atoms.reserve(static_cast<std::size_t>(n_draws));
  // Acceptance below 1e-3 means the posterior is essentially supercritical;
  // cap total attempts accordingly and fail loudly rather than spin.
  const long long max_attempts =
      2000LL * static_cast<long long>(n_draws) + 1000;
  long long attempts = 0;
  while (static_cast<int>(atoms.size()) < n_draws) {
    if (++attempts > max_attempts)
      throw degenerate_input_error(
          "poisson_mean_pseudo_posterior: truncation-degenerate (acceptance < 1e-3)");
    const double draw = rng.gamma(post.shape) / post.rate;
    if (draw < 1.0) atoms.push_back(draw);
  }
  return uniform_weighted_sample(std::move(atoms));
}

// ---------------------------------------------------------------------------
// Losses and model weights
// ---------------------------------------------------------------------------

// Squared-error loss against the susceptibility functional R(mu) = 1/(1-mu).
// Atoms are Poisson means; all must be subcritical (< 1).
inline WeightedSample susceptibility_losses(const WeightedSample& sample,
                                            double action) {
  validate(sample);
  WeightedSample out = sample;
  out.losses.resize(sample.atoms.size());
  for (std::size_t i = 0; i < sample.atoms.size(); ++i) {
    const double mu = sample.atoms[i];
    if (!(mu < 1.0))
      throw parameter_error("susceptibility_losses: atom >= 1 (supercritical)");
    const double r = 1.0 / (1.0 - mu);
    out.losses[i] = (action - r) * (action - r);
  }
  return out;
}

inline double susceptibility_of_mean(double mu) {
  if (!(mu < 1.0)) throw parameter_error("susceptibility_of_mean: mu must be < 1");
  return 1.0 / (1.0 - mu);
}

// Softmax of -tau/2 * BIC with max-subtraction for stability.
inline std::vector<double> tempered_bic_weights(const std::vector<double>& bics,
                                                double tau) {
  if (bics.empty()) throw parameter_error("tempered_bic_weights: empty BIC vector");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw parameter_error("tempered_bic_weights: tau must be positive and finite");
  for (double b : bics)
    if (!std::isfinite(b)) throw parameter_error("tempered_bic_weights: non-finite BIC");
  double best = bics[0];
  for (double b : bics) best = std::min(best, b);
  std::vector<double> w(bics.size());
  double z = 0.0;
  for (std::size_t k = 0; k < bics.size(); ++k) {
    w[k] = std::exp(-0.5 * tau * (bics[k] - best));
    z += w[k];
  }
  for (double& x : w) x /= z;
  return w;
}

// ---------------------------------------------------------------------------
// CSV I/O for weighted samples: columns atom,weight[,loss]
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_weighted_sample_csv(const WeightedSample& s,
                                      const std::string& path) {
  validate(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  const bool with_loss = !s.losses.empty();
  out << (with_loss ? "atom,weight,loss\n" : "atom,weight\n");
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    out << detail::format_double(s.atoms[i]) << ','
        << detail::format_double(s.weights[i]);
    if (with_loss) out << ',' << detail::format_double(s.losses[i]);
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

// Reads atom,weight[,loss]; a leading header row is skipped. Weights are
// renormalized to sum exactly to 1 (hand-written CSVs rarely sum to 1 in
// binary floating point).
inline WeightedSample read_weighted_sample_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  WeightedSample s;
  std::string line;
  bool first = true;
  bool any_loss = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      try {
        (void)std::stod(cells.at(0));
      } catch (...) {
        continue;  // header row
      }
    }
    if (cells.size() != 2 && cells.size() != 3)
      throw io_error("weighted-sample CSV rows need 2 or 3 columns: " + path);
    try {
      s.atoms.push_back(std::stod(cells[0]));
      s.weights.push_back(std::stod(cells[1]));
      if (cells.size() == 3) {
        s.losses.push_back(std::stod(cells[2]));
        any_loss = true;
      }
    } catch (const std::exception&) {
      throw io_error("bad numeric cell in row \"" + line + "\": " + path);
    }
  }
  if (s.atoms.empty()) throw io_error("weighted-sample CSV has no rows: " + path);
  if (any_loss && s.losses.size() != s.atoms.size())
    throw io_error("weighted-sample CSV mixes 2- and 3-column rows: " + path);
  double total = 0.0;
  for (double w : s.weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw io_error("weighted-sample CSV has invalid weights: " + path);
    total += w;
  }
  if (!(total > 0.0)) throw io_error("weighted-sample CSV weights sum to zero: " + path);
  for (double& w : s.weights) w /= total;
  validate(s);
  return s;
}

}  // namespace robnet
