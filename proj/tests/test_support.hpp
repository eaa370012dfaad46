#pragma once

// Shared helpers for the module test suites: tolerance assertions, empirical
// distribution checks, random weighted-sample generators, and a brute-force
// simplex-grid oracle for the worst-case reweighting problem.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "robnet/info_indices.hpp"
#include "robnet/posteriors.hpp"
#include "robnet/rng.hpp"

namespace testsupport {

inline void expect_rel_near(double actual, double expected, double rel_tol,
                            const char* what = "") {
  const double scale = std::max(std::abs(expected), 1e-300);
  EXPECT_LE(std::abs(actual - expected), rel_tol * scale)
      << what << ": actual " << actual << " expected " << expected;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> draws,
                           const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    stat = std::max(stat, std::abs(f - static_cast<double>(i) / n));
    stat = std::max(stat, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return stat;
}

// Two-sample KS statistic (ties allowed; suprema over both ECDFs).
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double stat = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    stat = std::max(stat, std::abs(fa - fb));
  }
  return stat;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Random weighted sample with positive weights and losses in [0, loss_range].
inline robnet::WeightedSample random_sample(int size, robnet::Rng& rng,
                                            double loss_range = 1.0) {
  std::vector<double> atoms(static_cast<std::size_t>(size));
  std::vector<double> weights(static_cast<std::size_t>(size));
  std::vector<double> losses(static_cast<std::size_t>(size));
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    atoms[static_cast<std::size_t>(i)] = rng.uniform01();
    weights[static_cast<std::size_t>(i)] = 0.05 + rng.uniform01();
    losses[static_cast<std::size_t>(i)] = loss_range * rng.uniform01();
    total += weights[static_cast<std::size_t>(i)];
  }
  double acc = 0.0;
  for (int i = 0; i + 1 < size; ++i) {
    weights[static_cast<std::size_t>(i)] /= total;
    acc += weights[static_cast<std::size_t>(i)];
  }
  weights[static_cast<std::size_t>(size - 1)] = 1.0 - acc;  // exact sum 1
  return robnet::make_weighted_sample(atoms, weights, losses);
}

// KL divergence of a dense distribution q from w (same support, q may have
// zeros).
inline double simplex_kl(const std::vector<double>& q,
                         const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0) acc += q[i] * std::log(q[i] / w[i]);
  return acc;
}

namespace detail {

// Enumerate q on the simplex grid {k/G} and keep the best feasible risk.
inline void grid_scan(const std::vector<double>& w, const std::vector<double>& l,
                      double radius, int grid, std::vector<double>& q,
                      std::size_t coord, double remaining, int remaining_ticks,
                      double& best, std::vector<double>& best_q) {
  if (coord + 1 == q.size()) {
    q[coord] = remaining;
    if (simplex_kl(q, w) <= radius) {
      double risk = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) risk += q[i] * l[i];
      if (risk > best) {
        best = risk;
        best_q = q;
      }
    }
    return;
  }
  for (int k = 0; k <= remaining_ticks; ++k) {
    q[coord] = static_cast<double>(k) / grid;
    grid_scan(w, l, radius, grid, q, coord + 1, remaining - q[coord],
              remaining_ticks - k, best, best_q);
  }
}

}  // namespace detail

// Brute-force worst-case risk over the KL ball by dense simplex search with
// one local refinement pass. Intended for supports of size <= 4.
inline double simplex_grid_worst_risk(const robnet::WeightedSample& sample,
                                      double radius, int coarse_grid = 150,
                                      int refine_steps = 60) {
  const std::vector<double>& w = sample.weights;
  const std::vector<double>& l = sample.losses;
  const std::size_t s = w.size();
  std::vector<double> q(s, 0.0), best_q(w);
  double best = 0.0;
  for (std::size_t i = 0; i < s; ++i) best += w[i] * l[i];
  detail::grid_scan(w, l, radius, coarse_grid, q, 0, 1.0, coarse_grid, best,
                    best_q);
  // Local refinement: re-grid a box around the coarse optimum in the first
  // s-1 coordinates, last coordinate takes the slack.
  const double h = 1.0 / coarse_grid;
  const double fine = 2.0 * h / refine_steps;
  std::vector<int> idx(s - 1, 0);
  std::vector<double> probe(s, 0.0);
  bool done = s == 1;
  while (!done) {
    double acc = 0.0;
    bool valid = true;
    for (std::size_t i = 0; i < s - 1; ++i) {
      probe[i] = best_q[i] - h + fine * idx[i];
      if (probe[i] < 0.0) probe[i] = 0.0;
      if (probe[i] > 1.0) valid = false;
      acc += probe[i];
    }
    if (valid && acc <= 1.0) {
      probe[s - 1] = 1.0 - acc;
      if (simplex_kl(probe, w) <= radius) {
        double risk = 0.0;
        for (std::size_t i = 0; i < s; ++i) risk += probe[i] * l[i];
        if (risk > best) best = risk;
      }
    }
    std::size_t c = 0;
    while (c < s - 1 && ++idx[c] > refine_steps) {
      idx[c] = 0;
      ++c;
    }
    done = c == s - 1;
  }
  return best;
}

// Golden-section minimization of a unimodal function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, double width) {
  const double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > width) {
    if (f1 > f2) {
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
  return f(0.5 * (a + b));
}

}  // namespace testsupport
