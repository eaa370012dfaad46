#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph.hpp"
#include "robnet/graph_models.hpp"

namespace robnet {

struct ComponentDecomposition {
  std::vector<int> component_id;  // per vertex, contiguous ids from 0
  std::vector<int> sizes;         // size per component id
};

inline ComponentDecomposition connected_components(const Graph& g) {
  ComponentDecomposition out;
  out.component_id.assign(static_cast<std::size_t>(g.n), -1);
  std::vector<int> stack;
  for (int start = 0; start < g.n; ++start) {
    if (out.component_id[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.sizes.size());
    int size = 0;
    stack.push_back(start);
    out.component_id[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      ++size;
      for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
        if (out.component_id[static_cast<std::size_t>(u)] < 0) {
          out.component_id[static_cast<std::size_t>(u)] = id;
          stack.push_back(u);
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

inline int largest_component_size(const ComponentDecomposition& cd) {
  int best = 0;
  for (int s : cd.sizes) best = std::max(best, s);
  return best;
}

// Expected component size of a uniformly random vertex: sum of squared
// component sizes over n.
inline double empirical_susceptibility(const Graph& g) {
  const ComponentDecomposition cd = connected_components(g);
  double acc = 0.0;
  for (int s : cd.sizes) acc += static_cast<double>(s) * static_cast<double>(s);
  return acc / static_cast<double>(g.n);
}

// 3 * triangles / connected triples; 0 when the graph has no triples.
inline double global_clustering(const Graph& g) {
  if (g.n < 3) throw parameter_error("global_clustering: need n >= 3");
  double triples = 0.0;
  for (int v = 0; v < g.n; ++v) {
    const double d = static_cast<double>(degree(g, v));
    triples += d * (d - 1.0) / 2.0;
  }
  if (triples == 0.0) return 0.0;
  // Each triangle is counted once per edge by intersecting sorted neighbor
  // lists, i.e. three times in total.
  double triangle_thirds = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const auto& ni = g.adjacency[static_cast<std::size_t>(i)];
    for (int j : ni) {
      if (j <= i) continue;
      const auto& nj = g.adjacency[static_cast<std::size_t>(j)];
      std::size_t a = 0, b = 0;
      while (a < ni.size() && b < nj.size()) {
        if (ni[a] < nj[b]) ++a;
        else if (ni[a] > nj[b]) ++b;
        else { triangle_thirds += 1.0; ++a; ++b; }
      }
    }
  }
  return triangle_thirds / triples;  // 3*T / triples with T = thirds/3
}

// Mean shortest-path distance over connected vertex pairs (BFS from every
// vertex). Pairs in different components are excluded by convention.
inline double average_path_length(const Graph& g) {
  if (g.n < 2) throw parameter_error("average_path_length: need n >= 2");
  double dist_sum = 0.0;
  std::uint64_t pair_count = 0;
  std::vector<int> dist(static_cast<std::size_t>(g.n));
  std::vector<int> frontier, next;
  for (int s = 0; s < g.n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(s)] = 0;
    frontier.assign(1, s);
    int level = 0;
    while (!frontier.empty()) {
      ++level;
      next.clear();
      for (int v : frontier) {
        for (int u : g.adjacency[static_cast<std::size_t>(v)]) {
          if (dist[static_cast<std::size_t>(u)] < 0) {
            dist[static_cast<std::size_t>(u)] = level;
            dist_sum += level;
            ++pair_count;
            next.push_back(u);
          }
        }
      }
      frontier.swap(next);
    }
  }
  if (pair_count == 0)
    throw degenerate_input_error("average_path_length: no connected pair exists");
  return dist_sum / static_cast<double>(pair_count);  // ordered pairs; same mean
}

// S = (C/C_rand) / (L/L_rand) against ER references matched on (n, m),
// averaged over the supplied reference seeds.
inline double small_world_index(const Graph& g,
                                const std::vector<std::uint64_t>& reference_seeds) {
  if (reference_seeds.empty())
    throw parameter_error("small_world_index: need at least one reference seed");
  const double C = global_clustering(g);
  const double L = average_path_length(g);
  const std::uint64_t m = num_edges(g);
  double c_sum = 0.0, l_sum = 0.0;
  int l_count = 0;
  for (std::uint64_t s : reference_seeds) {
    Graph ref = sample_gnm(g.n, m, s);
    c_sum += global_clustering(ref);
    try {
      l_sum += average_path_length(ref);
      ++l_count;
    } catch (const degenerate_input_error&) {
      // Reference with no connected pair contributes no path-length term.
    }
  }
  const double c_rand = c_sum / static_cast<double>(reference_seeds.size());
  if (c_rand == 0.0)
    throw degenerate_input_error("small_world_index: reference clustering is zero");
  if (l_count == 0)
    throw degenerate_input_error("small_world_index: reference path length undefined");
  const double l_rand = l_sum / static_cast<double>(l_count);
  return (C / c_rand) / (L / l_rand);
}

// Leading adjacency eigenvalue by power iteration. Internally iterates on
// A + I: for any graph 1 + lambda_max strictly dominates |1 + lambda_min| in
// magnitude, so the shift removes the bipartite +/- ambiguity; the returned
// value subtracts the shift. Start vector is all-ones plus a tiny fixed
// jitter so starts orthogonal to the leading eigenvector cannot occur.
inline double leading_eigenvalue(const Graph& g, double tol = 1e-8,
                                 int max_iters = 10000) {
  if (g.n < 1) throw parameter_error("leading_eigenvalue: empty graph");
  if (!(tol > 0.0)) throw parameter_error("leading_eigenvalue: tol must be positive");
  if (max_iters < 1) throw parameter_error("leading_eigenvalue: max_iters must be >= 1");
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::vector<double> v(n), w(n);
  Rng jitter(0x707E12ED);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 1e-6 * jitter.uniform01();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < max_iters; ++it) {
    // w = (A + I) v
    for (std::size_t i = 0; i < n; ++i) {
      double acc = v[i];
      for (int u : g.adjacency[i]) acc += v[static_cast<std::size_t>(u)];
      w[i] = acc;
    }
    double vv = 0.0, vw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vv += v[i] * v[i];
      vw += v[i] * w[i];
    }
    const double rayleigh = vw / vv;  // estimate of 1 + lambda_max
    if (it > 0 && std::abs(rayleigh - prev) < tol) return rayleigh - 1.0;
    prev = rayleigh;
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;  // cannot happen for A + I with positive v
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  throw convergence_error("leading_eigenvalue: power iteration did not converge",
                          prev - 1.0);
}

}  // namespace robnet
