#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "robnet/errors.hpp"
#include "robnet/graph.hpp"
#include "robnet/rng.hpp"

namespace robnet {

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

// Sparse ER: each unordered pair is an edge independently with p = c/n.
struct SparseErParams {
  int n = 0;
  double c = 0.0;
};

inline void validate(const SparseErParams& p) {
  if (p.n < 1) throw parameter_error("sparse ER: n must be positive");
  if (!(p.c > 0.0) || !(p.c < p.n))
    throw parameter_error("sparse ER: need 0 < c < n so the edge probability is in (0,1)");
}

// Balanced two-block model with known labels: within-label pairs use
// (c+lambda)/n, cross-label pairs (c-lambda)/n.
struct LabelledSbmParams {
  int n = 0;
  double c = 0.0;
  double lambda = 0.0;
  std::vector<int> labels;  // entries in {+1,-1}, exactly n/2 of each
};

// Default label assignment: first n/2 vertices +1, the rest -1.
inline std::vector<int> balanced_labels(int n) {
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n / 2; ++i) labels[static_cast<std::size_t>(i)] = 1;
  return labels;
}

inline LabelledSbmParams make_sbm_params(int n, double c, double lambda) {
  return LabelledSbmParams{n, c, lambda, balanced_labels(n)};
}

inline void validate(const LabelledSbmParams& p) {
  if (p.n < 2 || p.n % 2 != 0)
    throw parameter_error("two-block model: n must be even and >= 2");
  if (!(std::abs(p.lambda) < p.c))
    throw parameter_error("two-block model: need |lambda| < c");
  const double p_in = (p.c + p.lambda) / p.n;
  const double p_out = (p.c - p.lambda) / p.n;
  if (!(p_in > 0.0 && p_in < 1.0 && p_out > 0.0 && p_out < 1.0))
    throw parameter_error("two-block model: edge probabilities must lie in (0,1)");
  if (p.labels.size() != static_cast<std::size_t>(p.n))
    throw parameter_error("two-block model: label vector length mismatch");
  int plus = 0;
  for (int s : p.labels) {
    if (s != 1 && s != -1) throw parameter_error("two-block model: labels must be +1/-1");
    if (s == 1) ++plus;
  }
  if (plus != p.n / 2) throw parameter_error("two-block model: labels must be balanced");
}

// K-block step function on [0,1]^2: block fractions pi and symmetric block
// matrix B with entries in [0,1].
struct StepGraphon {
  int K = 0;
  std::vector<double> pi;
  std::vector<std::vector<double>> B;
};

inline void validate(const StepGraphon& w) {
  if (w.K < 1) throw parameter_error("step graphon: K must be positive");
  if (w.pi.size() != static_cast<std::size_t>(w.K) ||
      w.B.size() != static_cast<std::size_t>(w.K))
    throw parameter_error("step graphon: dimension mismatch");
  double total = 0.0;
  for (double f : w.pi) {
    if (!(f > 0.0)) throw parameter_error("step graphon: block fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw parameter_error("step graphon: block fractions must sum to 1");
  for (int a = 0; a < w.K; ++a) {
    if (w.B[static_cast<std::size_t>(a)].size() != static_cast<std::size_t>(w.K))
      throw parameter_error("step graphon: B must be K x K");
    for (int b = 0; b < w.K; ++b) {
      double v = w.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (!(v >= 0.0 && v <= 1.0))
        throw parameter_error("step graphon: B entries must lie in [0,1]");
      if (std::abs(v - w.B[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]) > 1e-12)
        throw parameter_error("step graphon: B must be symmetric");
    }
  }
}

// Degree law for the configuration model: Poisson(mean) or an explicit
// distribution over degrees 0..d_max.
struct DegreeModel {
  enum class Kind { Poisson, Explicit };
  Kind kind = Kind::Poisson;
  double mean = 1.0;                 // Poisson
  std::vector<double> probs;         // Explicit: probs[d] = P(degree = d)

  static DegreeModel poisson(double mean) {
    DegreeModel m;
    m.kind = Kind::Poisson;
    m.mean = mean;
    return m;
  }
  static DegreeModel explicit_probs(std::vector<double> probs) {
    DegreeModel m;
    m.kind = Kind::Explicit;
    m.probs = std::move(probs);
    return m;
  }
};

inline void validate(const DegreeModel& d) {
  if (d.kind == DegreeModel::Kind::Poisson) {
    if (!(d.mean > 0.0) || !std::isfinite(d.mean))
      throw parameter_error("degree model: Poisson mean must be positive");
    return;
  }
  if (d.probs.empty()) throw parameter_error("degree model: empty probability vector");
  double total = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0)) throw parameter_error("degree model: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw parameter_error("degree model: probabilities must sum to 1");
}

// ---------------------------------------------------------------------------
// Pair-space machinery
// ---------------------------------------------------------------------------

namespace detail {

// Visit each index in [0, n_items) independently with probability p, in
// increasing order, via geometric skipping — O(expected hits), not O(n_items).
template <class Emit>
void bernoulli_subset(std::uint64_t n_items, double p, Rng& rng, Emit&& emit) {
  if (n_items == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < n_items; ++k) emit(k);
    return;
  }
  const double log1mp = std::log1p(-p);
  std::uint64_t k = 0;
  while (true) {
    double skip = std::floor(std::log(rng.uniform_pos()) / log1mp);
    if (!(skip < static_cast<double>(n_items - k))) return;
    k += static_cast<std::uint64_t>(skip);
    emit(k);
    if (++k >= n_items) return;
  }
}

inline std::uint64_t pairs_within(std::uint64_t s) { return s * (s - 1) / 2; }

// Decode linear index k into the (row, col) pair with row < col over a set of
// size s, ordering pairs row-major.
inline std::pair<std::uint64_t, std::uint64_t> decode_pair(std::uint64_t k,
                                                           std::uint64_t s) {
  const double sd = static_cast<double>(s);
  double guess = std::floor((2.0 * sd - 1.0 -
                             std::sqrt((2.0 * sd - 1.0) * (2.0 * sd - 1.0) -
                                       8.0 * static_cast<double>(k))) /
                            2.0);
  std::uint64_t i = guess > 0.0 ? static_cast<std::uint64_t>(guess) : 0;
  auto prefix = [s](std::uint64_t r) { return r * s - r * (r + 1) / 2; };
  while (i + 1 < s && prefix(i + 1) <= k) ++i;
  while (i > 0 && prefix(i) > k) --i;
  std::uint64_t j = i + 1 + (k - prefix(i));
  return {i, j};
}

// Bernoulli(p) edges among all pairs within one vertex set.
inline void add_within_edges(const std::vector<int>& verts, double p, Rng& rng,
                             std::vector<std::pair<int, int>>& edges) {
  const std::uint64_t s = verts.size();
  bernoulli_subset(pairs_within(s), p, rng, [&](std::uint64_t k) {
    auto [a, b] = decode_pair(k, s);
    edges.emplace_back(verts[a], verts[b]);
  });
}

// Bernoulli(p) edges among all pairs crossing two disjoint vertex sets.
inline void add_cross_edges(const std::vector<int>& left,
                            const std::vector<int>& right, double p, Rng& rng,
                            std::vector<std::pair<int, int>>& edges) {
  const std::uint64_t s2 = right.size();
  bernoulli_subset(static_cast<std::uint64_t>(left.size()) * s2, p, rng,
                   [&](std::uint64_t k) {
                     edges.emplace_back(left[k / s2], right[k % s2]);
                   });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Samplers (pure functions of params and seed)
// ---------------------------------------------------------------------------

inline Graph sample_sparse_er(const SparseErParams& params, std::uint64_t seed) {
  validate(params);
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  const std::uint64_t n = static_cast<std::uint64_t>(params.n);
  detail::bernoulli_subset(detail::pairs_within(n), params.c / params.n, rng,
                           [&](std::uint64_t k) {
                             auto [i, j] = detail::decode_pair(k, n);
                             edges.emplace_back(static_cast<int>(i),
                                                static_cast<int>(j));
                           });
  return make_graph(params.n, std::move(edges));
}

inline Graph sample_two_block_sbm(const LabelledSbmParams& params,
                                  std::uint64_t seed) {
  validate(params);
  Rng rng(seed);
  std::vector<int> plus, minus;
  for (int i = 0; i < params.n; ++i)
    (params.labels[static_cast<std::size_t>(i)] == 1 ? plus : minus).push_back(i);
  const double p_in = (params.c + params.lambda) / params.n;
  const double p_out = (params.c - params.lambda) / params.n;
  std::vector<std::pair<int, int>> edges;
  detail::add_within_edges(plus, p_in, rng, edges);
  detail::add_within_edges(minus, p_in, rng, edges);
  detail::add_cross_edges(plus, minus, p_out, rng, edges);
  return make_graph(params.n, std::move(edges));
}

struct GraphonSample {
  Graph graph;
  std::vector<int> latents;  // block index per vertex
};

inline GraphonSample sample_graphon(int n, const StepGraphon& w,
                                    std::uint64_t seed) {
  validate(w);
  if (n < 1) throw parameter_error("sample_graphon: n must be positive");
  Rng rng(seed);
  // Latent uniforms mapped to block indices through the cumulative fractions.
  std::vector<int> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    double acc = 0.0;
    int block = w.K - 1;
    for (int a = 0; a < w.K; ++a) {
      acc += w.pi[static_cast<std::size_t>(a)];
      if (u < acc) {
        block = a;
        break;
      }
    }
    z[static_cast<std::size_t>(i)] = block;
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(w.K));
  for (int i = 0; i < n; ++i)
    members[static_cast<std::size_t>(z[static_cast<std::size_t>(i)])].push_back(i);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < w.K; ++a) {
    detail::add_within_edges(members[static_cast<std::size_t>(a)],
                             w.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)],
                             rng, edges);
    for (int b = a + 1; b < w.K; ++b)
      detail::add_cross_edges(members[static_cast<std::size_t>(a)],
                              members[static_cast<std::size_t>(b)],
                              w.B[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                              rng, edges);
  }
  return GraphonSample{make_graph(n, std::move(edges)), std::move(z)};
}

inline Graph sample_configuration_model(int n, const DegreeModel& deg,
                                        std::uint64_t seed) {
  validate(deg);
  if (n < 1) throw parameter_error("configuration model: n must be positive");
  Rng rng(seed);
  std::vector<long long> degrees(static_cast<std::size_t>(n), 0);
  if (deg.kind == DegreeModel::Kind::Poisson) {
    for (auto& d : degrees) d = rng.poisson(deg.mean);
  } else {
    for (auto& d : degrees) {
      double u = rng.uniform01();
      double acc = 0.0;
      long long pick = static_cast<long long>(deg.probs.size()) - 1;
      for (std::size_t k = 0; k < deg.probs.size(); ++k) {
        acc += deg.probs[k];
        if (u < acc) {
          pick = static_cast<long long>(k);
          break;
        }
      }
      d = pick;
    }
  }
  long long total = 0;
  for (long long d : degrees) total += d;
  // Parity fix: if the stub count is odd, one uniformly chosen vertex gains a
  // stub (cheaper than rejection and asymptotically equivalent).
  if (total % 2 != 0) {
    degrees[static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(n)))] += 1;
    ++total;
  }
  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(total));
  for (int v = 0; v < n; ++v)
    for (long long k = 0; k < degrees[static_cast<std::size_t>(v)]; ++k)
      stubs.push_back(v);
  rng.shuffle(stubs);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t t = 0; t + 1 < stubs.size(); t += 2)
    edges.emplace_back(stubs[t], stubs[t + 1]);
  // Erased convention: self-loops dropped, duplicate edges collapsed.
  return make_graph_erased(n, std::move(edges));
}

// Uniform graph with exactly m edges (reference model for the small-world
// index). Floyd's sampling over the pair space keeps this O(m) in memory.
inline Graph sample_gnm(int n, std::uint64_t m, std::uint64_t seed) {
  if (n < 1) throw parameter_error("sample_gnm: n must be positive");
  const std::uint64_t n_pairs = detail::pairs_within(static_cast<std::uint64_t>(n));
  if (m > n_pairs) throw parameter_error("sample_gnm: m exceeds the number of pairs");
  Rng rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(m) * 2);
  for (std::uint64_t t = n_pairs - m; t < n_pairs; ++t) {
    std::uint64_t r = rng.uniform_below(t + 1);
    if (!chosen.insert(r).second) chosen.insert(t);
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (std::uint64_t k : chosen) {
    auto [i, j] = detail::decode_pair(k, static_cast<std::uint64_t>(n));
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return make_graph(n, std::move(edges));
}

}  // namespace robnet
