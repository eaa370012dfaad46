#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "robnet/errors.hpp"

namespace robnet {

// Simple undirected graph: vertex count plus per-vertex sorted neighbor
// lists. Immutable by convention after construction via the factories below.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adjacency;
};

inline std::size_t num_edges(const Graph& g) {
  std::size_t twice = 0;
  for (const auto& nb : g.adjacency) twice += nb.size();
  return twice / 2;
}

inline int degree(const Graph& g, int v) {
  return static_cast<int>(g.adjacency[static_cast<std::size_t>(v)].size());
}

inline bool has_edge(const Graph& g, int i, int j) {
  const auto& nb = g.adjacency[static_cast<std::size_t>(i)];
  return std::binary_search(nb.begin(), nb.end(), j);
}

// Edges as sorted unordered pairs (i < j).
inline std::vector<std::pair<int, int>> edge_list(const Graph& g) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(num_edges(g));
  for (int i = 0; i < g.n; ++i)
    for (int j : g.adjacency[static_cast<std::size_t>(i)])
      if (i < j) edges.emplace_back(i, j);
  return edges;
}

namespace detail {

inline Graph build_graph(int n, std::vector<std::pair<int, int>> edges,
                         bool erase_defects) {
  if (n < 1) throw parameter_error("graph: vertex count must be positive");
  for (auto& e : edges) {
    if (e.first < 0 || e.first >= n || e.second < 0 || e.second >= n)
      throw parameter_error("graph: edge endpoint out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::pair<int, int>> kept;
  kept.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.first == e.second) {
      if (!erase_defects) throw parameter_error("graph: self-loop");
      continue;
    }
    if (!kept.empty() && kept.back() == e) {
      if (!erase_defects) throw parameter_error("graph: duplicate edge");
      continue;
    }
    kept.push_back(e);
  }
  Graph g;
  g.n = n;
  g.adjacency.assign(static_cast<std::size_t>(n), {});
  for (const auto& e : kept) {
    g.adjacency[static_cast<std::size_t>(e.first)].push_back(e.second);
    g.adjacency[static_cast<std::size_t>(e.second)].push_back(e.first);
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  return g;
}

}  // namespace detail

// Strict factory: rejects self-loops, duplicates, out-of-range endpoints.
inline Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
  return detail::build_graph(n, std::move(edges), false);
}

// Erasing factory: drops self-loops and collapses duplicate edges
// (configuration-model erasure).
inline Graph make_graph_erased(int n, std::vector<std::pair<int, int>> edges) {
  return detail::build_graph(n, std::move(edges), true);
}

// Structural check used by the test suite: symmetry, sortedness, simplicity.
inline void validate_graph(const Graph& g) {
  if (g.n < 1 || g.adjacency.size() != static_cast<std::size_t>(g.n))
    throw parameter_error("graph: adjacency size mismatch");
  for (int i = 0; i < g.n; ++i) {
    const auto& nb = g.adjacency[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      int j = nb[k];
      if (j < 0 || j >= g.n) throw parameter_error("graph: neighbor out of range");
      if (j == i) throw parameter_error("graph: self-loop");
      if (k > 0 && nb[k - 1] >= j)
        throw parameter_error("graph: neighbors not strictly sorted");
      if (!has_edge(g, j, i)) throw parameter_error("graph: asymmetric adjacency");
    }
  }
}

// Text format: header "n m", then m lines "i j" with 0-based i < j, LF endings.
inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << g.n << ' ' << num_edges(g) << '\n';
  for (const auto& e : edge_list(g)) out << e.first << ' ' << e.second << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline Graph read_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::string header;
  if (!std::getline(in, header)) throw io_error("empty edge-list file: " + path);
  std::istringstream hs(header);
  long long n = 0, m = 0;
  if (!(hs >> n >> m) || n < 1 || m < 0)
    throw io_error("bad edge-list header (expected \"n m\"): " + path);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long i = -1, j = -1;
    if (!(ls >> i >> j)) throw io_error("bad edge line \"" + line + "\": " + path);
    if (i < 0 || j <= i || j >= n)
      throw io_error("edge endpoints must satisfy 0 <= i < j < n: " + path);
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  if (static_cast<long long>(edges.size()) != m)
    throw io_error("edge count does not match header: " + path);
  try {
    return make_graph(static_cast<int>(n), std::move(edges));
  } catch (const parameter_error& e) {
    throw io_error(std::string("invalid edge list: ") + e.what());
  }
}

}  // namespace robnet
