#pragma once

// Graph isomorphism as a double coset question.
//
// Encode a graph on n vertices as the set S of ordered pairs (i, j) with an
// edge, viewed as points of the n x n square. G is S_n acting on both
// coordinates at once, H the setwise stabilizer of S1 in Sym(n^2), and s any
// permutation of the square with s(S1) = S2. The graphs are isomorphic iff
// s is in GH.

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dcmzk/dcm.hpp"
#include "dcmzk/errors.hpp"
#include "dcmzk/group.hpp"
#include "dcmzk/permutation.hpp"

namespace dcmzk {

class Graph {
 public:
  explicit Graph(std::size_t n) : n_(n), adj_(n * n, false) {}

  std::size_t size() const noexcept { return n_; }
  bool adjacent(std::size_t u, std::size_t v) const { return adj_[u * n_ + v]; }

  void add_edge(std::size_t u, std::size_t v) {
    if (u >= n_ || v >= n_) throw PreconditionError("vertex out of range");
    if (u == v) throw PreconditionError("loops are not allowed");
    adj_[u * n_ + v] = adj_[v * n_ + u] = true;
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), true)) / 2;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < n_; ++u)
      for (std::size_t v = u + 1; v < n_; ++v)
        if (adjacent(u, v)) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_;
  std::vector<bool> adj_;
};

inline Point square_point_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i >= n || j >= n) throw PreconditionError("square index out of range");
  return static_cast<Point>(i * n + j);
}

// Points of the square holding a 1 in the adjacency matrix.
inline std::vector<Point> edge_points(const Graph& g) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.adjacent(i, j)) out.push_back(square_point_index(i, j, g.size()));
  return out;
}

// The permutation of the square induced by a vertex permutation pi:
// (i, j) -> (pi(i), pi(j)).
inline Permutation induced_on_square(const Permutation& pi) {
  const std::size_t n = pi.degree();
  std::vector<Point> images(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) images[i * n + j] = square_point_index(pi(i), pi(j), n);
  return Permutation(std::move(images));
}

// One generator per pair i < j: swap rows i, j and columns i, j together.
inline GeneratorSet conjugation_group_generators(std::size_t n) {
  if (n == 0) throw PreconditionError("n must be at least 1");
  std::vector<Permutation> gens;
  for (Point i = 0; i < n; ++i)
    for (Point j = i + 1; j < n; ++j) gens.push_back(induced_on_square(Permutation::from_cycles(n, {{i, j}})));
  return GeneratorSet(n * n, std::move(gens));
}

// Sym(S) x Sym(complement of S): adjacent transpositions along each part in
// sorted order.
inline GeneratorSet edge_set_stabilizer_generators(const std::vector<Point>& s, std::size_t degree) {
  std::vector<bool> in(degree, false);
  for (Point x : s) {
    if (x >= degree) throw PreconditionError("point out of range");
    in[x] = true;
  }
  std::vector<Point> inside, outside;
  for (Point x = 0; x < degree; ++x) (in[x] ? inside : outside).push_back(x);
  std::vector<Permutation> gens;
  for (const auto* part : {&inside, &outside})
    for (std::size_t i = 0; i + 1 < part->size(); ++i)
      gens.push_back(Permutation::from_cycles(degree, {{(*part)[i], (*part)[i + 1]}}));
  return GeneratorSet(degree, std::move(gens));
}

// sorted(S1) -> sorted(S2) in order, and likewise on the complements.
inline Permutation cross_map(const std::vector<Point>& s1, const std::vector<Point>& s2, std::size_t degree) {
  const std::set<Point> a(s1.begin(), s1.end()), b(s2.begin(), s2.end());
  if (a.size() != b.size()) throw SizeMismatch(a.size(), b.size());
  if ((!a.empty() && *a.rbegin() >= degree) || (!b.empty() && *b.rbegin() >= degree))
    throw PreconditionError("point out of range");
  std::vector<Point> from(a.begin(), a.end()), to(b.begin(), b.end());
  for (Point x = 0; x < degree; ++x) {
    if (!a.count(x)) from.push_back(x);
    if (!b.count(x)) to.push_back(x);
  }
  std::vector<Point> images(degree);
  for (std::size_t i = 0; i < degree; ++i) images[from[i]] = to[i];
  return Permutation(std::move(images));
}

// Returned whenever the edge counts differ.
inline DcmInstance canonical_no_instance() {
  return DcmInstance(Permutation::from_cycles(2, {{0, 1}}), GeneratorSet(2, {}), GeneratorSet(2, {}));
}

inline DcmInstance reduce_gi(const Graph& a, const Graph& b) {
  if (a.size() != b.size() || a.edge_count() != b.edge_count()) return canonical_no_instance();
  const std::size_t n = a.size();
  const auto s1 = edge_points(a);
  const auto s2 = edge_points(b);
  return DcmInstance(cross_map(s1, s2, n * n), conjugation_group_generators(n),
                     edge_set_stabilizer_generators(s1, n * n));
}

// "n <count>" then one 1-indexed "u v" line per undirected edge.
inline Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::optional<Graph> g;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (std::getline(in, raw)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto toks = detail::split_ws(line);
    if (!g) {
      if (toks.size() != 2 || toks[0] != "n") throw ParseError("expected 'n <count>' first");
      const auto n = detail::parse_count(toks[1], "vertex count");
      if (n == 0 || n > 255) throw ParseError("vertex count out of range");
      g.emplace(n);
      continue;
    }
    if (toks.size() != 2) throw ParseError("expected an edge 'u v'");
    const auto u = detail::parse_count(toks[0], "vertex");
    const auto v = detail::parse_count(toks[1], "vertex");
    if (u == 0 || v == 0 || u > g->size() || v > g->size()) throw ParseError("vertex out of range");
    if (u == v) throw ParseError("loops are not allowed");
    if (!seen.insert(std::minmax(u, v)).second) throw ParseError("duplicate edge");
    g->add_edge(u - 1, v - 1);
  }
  if (!g) throw ParseError("missing 'n' line");
  return *g;
}

inline std::string format_graph(const Graph& g) {
  std::string out = "n " + std::to_string(g.size()) + "\n";
  for (const auto& [u, v] : g.edges()) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

}  // namespace dcmzk
