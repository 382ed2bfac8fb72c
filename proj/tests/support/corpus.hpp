#pragma once

// Seeded random graphs shared by the unit and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "adalogn/oracle.hpp"
#include "adalogn/random.hpp"
#include "adalogn/tlg.hpp"

namespace adalogn::testing {

/// Context-only graph with 2..max_nodes nodes, random impl edges and a
/// random matching of neg edges (so every node has at most one twin).
inline Tlg random_impl_neg_graph(std::uint64_t seed, std::size_t max_nodes = 8) {
  Rng rng(mix_seed(seed));
  const std::size_t n = 2 + rng.index(max_nodes - 1);
  Tlg g;
  std::vector<NodeId> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(g.add_node("X" + std::to_string(i), Part::context));

  std::vector<NodeId> pool = ids;
  rng.shuffle(pool);
  const std::size_t neg_pairs = rng.index(n / 2 + 1);
  for (std::size_t k = 0; k < neg_pairs; ++k) g.add_edge(pool[2 * k], Relation::neg, pool[2 * k + 1]);

  const std::size_t impl_edges = 1 + rng.index(n + 2);
  for (std::size_t k = 0; k < impl_edges; ++k) {
    const NodeId a = ids[rng.index(n)];
    const NodeId b = ids[rng.index(n)];
    if (a == b || g.has_edge(a, Relation::neg, b)) continue;
    g.add_edge(a, Relation::impl, b);
  }
  return g;
}

/// Literal pairs (lit(u), lit(v)) of every impl edge of g.
inline LiteralPairs impl_literal_pairs(const Tlg& g) {
  const auto lits = literal_map(g);
  LiteralPairs out;
  for (const Edge& e : g.edges()) {
    if (e.rel == Relation::impl) out.insert({lits.at(e.src), lits.at(e.dst)});
  }
  return out;
}

}  // namespace adalogn::testing
