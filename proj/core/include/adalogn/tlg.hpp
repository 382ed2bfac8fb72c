#pragma once

// Text Logic Graph: EDU nodes connected by typed logical relations.
//
// Edges are stored as explicit directed triples. Symmetric relations
// (conj, disj, neg, unk) always appear in both directions and every impl
// edge is paired with the opposite rev edge; add_edge() maintains both
// rules so callers never insert half an edge.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adalogn/error.hpp"

namespace adalogn {

enum class Relation : std::uint8_t { conj, disj, impl, neg, rev, unk };

inline constexpr std::array<Relation, 6> kAllRelations = {
    Relation::conj, Relation::disj, Relation::impl,
    Relation::neg,  Relation::rev,  Relation::unk};

std::string_view to_string(Relation r);
Relation relation_from_string(std::string_view s);

constexpr bool is_symmetric(Relation r) {
  return r == Relation::conj || r == Relation::disj || r == Relation::neg ||
         r == Relation::unk;
}

/// The relation stored on the reverse direction of an edge.
constexpr Relation inverse(Relation r) {
  if (r == Relation::impl) return Relation::rev;
  if (r == Relation::rev) return Relation::impl;
  return r;
}

enum class Part : std::uint8_t { context, option };

std::string_view to_string(Part p);
Part part_from_string(std::string_view s);

using NodeId = int;

struct Node {
  NodeId id = 0;
  std::string text;
  Part part = Part::context;
  std::optional<NodeId> neg_of;
  bool inferred = false;

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeId src = 0;
  Relation rel = Relation::unk;
  NodeId dst = 0;

  auto operator<=>(const Edge&) const = default;
};

/// The triple stored for the opposite direction (mirror or rev pair).
constexpr Edge partner(const Edge& e) { return {e.dst, inverse(e.rel), e.src}; }

std::string to_string(const Edge& e);

class TlgError : public Error {
 public:
  using Error::Error;
};

struct Violation {
  enum class Kind {
    duplicate_id,
    dangling_endpoint,
    self_loop,
    missing_mirror,
    missing_rev_pair,
    missing_impl_pair,
    dangling_neg_of,
    part_order,
  };
  Kind kind;
  std::string detail;
};

std::string_view to_string(Violation::Kind k);

class Tlg {
 public:
  Tlg() = default;

  /// Builds a graph from explicit nodes and triples without enforcing any
  /// invariant. Use validate() on the result.
  static Tlg unchecked(std::vector<Node> nodes, std::vector<Edge> edges,
                       std::vector<Edge> inferred_edges = {});

  /// Appends a node at the end of its part; the id is one past the largest
  /// id in use.
  NodeId add_node(std::string text, Part part,
                  std::optional<NodeId> neg_of = std::nullopt,
                  bool inferred = false);

  /// Inserts (src, rel, dst) together with its mirror or rev/impl partner.
  /// Returns true when at least one triple was new.
  /// Throws TlgError on unknown ids or self-loops.
  bool add_edge(NodeId src, Relation rel, NodeId dst, bool inferred = false);

  /// Removes a triple and its partner.
  void remove_edge_pair(const Edge& e);

  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] const std::set<Edge>& edges() const { return edges_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] bool empty() const { return nodes_.empty(); }

  [[nodiscard]] bool contains(NodeId id) const;
  [[nodiscard]] const Node& node(NodeId id) const;
  [[nodiscard]] std::size_t index_of(NodeId id) const;
  [[nodiscard]] std::size_t context_size() const;
  [[nodiscard]] NodeId next_id() const;

  [[nodiscard]] bool has_edge(const Edge& e) const { return edges_.count(e) != 0; }
  [[nodiscard]] bool has_edge(NodeId s, Relation r, NodeId d) const {
    return has_edge(Edge{s, r, d});
  }
  /// Any relation at all, in either direction.
  [[nodiscard]] bool connected(NodeId a, NodeId b) const;
  [[nodiscard]] bool is_inferred(const Edge& e) const {
    return inferred_.count(e) != 0;
  }
  [[nodiscard]] const std::set<Edge>& inferred_edges() const { return inferred_; }

  /// Targets of outgoing edges (src, rel, *), ascending.
  [[nodiscard]] std::vector<NodeId> successors(NodeId src, Relation rel) const;
  /// Sources j of edges (j, rel, dst).
  [[nodiscard]] std::vector<NodeId> predecessors(NodeId dst, Relation rel) const;
  /// Neighbors over neg edges: the node's negation twins.
  [[nodiscard]] std::vector<NodeId> negations(NodeId id) const {
    return successors(id, Relation::neg);
  }

  bool operator==(const Tlg& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && inferred_ == o.inferred_;
  }

 private:
  void reindex();

  std::vector<Node> nodes_;
  std::set<Edge> edges_;
  std::set<Edge> inferred_;
  std::map<NodeId, std::size_t> index_;
};

/// Empty iff every graph invariant holds.
std::vector<Violation> validate(const Tlg& g);

/// True iff the graph ignoring edge direction and type is connected.
/// The empty graph counts as connected.
bool weakly_connected(const Tlg& g);

// Serialization (JSON document, see README for the schema).
std::string serialize(const Tlg& g);
Tlg deserialize(std::string_view text);
Tlg load_tlg(const std::string& path);
void save_tlg(const Tlg& g, const std::string& path);

/// Graphviz rendering: rev edges and mirror directions are suppressed,
/// inferred elements are dashed.
std::string to_dot(const Tlg& g, std::string_view name = "tlg");

}  // namespace adalogn
