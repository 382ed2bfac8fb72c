#include "adalogn/tlg.hpp"

#include <algorithm>
#include <climits>
#include <queue>
#include <sstream>

namespace adalogn {

namespace {

constexpr std::array<std::string_view, 6> kRelationNames = {
    "conj", "disj", "impl", "neg", "rev", "unk"};

}  // namespace

std::string_view to_string(Relation r) {
  return kRelationNames[static_cast<std::size_t>(r)];
}

Relation relation_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRelationNames.size(); ++i) {
    if (kRelationNames[i] == s) return static_cast<Relation>(i);
  }
  throw TlgError("unknown relation type '" + std::string(s) + "'");
}

std::string_view to_string(Part p) {
  return p == Part::context ? "context" : "option";
}

Part part_from_string(std::string_view s) {
  if (s == "context") return Part::context;
  if (s == "option") return Part::option;
  throw TlgError("unknown node part '" + std::string(s) + "'");
}

std::string to_string(const Edge& e) {
  std::ostringstream os;
  os << '(' << e.src << ',' << to_string(e.rel) << ',' << e.dst << ')';
  return os.str();
}

std::string_view to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::duplicate_id: return "duplicate id";
    case Violation::Kind::dangling_endpoint: return "dangling endpoint";
    case Violation::Kind::self_loop: return "self-loop";
    case Violation::Kind::missing_mirror: return "missing mirror";
    case Violation::Kind::missing_rev_pair: return "missing rev pair";
    case Violation::Kind::missing_impl_pair: return "missing impl pair";
    case Violation::Kind::dangling_neg_of: return "dangling neg_of";
    case Violation::Kind::part_order: return "part order";
  }
  return "?";
}

Tlg Tlg::unchecked(std::vector<Node> nodes, std::vector<Edge> edges,
                   std::vector<Edge> inferred_edges) {
  Tlg g;
  g.nodes_ = std::move(nodes);
  g.edges_.insert(edges.begin(), edges.end());
  g.inferred_.insert(inferred_edges.begin(), inferred_edges.end());
  g.reindex();
  return g;
}

void Tlg::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    index_.emplace(nodes_[i].id, i);
  }
}

NodeId Tlg::next_id() const {
  return index_.empty() ? 0 : index_.rbegin()->first + 1;
}

NodeId Tlg::add_node(std::string text, Part part, std::optional<NodeId> neg_of,
                     bool inferred) {
  Node n{next_id(), std::move(text), part, neg_of, inferred};
  const NodeId id = n.id;
  if (part == Part::context) {
    nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(context_size()),
                  std::move(n));
  } else {
    nodes_.push_back(std::move(n));
  }
  reindex();
  return id;
}

bool Tlg::add_edge(NodeId src, Relation rel, NodeId dst, bool inferred) {
  if (!contains(src) || !contains(dst)) {
    throw TlgError("add_edge: unknown node id in " +
                   to_string(Edge{src, rel, dst}));
  }
  if (src == dst) {
    throw TlgError("add_edge: self-loop rejected " +
                   to_string(Edge{src, rel, dst}));
  }
  const Edge e{src, rel, dst};
  bool added = edges_.insert(e).second;
  added = edges_.insert(partner(e)).second || added;
  if (inferred && added) {
    inferred_.insert(e);
    inferred_.insert(partner(e));
  }
  return added;
}

void Tlg::remove_edge_pair(const Edge& e) {
  edges_.erase(e);
  edges_.erase(partner(e));
  inferred_.erase(e);
  inferred_.erase(partner(e));
}

bool Tlg::contains(NodeId id) const { return index_.count(id) != 0; }

const Node& Tlg::node(NodeId id) const { return nodes_[index_of(id)]; }

std::size_t Tlg::index_of(NodeId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw TlgError("unknown node id " + std::to_string(id));
  }
  return it->second;
}

std::size_t Tlg::context_size() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const Node& n) { return n.part == Part::context; }));
}

bool Tlg::connected(NodeId a, NodeId b) const {
  for (Relation r : kAllRelations) {
    if (has_edge(a, r, b) || has_edge(b, r, a)) return true;
  }
  return false;
}

std::vector<NodeId> Tlg::successors(NodeId src, Relation rel) const {
  std::vector<NodeId> out;
  for (auto it = edges_.lower_bound(Edge{src, rel, INT_MIN});
       it != edges_.end() && it->src == src && it->rel == rel; ++it) {
    out.push_back(it->dst);
  }
  return out;
}

std::vector<NodeId> Tlg::predecessors(NodeId dst, Relation rel) const {
  // (j, rel, dst) exists iff (dst, inverse(rel), j) does in a valid graph,
  // but this must also answer correctly on graphs under validation.
  std::vector<NodeId> out;
  for (const Edge& e : edges_) {
    if (e.dst == dst && e.rel == rel) out.push_back(e.src);
  }
  return out;
}

std::vector<Violation> validate(const Tlg& g) {
  using K = Violation::Kind;
  std::vector<Violation> out;

  std::set<NodeId> seen;
  bool in_option = false;
  for (const Node& n : g.nodes()) {
    if (!seen.insert(n.id).second) {
      out.push_back({K::duplicate_id, "node id " + std::to_string(n.id)});
    }
    if (n.part == Part::option) {
      in_option = true;
    } else if (in_option) {
      out.push_back({K::part_order, "context node " + std::to_string(n.id) +
                                        " follows an option node"});
    }
  }

  for (const Edge& e : g.edges()) {
    if (!seen.count(e.src) || !seen.count(e.dst)) {
      out.push_back({K::dangling_endpoint, to_string(e)});
      continue;
    }
    if (e.src == e.dst) {
      out.push_back({K::self_loop, to_string(e)});
      continue;
    }
    if (g.has_edge(partner(e))) continue;
    if (is_symmetric(e.rel)) {
      out.push_back({K::missing_mirror, to_string(e)});
    } else if (e.rel == Relation::impl) {
      out.push_back({K::missing_rev_pair, to_string(e)});
    } else {
      out.push_back({K::missing_impl_pair, to_string(e)});
    }
  }

  for (const Node& n : g.nodes()) {
    if (!n.neg_of) continue;
    const NodeId j = *n.neg_of;
    if (!seen.count(j) || !g.has_edge(n.id, Relation::neg, j) ||
        !g.has_edge(j, Relation::neg, n.id)) {
      out.push_back({K::dangling_neg_of, "node " + std::to_string(n.id) +
                                             " neg_of=" + std::to_string(j)});
    }
  }
  return out;
}

bool weakly_connected(const Tlg& g) {
  if (g.empty()) return true;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Edge& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::set<NodeId> seen{g.nodes().front().id};
  std::queue<NodeId> q;
  q.push(g.nodes().front().id);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : adj[u]) {
      if (seen.insert(v).second) q.push(v);
    }
  }
  return seen.size() == g.size();
}

}  // namespace adalogn
