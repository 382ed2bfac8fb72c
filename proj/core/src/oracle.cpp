#include "adalogn/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

namespace adalogn {

std::map<NodeId, Literal> literal_map(const Tlg& g) {
  std::map<NodeId, Literal> out;
  std::vector<NodeId> ids;
  for (const Node& n : g.nodes()) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  for (NodeId root : ids) {
    if (out.count(root)) continue;
    // root is the smallest id of its component since ids are visited ascending.
    out[root] = {root, false};
    std::queue<NodeId> q;
    q.push(root);
    while (!q.empty()) {
      const NodeId u = q.front();
      q.pop();
      for (NodeId v : g.negations(u)) {
        const Literal want = out[u].complement();
        const auto it = out.find(v);
        if (it == out.end()) {
          out[v] = want;
          q.push(v);
        } else if (it->second != want) {
          throw OracleError("inconsistent negation links: node " + std::to_string(v) +
                            " would negate itself");
        }
      }
    }
  }
  return out;
}

LiteralPairs reachability_oracle(const Tlg& g) {
  const auto lit = literal_map(g);
  std::map<Literal, std::set<Literal>> adj;
  for (const Edge& e : g.edges()) {
    if (e.rel != Relation::impl) continue;
    const Literal a = lit.at(e.src);
    const Literal b = lit.at(e.dst);
    adj[a].insert(b);
    adj[b.complement()].insert(a.complement());
  }
  LiteralPairs out;
  for (const auto& [start, first] : adj) {
    std::set<Literal> seen;
    std::queue<Literal> q;
    for (const Literal& n : first) {
      if (seen.insert(n).second) q.push(n);
    }
    while (!q.empty()) {
      const Literal u = q.front();
      q.pop();
      out.insert({start, u});
      const auto it = adj.find(u);
      if (it == adj.end()) continue;
      for (const Literal& n : it->second) {
        if (seen.insert(n).second) q.push(n);
      }
    }
  }
  return out;
}

bool entailment_oracle(const Tlg& g, Literal from, Literal to) {
  const auto lit = literal_map(g);
  std::vector<NodeId> vars;
  for (const auto& [id, l] : lit) vars.push_back(l.var);
  vars.push_back(from.var);
  vars.push_back(to.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > kMaxOracleVariables) {
    throw OracleError("entailment oracle: " + std::to_string(vars.size()) +
                      " variables exceed the budget of " +
                      std::to_string(kMaxOracleVariables));
  }
  const auto bit = [&vars](NodeId var) {
    return static_cast<std::size_t>(
        std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
  };
  const auto value = [&](const Literal& l, std::uint32_t assignment) {
    const bool v = (assignment >> bit(l.var)) & 1U;
    return l.negated ? !v : v;
  };
  std::vector<std::pair<Literal, Literal>> theory;
  for (const Edge& e : g.edges()) {
    if (e.rel == Relation::impl) theory.emplace_back(lit.at(e.src), lit.at(e.dst));
  }
  const std::uint32_t count = 1U << vars.size();
  for (std::uint32_t a = 0; a < count; ++a) {
    const bool model = std::all_of(theory.begin(), theory.end(), [&](const auto& t) {
      return !value(t.first, a) || value(t.second, a);
    });
    if (model && value(from, a) && !value(to, a)) return false;
  }
  return true;
}

bool entailment_oracle(const Tlg& g, NodeId from, NodeId to) {
  const auto lit = literal_map(g);
  return entailment_oracle(g, lit.at(from), lit.at(to));
}

}  // namespace adalogn
