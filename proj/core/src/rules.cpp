#include "adalogn/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

namespace adalogn {

std::string_view to_string(RuleId r) {
  switch (r) {
    case RuleId::hs: return "hs";
    case RuleId::tr: return "tr";
    case RuleId::at: return "at";
  }
  return "?";
}

RuleId rule_from_string(std::string_view s) {
  std::string l(s);
  for (char& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "hs") return RuleId::hs;
  if (l == "tr") return RuleId::tr;
  if (l == "at") return RuleId::at;
  throw RuleError("unknown inference rule '" + std::string(s) + "'");
}

RuleSet parse_rules(std::string_view csv) {
  RuleSet out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto item = csv.substr(start, comma == std::string_view::npos ? csv.npos
                                                                       : comma - start);
    if (!item.empty()) out.insert(rule_from_string(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string to_string(const RuleSet& rules) {
  std::string out;
  for (RuleId r : rules) {
    if (!out.empty()) out += ',';
    out += to_string(r);
  }
  return out;
}

std::optional<NodeId> negation_twin(const Tlg& g, NodeId id) {
  std::optional<NodeId> best;
  for (NodeId t : g.negations(id)) {
    if (!best || g.index_of(t) < g.index_of(*best)) best = t;
  }
  return best;
}

namespace {

void add_pair(std::vector<Edge>& out, NodeId s, Relation r, NodeId d) {
  out.push_back({s, r, d});
  out.push_back(partner(Edge{s, r, d}));
}

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void enumerate_hs(const Tlg& g, std::vector<ExtensionCandidate>& out) {
  for (const Edge& first : g.edges()) {
    if (first.rel != Relation::impl) continue;
    for (NodeId k : g.successors(first.dst, Relation::impl)) {
      const NodeId i = first.src;
      const NodeId j = first.dst;
      if (i == k || g.has_edge(i, Relation::impl, k)) continue;
      ExtensionCandidate c;
      c.rule = RuleId::hs;
      c.premise_nodes = sorted_unique({i, j, k});
      c.premise_edges = {first, {j, Relation::impl, k}};
      add_pair(c.new_edges, i, Relation::impl, k);
      out.push_back(std::move(c));
    }
  }
}

void enumerate_tr(const Tlg& g, std::vector<ExtensionCandidate>& out) {
  for (const Edge& e : g.edges()) {
    if (e.rel != Relation::impl) continue;
    ExtensionCandidate c;
    c.rule = RuleId::tr;
    c.premise_edges = {e};
    std::vector<NodeId> premises = {e.src, e.dst};
    NodeId placeholder = g.next_id();
    const auto twin_of = [&](NodeId u) {
      if (const auto t = negation_twin(g, u)) {
        premises.push_back(*t);
        return *t;
      }
      const Node& n = g.node(u);
      const NodeId p = placeholder++;
      c.new_nodes.push_back({p, u, std::string(kNegationTextPrefix) + n.text, n.part});
      add_pair(c.new_edges, u, Relation::neg, p);
      return p;
    };
    const NodeId not_i = twin_of(e.src);
    const NodeId not_j = twin_of(e.dst);
    if (not_i == not_j || g.has_edge(not_j, Relation::impl, not_i)) continue;
    add_pair(c.new_edges, not_j, Relation::impl, not_i);
    c.premise_nodes = sorted_unique(std::move(premises));
    out.push_back(std::move(c));
  }
}

void enumerate_at(const Tlg& g, std::vector<ExtensionCandidate>& out) {
  for (const Edge& e : g.edges()) {
    if (e.rel != Relation::conj && e.rel != Relation::disj && e.rel != Relation::impl) {
      continue;
    }
    const NodeId i = e.src;
    const NodeId j = e.dst;
    for (NodeId k : g.successors(i, Relation::unk)) {
      if (k == j || g.has_edge(k, e.rel, j)) continue;
      ExtensionCandidate c;
      c.rule = RuleId::at;
      c.premise_nodes = sorted_unique({i, j, k});
      c.premise_edges = {e, {i, Relation::unk, k}};
      add_pair(c.new_edges, k, e.rel, j);
      out.push_back(std::move(c));
    }
  }
}

}  // namespace

std::vector<ExtensionCandidate> enumerate_candidates(const Tlg& g, const RuleSet& rules) {
  std::vector<ExtensionCandidate> out;
  if (rules.count(RuleId::hs)) enumerate_hs(g, out);
  if (rules.count(RuleId::tr)) enumerate_tr(g, out);
  if (rules.count(RuleId::at)) enumerate_at(g, out);
  std::stable_sort(out.begin(), out.end(),
                   [](const ExtensionCandidate& a, const ExtensionCandidate& b) {
                     return std::tie(a.rule, a.premise_nodes, a.new_edges) <
                            std::tie(b.rule, b.premise_nodes, b.new_edges);
                   });
  return out;
}

void apply_candidate_in_place(Tlg& g, const ExtensionCandidate& c) {
  for (const Edge& e : c.premise_edges) {
    if (!g.has_edge(e)) {
      throw RuleError("stale candidate: premise edge " + to_string(e) + " is missing");
    }
  }
  std::map<NodeId, NodeId> placeholder;
  for (const auto& nn : c.new_nodes) {
    if (const auto t = negation_twin(g, nn.negates)) {
      placeholder[nn.placeholder] = *t;
    } else {
      placeholder[nn.placeholder] = g.add_node(nn.text, nn.part, nn.negates, true);
    }
  }
  const auto resolve = [&](NodeId x) {
    const auto it = placeholder.find(x);
    return it == placeholder.end() ? x : it->second;
  };
  for (const Edge& e : c.new_edges) {
    const NodeId s = resolve(e.src);
    const NodeId d = resolve(e.dst);
    if (s == d) continue;
    g.add_edge(s, e.rel, d, true);
  }
}

Tlg apply_candidate(const Tlg& g, const ExtensionCandidate& c) {
  Tlg out = g;
  apply_candidate_in_place(out, c);
  return out;
}

Tlg closure(const Tlg& g, const RuleSet& rules, std::size_t max_nodes) {
  Tlg cur = g;
  for (;;) {
    const auto candidates = enumerate_candidates(cur, rules);
    if (candidates.empty()) return cur;
    for (const auto& c : candidates) {
      apply_candidate_in_place(cur, c);
      if (cur.size() > max_nodes) {
        throw RuleError("closure: node budget of " + std::to_string(max_nodes) +
                        " exceeded");
      }
    }
  }
}

}  // namespace adalogn
