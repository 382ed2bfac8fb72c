#include "adalogn/trace_io.hpp"

#include "json_io.hpp"

namespace adalogn {

namespace {

using detail::ojson;

ojson edge_json(const Edge& e) {
  return ojson::array({e.src, std::string(to_string(e.rel)), e.dst});
}

ojson attention_json(const AttentionRow& r) {
  ojson j;
  j["node"] = r.node;
  j["over"] = r.over;
  j["weights"] = r.weights;
  return j;
}

ojson iteration_json(const IterationTrace& it) {
  ojson j;
  j["rel_mean"] = it.rel_mean;
  j["candidate_count"] = it.candidates.size();
  j["admitted"] = it.admitted;
  j["working_nodes"] = it.working_nodes;
  j["working_edges"] = it.working_edges;
  j["densified_pairs"] = it.densified_pairs;
  j["gated"] = it.gated;
  ojson cands = ojson::array();
  for (const auto& c : it.candidates) {
    ojson cj;
    cj["rule"] = std::string(to_string(c.rule));
    cj["premise_nodes"] = c.premise_nodes;
    ojson edges = ojson::array();
    for (const Edge& e : c.new_edges) edges.push_back(edge_json(e));
    cj["new_edges"] = edges;
    cj["rel"] = c.rel;
    cj["admitted"] = c.admitted;
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  ojson nbr = ojson::array();
  for (const auto& r : it.neighbor_attention) nbr.push_back(attention_json(r));
  j["neighbor_attention"] = nbr;
  ojson sub = ojson::array();
  for (const auto& r : it.subgraph_attention) sub.push_back(attention_json(r));
  j["subgraph_attention"] = sub;
  ojson gates = ojson::array();
  for (const auto& [node, beta] : it.gates) gates.push_back({{"node", node}, {"beta", beta}});
  j["gates"] = gates;
  return j;
}

}  // namespace

std::string trace_document(const ModelConfig& cfg, const std::vector<ForwardTrace>& traces) {
  ojson doc;
  doc["variant"] = std::string(to_string(cfg.variant));
  doc["tau"] = cfg.tau;
  ojson options = ojson::array();
  for (const ForwardTrace& t : traces) {
    ojson o;
    o["score"] = t.score;
    o["h_v"] = t.h_v;
    o["h_g"] = t.h_g;
    o["pool_attention"] = attention_json(t.pool_attention);
    ojson its = ojson::array();
    for (const auto& it : t.iterations) its.push_back(iteration_json(it));
    o["iterations"] = its;
    options.push_back(o);
  }
  doc["options"] = options;
  return doc.dump(2) + "\n";
}

}  // namespace adalogn
