#include "adalogn/model.hpp"

#include <algorithm>
#include <set>

#include "adalogn/ops.hpp"

namespace adalogn {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::no_ext: return "no-ext";
    case Variant::full_ext: return "full-ext";
    case Variant::no_at: return "no-at";
    case Variant::n2n: return "n2n";
    case Variant::n2n_plus: return "n2n+";
  }
  return "?";
}

Variant variant_from_string(std::string_view s) {
  for (Variant v : {Variant::standard, Variant::no_ext, Variant::full_ext, Variant::no_at,
                    Variant::n2n, Variant::n2n_plus}) {
    if (s == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

void validate(const ModelConfig& c) {
  if (c.d < 2 || c.d % 2 != 0) throw ConfigError("d must be even and at least 2");
  if (c.iterations < 1) throw ConfigError("iterations (L) must be at least 1");
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (c.heads < 1 || c.d % c.heads != 0) throw ConfigError("heads must divide d");
  if (c.variant == Variant::no_at && c.rules.count(RuleId::at)) {
    throw ConfigError("variant no-at must not enable the at rule");
  }
  if (c.embedding == EmbeddingMode::table && c.vocab.empty()) {
    throw ConfigError("table embeddings need a vocabulary");
  }
  if (c.closure_max_nodes < 1) throw ConfigError("closure_max_nodes must be positive");
}

namespace {

using namespace ops;

bool is_gated(Variant v) { return v != Variant::n2n && v != Variant::n2n_plus; }

const Tensor& rep(const NodeReps& h, NodeId id) {
  const auto it = h.find(id);
  if (it == h.end()) throw Error("node " + std::to_string(id) + " has no representation");
  return it->second;
}

Tensor sum_all(const std::vector<Tensor>& terms) {
  Tensor acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

std::string gru_name(const char* dir, const char* w) {
  return std::string("gru.") + dir + "." + w;
}

GruWeights gru_weights(const ParameterStore& p, const char* dir) {
  const auto g = [&](const char* w) { return p.at(gru_name(dir, w)); };
  return {g("W_xr"), g("W_xz"), g("W_xn"), g("W_hr"), g("W_hz"), g("W_hn"),
          g("b_xr"), g("b_xz"), g("b_xn"), g("b_hr"), g("b_hz"), g("b_hn")};
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

// Attention of one query over `keys`: per-head weights [H, n] from
// LeakyReLU(q + k_j), then the per-head weighted sum of the value rows.
struct Attended {
  Tensor weights;       // [H, n]
  std::vector<Tensor> per_head;  // H vectors of length n
};

Attended attend(const Tensor& q, const std::vector<Tensor>& keys) {
  std::vector<Tensor> logits;
  logits.reserve(keys.size());
  for (const Tensor& k : keys) logits.push_back(leaky_relu(add(q, k)));
  Attended a;
  a.weights = softmax(transpose(stack(logits)));
  for (std::size_t k = 0; k < a.weights.dim(0); ++k) a.per_head.push_back(row(a.weights, k));
  return a;
}

// sum_j w_k[j] * chunk_k(v_j) for every head k, concatenated.
Tensor head_sum(const std::vector<Tensor>& w, const std::vector<Tensor>& rows, std::size_t d) {
  if (w.size() == 1) return weighted_sum(w.front(), rows);
  const std::size_t dh = d / w.size();
  std::vector<Tensor> parts;
  for (std::size_t k = 0; k < w.size(); ++k) {
    std::vector<Tensor> chunks;
    chunks.reserve(rows.size());
    for (const Tensor& r : rows) chunks.push_back(slice(r, k * dh, dh));
    parts.push_back(weighted_sum(w[k], chunks));
  }
  return concat(parts);
}

AttentionRow attention_row(NodeId node, std::vector<NodeId> over, const Tensor& weights) {
  AttentionRow row{node, std::move(over), {}};
  const std::size_t n = weights.dim(1);
  for (std::size_t k = 0; k < weights.dim(0); ++k) {
    row.weights.emplace_back(weights.data().begin() + static_cast<std::ptrdiff_t>(k * n),
                             weights.data().begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return row;
}

}  // namespace

Model::Model(ModelConfig cfg)
    : cfg_(std::move(cfg)), embed_(cfg_.embedding, cfg_.d, cfg_.seed, cfg_.vocab) {
  validate(cfg_);
  Rng rng(mix_seed(cfg_.seed));
  register_params(rng);
}

Model::Model(ModelConfig cfg, ParameterStore params) : Model(std::move(cfg)) {
  params_.assign(params);
}

std::string Model::attention_prefix(std::size_t l) const {
  return cfg_.share_attention ? std::string("att") : "mp" + std::to_string(l);
}

void Model::register_params(Rng& rng) {
  const std::size_t d = cfg_.d;
  const std::size_t L = cfg_.iterations;
  const std::size_t H = cfg_.heads;
  const std::size_t hd = d / 2;
  auto& p = params_;

  embed_.register_params(p, rng);
  p.add("relevance.W", {1, 2 * d}, Init::fan_in_uniform, rng);
  p.add("relevance.b", {1}, Init::zeros, rng);

  const auto attention = [&](const std::string& prefix) {
    for (const char* kind : {"nbr", "sub"}) {
      p.add(prefix + "." + kind + ".Wq", {H, d}, Init::fan_in_uniform, rng);
      p.add(prefix + "." + kind + ".Wk", {H, d}, Init::fan_in_uniform, rng);
      p.add(prefix + "." + kind + ".b", {H}, Init::zeros, rng);
    }
  };
  if (cfg_.share_attention) attention("att");
  for (std::size_t l = 1; l <= L; ++l) {
    const std::string mp = "mp" + std::to_string(l);
    for (Relation r : kAllRelations) {
      p.add(mp + ".W_" + std::string(to_string(r)), {d, d}, Init::fan_in_uniform, rng);
    }
    p.add(mp + ".W_self", {d, d}, Init::fan_in_uniform, rng);
    p.add(mp + ".W_sub", {d, d}, Init::fan_in_uniform, rng);
    p.add(mp + ".gate.W", {1, 2 * d}, Init::fan_in_uniform, rng);
    p.add(mp + ".gate.b", {1}, Init::zeros, rng);
    if (!cfg_.share_attention) attention(mp);
  }

  p.add("fusion.W", {d, L * d}, Init::fan_in_uniform, rng);
  p.add("fusion.b", {d}, Init::zeros, rng);
  for (const char* dir : {"fwd", "bwd"}) {
    for (const char* w : {"W_xr", "W_xz", "W_xn"}) p.add(gru_name(dir, w), {hd, d}, Init::fan_in_uniform, rng);
    for (const char* w : {"W_hr", "W_hz", "W_hn"}) p.add(gru_name(dir, w), {hd, hd}, Init::fan_in_uniform, rng);
    for (const char* b : {"b_xr", "b_xz", "b_xn", "b_hr", "b_hz", "b_hn"}) {
      p.add(gru_name(dir, b), {hd}, Init::zeros, rng);
    }
  }
  p.add("pool.W", {1, 2 * d}, Init::fan_in_uniform, rng);
  p.add("pool.b", {1}, Init::zeros, rng);
  p.add("scorer.hidden.W", {d, 4 * d + L}, Init::fan_in_uniform, rng);
  p.add("scorer.hidden.b", {d}, Init::zeros, rng);
  p.add("scorer.out.W", {1, d}, Init::fan_in_uniform, rng);
  p.add("scorer.out.b", {1}, Init::zeros, rng);
}

Tensor Model::score_candidate(const ExtensionCandidate& c, const NodeReps& h,
                              const Tensor& g_o) const {
  std::vector<Tensor> premise;
  premise.reserve(c.premise_nodes.size());
  for (NodeId u : c.premise_nodes) premise.push_back(rep(h, u));
  const Tensor x = concat({mean(premise), g_o});
  return sigmoid(linear(params_.at("relevance.W"), params_.at("relevance.b"), x));
}

std::vector<ExtensionCandidate> Model::candidates(const Tlg& g_raw) const {
  if (cfg_.variant == Variant::no_ext) return {};
  return enumerate_candidates(g_raw, cfg_.rules);
}

ExtensionResult Model::adaptive_extend(const Tlg& g_raw,
                                       const std::vector<ExtensionCandidate>& candidates,
                                       const NodeReps& h, const Tensor& g_o) const {
  ExtensionResult out;
  out.working = g_raw;
  if (cfg_.variant == Variant::no_ext) return out;
  for (const auto& c : candidates) out.rels.push_back(score_candidate(c, h, g_o));
  if (cfg_.variant == Variant::full_ext) {
    out.working = closure(g_raw, cfg_.rules, cfg_.closure_max_nodes);
    out.admitted.assign(candidates.size(), true);
    return out;
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const bool admit = out.rels[i].item() > cfg_.tau;
    out.admitted.push_back(admit);
    if (admit) apply_candidate_in_place(out.working, candidates[i]);
  }
  return out;
}

NodeReps Model::message_pass(const Tlg& g, const NodeReps& h, std::size_t l,
                             IterationTrace* trace) const {
  const std::size_t d = cfg_.d;
  const bool gated = is_gated(cfg_.variant);
  const std::string mp = "mp" + std::to_string(l);
  const std::string ap = attention_prefix(l);
  const Tensor& w_self = params_.at(mp + ".W_self");
  const Tensor& w_sub = params_.at(mp + ".W_sub");

  // Per-node attention projections; LeakyReLU(W[h_i || h_j] + b) is split
  // into a query half and a key half.
  std::map<NodeId, Tensor> nbr_q, nbr_k, sub_q, sub_k;
  if (gated) {
    for (const Node& n : g.nodes()) {
      const Tensor& x = rep(h, n.id);
      nbr_q[n.id] = matvec(params_.at(ap + ".nbr.Wq"), x);
      nbr_k[n.id] = linear(params_.at(ap + ".nbr.Wk"), params_.at(ap + ".nbr.b"), x);
      sub_q[n.id] = matvec(params_.at(ap + ".sub.Wq"), x);
      sub_k[n.id] = linear(params_.at(ap + ".sub.Wk"), params_.at(ap + ".sub.b"), x);
    }
  }
  if (trace) trace->gated = gated;

  NodeReps out;
  for (const Node& node : g.nodes()) {
    const NodeId i = node.id;
    const Tensor& h_i = rep(h, i);
    std::vector<Tensor> terms{matvec(w_self, h_i)};

    // N_r^i holds the sources j of incoming edges (j, r, i).
    std::map<Relation, std::vector<NodeId>> by_rel;
    std::set<NodeId> all;
    for (Relation r : kAllRelations) {
      auto srcs = g.successors(i, inverse(r));
      if (srcs.empty()) continue;
      all.insert(srcs.begin(), srcs.end());
      by_rel[r] = std::move(srcs);
    }
    if (!all.empty()) {
      const std::vector<NodeId> nbrs(all.begin(), all.end());
      std::vector<Tensor> alpha;
      if (gated) {
        std::vector<Tensor> keys;
        for (NodeId j : nbrs) keys.push_back(nbr_k.at(j));
        Attended a = attend(nbr_q.at(i), keys);
        alpha = a.per_head;
        if (trace) trace->neighbor_attention.push_back(attention_row(i, nbrs, a.weights));
      }
      for (const auto& [r, srcs] : by_rel) {
        std::vector<Tensor> rows;
        for (NodeId j : srcs) rows.push_back(rep(h, j));
        Tensor agg;
        if (gated) {
          std::vector<std::size_t> idx;
          for (NodeId j : srcs) {
            idx.push_back(static_cast<std::size_t>(
                std::lower_bound(nbrs.begin(), nbrs.end(), j) - nbrs.begin()));
          }
          const double inv = 1.0 / static_cast<double>(srcs.size());
          std::vector<Tensor> w;
          for (const Tensor& a : alpha) w.push_back(scale(take(a, idx), inv));
          agg = head_sum(w, rows, d);
        } else {
          agg = mean(rows);
        }
        terms.push_back(matvec(params_.at(mp + ".W_" + std::string(to_string(r))), agg));
      }
    }

    if (gated) {
      std::vector<NodeId> opp;
      for (const Node& n : g.nodes()) {
        if (n.part != node.part) opp.push_back(n.id);
      }
      if (opp.empty()) {
        if (trace) trace->gates[i] = 0.0;
      } else {
        std::vector<Tensor> keys, rows;
        for (NodeId j : opp) {
          keys.push_back(sub_k.at(j));
          rows.push_back(rep(h, j));
        }
        const Attended a = attend(sub_q.at(i), keys);
        const Tensor h_s = head_sum(a.per_head, rows, d);
        const Tensor beta = sigmoid(linear(params_.at(mp + ".gate.W"),
                                           params_.at(mp + ".gate.b"), concat({h_i, h_s})));
        terms.push_back(mul_scalar(matvec(w_sub, h_s), beta));
        if (trace) {
          trace->gates[i] = beta.item();
          trace->subgraph_attention.push_back(attention_row(i, opp, a.weights));
        }
      }
    }
    out[i] = relu(sum_all(terms));
  }
  return out;
}

OptionOutput Model::forward_option(const Tlg& g_raw, std::string_view question,
                                   bool record_trace) const {
  if (g_raw.empty()) throw Error("cannot score an empty graph");
  const std::size_t d = cfg_.d;
  const std::size_t L = cfg_.iterations;
  OptionOutput result;
  ForwardTrace& trace = result.trace;

  NodeReps h0;
  std::vector<Tensor> ctx, opt;
  for (const Node& n : g_raw.nodes()) {
    h0[n.id] = embed(n.text);
    (n.part == Part::context ? ctx : opt).push_back(h0[n.id]);
  }
  const Tensor g_c = ctx.empty() ? Tensor::zeros({d}) : mean(ctx);
  const Tensor g_o = opt.empty() ? Tensor::zeros({d}) : mean(opt);
  const Tensor g_q = embed(question);

  const std::vector<ExtensionCandidate> cands = candidates(g_raw);
  std::vector<NodeReps> hs{h0};
  std::vector<Tensor> rel_means;
  for (std::size_t l = 1; l <= L; ++l) {
    const NodeReps& h = hs.back();
    ExtensionResult ext = adaptive_extend(g_raw, cands, h, g_o);
    Tlg& working = ext.working;

    NodeReps reps = h;
    for (const Node& n : working.nodes()) {
      if (!reps.count(n.id)) reps[n.id] = embed(n.text);
    }
    std::size_t densified = 0;
    if (cfg_.variant == Variant::n2n_plus) {
      std::vector<NodeId> vc, vo;
      for (const Node& n : working.nodes()) (n.part == Part::context ? vc : vo).push_back(n.id);
      for (NodeId c : vc) {
        for (NodeId o : vo) working.add_edge(c, Relation::unk, o, true);
      }
      densified = vc.size() * vo.size();
    }

    IterationTrace* it = nullptr;
    if (record_trace) {
      trace.iterations.emplace_back();
      it = &trace.iterations.back();
      for (std::size_t k = 0; k < cands.size(); ++k) {
        it->candidates.push_back({cands[k].rule, cands[k].premise_nodes, cands[k].new_edges,
                                  ext.rels[k].item(), static_cast<bool>(ext.admitted[k])});
        it->admitted += ext.admitted[k] ? 1 : 0;
      }
      it->working_nodes = working.size();
      it->working_edges = working.edges().size();
      it->densified_pairs = densified;
    }

    const NodeReps next = message_pass(working, reps, l, it);
    NodeReps kept;
    for (const Node& n : g_raw.nodes()) kept[n.id] = next.at(n.id);
    hs.push_back(std::move(kept));

    rel_means.push_back(ext.rels.empty() ? Tensor::zeros({1}) : concat({mean(concat(ext.rels))}));
    if (it) it->rel_mean = rel_means.back().item();
  }

  // Residual fusion of the iteration outputs.
  std::vector<Tensor> fused;
  const Tensor& fw = params_.at("fusion.W");
  const Tensor& fb = params_.at("fusion.b");
  for (const Node& n : g_raw.nodes()) {
    std::vector<Tensor> layers;
    for (std::size_t l = 1; l <= L; ++l) layers.push_back(hs[l].at(n.id));
    fused.push_back(add(h0.at(n.id), linear(fw, fb, concat(layers))));
  }

  // Residual BiGRU over the nodes in text order.
  const GruWeights fwd = gru_weights(params_, "fwd");
  const GruWeights bwd = gru_weights(params_, "bwd");
  const std::size_t n = fused.size();
  std::vector<Tensor> f(n), b(n);
  Tensor state = Tensor::zeros({d / 2});
  for (std::size_t t = 0; t < n; ++t) state = f[t] = gru_cell(fused[t], state, fwd);
  state = Tensor::zeros({d / 2});
  for (std::size_t t = n; t-- > 0;) state = b[t] = gru_cell(fused[t], state, bwd);
  std::vector<Tensor> fnl;
  for (std::size_t t = 0; t < n; ++t) fnl.push_back(add(fused[t], concat({f[t], b[t]})));

  // Option-attended pooling.
  std::vector<Tensor> logits;
  const Tensor& pw = params_.at("pool.W");
  const Tensor& pb = params_.at("pool.b");
  for (const Tensor& x : fnl) logits.push_back(leaky_relu(linear(pw, pb, concat({g_o, x}))));
  const Tensor alpha = softmax(concat(logits));
  const Tensor h_v = weighted_sum(alpha, fnl);

  std::vector<Tensor> hg_parts{h_v};
  hg_parts.insert(hg_parts.end(), rel_means.begin(), rel_means.end());
  const Tensor h_g = concat(hg_parts);

  const Tensor hidden = tanh(linear(params_.at("scorer.hidden.W"), params_.at("scorer.hidden.b"),
                                    concat({g_c, g_q, g_o, h_g})));
  result.score = linear(params_.at("scorer.out.W"), params_.at("scorer.out.b"), hidden);

  if (record_trace) {
    std::vector<NodeId> ids;
    for (const Node& node : g_raw.nodes()) ids.push_back(node.id);
    trace.pool_attention = {-1, ids, {values(alpha)}};
    trace.h_v = values(h_v);
    trace.h_g = values(h_g);
    trace.score = result.score.item();
  }
  return result;
}

InstanceOutput Model::forward_instance(const TaskInstance& inst, bool record_trace) const {
  if (inst.options.empty()) throw Error("instance '" + inst.id + "' has no options");
  InstanceOutput out;
  std::vector<Tensor> scores;
  for (std::size_t i = 0; i < inst.options.size(); ++i) {
    OptionOutput o = forward_option(inst.option_tlg(i), inst.question, record_trace);
    scores.push_back(o.score);
    if (record_trace) out.traces.push_back(std::move(o.trace));
  }
  out.scores = concat(scores);
  return out;
}

}  // namespace adalogn
