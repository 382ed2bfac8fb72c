#include "adalogn/synth.hpp"

#include <algorithm>
#include <set>

#include "adalogn/embedding.hpp"
#include "adalogn/random.hpp"

namespace adalogn {

std::string_view to_string(OptionForm f) {
  return f == OptionForm::positive ? "positive" : "contrapositive";
}

OptionForm option_form_from_string(std::string_view s) {
  if (s == "positive") return OptionForm::positive;
  if (s == "contrapositive") return OptionForm::contrapositive;
  throw SynthError("unknown option form '" + std::string(s) + "'");
}

void validate(const GeneratorSpec& s) {
  if (s.chains < 1) throw SynthError("at least one chain is required");
  if (s.chain_len < 1) throw SynthError("chain_len must be positive");
  if (s.needs_rules.count(RuleId::hs) && s.chain_len < 2) {
    throw SynthError("hs needs chain_len >= 2");
  }
  if (s.needs_rules.empty() || s.needs_rules.count(RuleId::at)) {
    throw SynthError("needs_rules must be a non-empty subset of {hs, tr}");
  }
  if (s.chains * (s.chain_len + 1) > s.vars) {
    throw SynthError("vars cannot hold " + std::to_string(s.chains) + " chains of length " +
                     std::to_string(s.chain_len));
  }
  if (s.vars > kMaxOracleVariables) {
    throw SynthError("vars exceeds the oracle budget of " + std::to_string(kMaxOracleVariables));
  }
  if (s.neg_pairs > s.vars) throw SynthError("neg_pairs exceeds vars");
  if (s.options < 2) throw SynthError("at least two options are required");
  if (s.max_retries < 1) throw SynthError("max_retries must be positive");
}

namespace {

// An implication between symbol literals: (sym, negated) -> (sym, negated).
struct SymLit {
  std::size_t sym;
  bool negated;

  auto operator<=>(const SymLit&) const = default;
  [[nodiscard]] SymLit complement() const { return {sym, !negated}; }
};

using Implication = std::pair<SymLit, SymLit>;

std::string symbol_name(std::size_t s) { return "P" + std::to_string(s); }

std::string literal_text(const SymLit& l) {
  return (l.negated ? "not " : "") + symbol_name(l.sym);
}

Tlg option_graph(const Implication& imp) {
  Tlg g;
  const NodeId a = g.add_node(literal_text(imp.first), Part::option);
  const NodeId b = g.add_node(literal_text(imp.second), Part::option);
  g.add_edge(a, Relation::impl, b);
  return g;
}

std::string option_text(const Implication& imp) {
  return "if " + literal_text(imp.first) + " then " + literal_text(imp.second);
}

struct Drawn {
  Tlg context;
  std::map<std::size_t, NodeId> node_of;  // symbol -> positive context node
  std::vector<std::vector<std::size_t>> chains;
};

Drawn draw_context(const GeneratorSpec& spec, Rng& rng) {
  Drawn out;
  std::vector<std::size_t> syms(spec.vars);
  for (std::size_t i = 0; i < syms.size(); ++i) syms[i] = i;
  rng.shuffle(syms);
  for (std::size_t c = 0; c < spec.chains; ++c) {
    const auto first = syms.begin() + static_cast<std::ptrdiff_t>(c * (spec.chain_len + 1));
    out.chains.emplace_back(first, first + static_cast<std::ptrdiff_t>(spec.chain_len + 1));
  }

  // Text order: every symbol once plus the negated copies, shuffled.
  std::vector<SymLit> texts;
  for (std::size_t s = 0; s < spec.vars; ++s) texts.push_back({s, false});
  std::vector<std::size_t> negs(spec.vars);
  for (std::size_t i = 0; i < negs.size(); ++i) negs[i] = i;
  rng.shuffle(negs);
  for (std::size_t k = 0; k < spec.neg_pairs; ++k) texts.push_back({negs[k], true});
  rng.shuffle(texts);

  std::map<SymLit, NodeId> id_of;
  for (const SymLit& t : texts) id_of[t] = out.context.add_node(literal_text(t), Part::context);
  for (const auto& [lit, id] : id_of) {
    if (!lit.negated) out.node_of[lit.sym] = id;
  }
  for (const auto& [lit, id] : id_of) {
    if (lit.negated) out.context.add_edge(out.node_of.at(lit.sym), Relation::neg, id);
  }
  for (const auto& chain : out.chains) {
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      out.context.add_edge(out.node_of.at(chain[k]), Relation::impl,
                           out.node_of.at(chain[k + 1]));
    }
  }
  const auto& nodes = out.context.nodes();
  for (std::size_t k = 0; k < spec.distractors; ++k) {
    const NodeId u = nodes[rng.index(nodes.size())].id;
    const NodeId v = nodes[rng.index(nodes.size())].id;
    const Relation r = rng.index(2) == 0 ? Relation::conj : Relation::unk;
    if (u == v || out.context.connected(u, v)) continue;
    out.context.add_edge(u, r, v);
  }
  return out;
}

Literal to_literal(const Drawn& d, const std::map<NodeId, Literal>& lits, const SymLit& s) {
  const Literal l = lits.at(d.node_of.at(s.sym));
  return s.negated ? l.complement() : l;
}

std::optional<TaskInstance> draw_instance(const GeneratorSpec& spec, Rng& rng, int gold_pos) {
  const Drawn d = draw_context(spec, rng);
  const auto lits = literal_map(d.context);
  const LiteralPairs reach = reachability_oracle(d.context);
  const auto entailed = [&](const Implication& imp) {
    return entailment_oracle(d.context, to_literal(d, lits, imp.first),
                             to_literal(d, lits, imp.second));
  };

  const bool hs = spec.needs_rules.count(RuleId::hs) != 0;
  const bool tr = spec.needs_rules.count(RuleId::tr) != 0;
  const auto& chain = d.chains[rng.index(d.chains.size())];
  Implication gold;
  if (hs) {
    gold = {{chain.front(), false}, {chain.back(), false}};
  } else {
    const std::size_t k = rng.index(chain.size() - 1);
    gold = {{chain[k], false}, {chain[k + 1], false}};
  }
  if (tr) gold = {gold.second.complement(), gold.first.complement()};
  if (!entailed(gold)) return std::nullopt;

  // Distractors are drawn in the gold's literal polarity, preferring pairs
  // that look like the gold locally (chain source to chain sink).
  std::set<std::size_t> sources, sinks;
  for (const auto& c : d.chains) {
    sources.insert(c.front());
    sinks.insert(c.back());
  }
  std::vector<Implication> hard, soft;
  for (std::size_t a = 0; a < spec.vars; ++a) {
    for (std::size_t b = 0; b < spec.vars; ++b) {
      if (a == b) continue;
      Implication imp{{a, false}, {b, false}};
      if (tr) imp = {imp.second.complement(), imp.first.complement()};
      if (imp == gold) continue;
      const Literal x = to_literal(d, lits, imp.first);
      const Literal y = to_literal(d, lits, imp.second);
      if (reach.count({x, y})) continue;
      (sources.count(a) && sinks.count(b) ? hard : soft).push_back(imp);
    }
  }
  rng.shuffle(hard);
  rng.shuffle(soft);
  std::vector<Implication> wrong;
  for (const auto* pool : {&hard, &soft}) {
    for (const Implication& imp : *pool) {
      if (wrong.size() + 1 == spec.options) break;
      if (!entailed(imp)) wrong.push_back(imp);
    }
  }
  if (wrong.size() + 1 != spec.options) return std::nullopt;

  // The rendered form never changes the proposition; contrapositive phrasing
  // only applies when the gold does not already need transposition.
  const auto render = [&](const Implication& imp) -> Implication {
    if (tr || spec.option_form == OptionForm::positive) return imp;
    return {imp.second.complement(), imp.first.complement()};
  };
  TaskInstance inst;
  inst.context = d.context;
  inst.question = std::string(kDefaultQuestion);
  inst.gold = gold_pos;
  std::size_t next_wrong = 0;
  for (std::size_t o = 0; o < spec.options; ++o) {
    const Implication imp = static_cast<int>(o) == gold_pos ? gold : wrong[next_wrong++];
    inst.options.push_back(option_graph(render(imp)));
    inst.option_texts.push_back(option_text(render(imp)));
  }
  return inst;
}

}  // namespace

std::vector<TaskInstance> generate(std::size_t n, const GeneratorSpec& spec) {
  validate(spec);
  std::vector<int> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<int>(i % spec.options);
  Rng label_rng(mix_seed(spec.seed ^ 0x676f6c64ULL));
  label_rng.shuffle(positions);

  std::vector<TaskInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(mix_seed(spec.seed) + i));
    std::optional<TaskInstance> inst;
    for (std::size_t attempt = 0; attempt < spec.max_retries && !inst; ++attempt) {
      inst = draw_instance(spec, rng, positions[i]);
    }
    if (!inst) {
      throw SynthError("could not build instance " + std::to_string(i) + " after " +
                       std::to_string(spec.max_retries) + " attempts");
    }
    inst->id = "synth-" + std::to_string(spec.seed) + "-" + std::to_string(i);
    out.push_back(std::move(*inst));
  }
  return out;
}

std::optional<Literal> context_literal(const Tlg& context, std::string_view text) {
  const SymbolKey key = symbol_key(text);
  const auto lits = literal_map(context);
  for (const Node& n : context.nodes()) {
    const SymbolKey nk = symbol_key(n.text);
    if (nk.symbol != key.symbol) continue;
    const Literal l = lits.at(n.id);
    return nk.negated == key.negated ? l : l.complement();
  }
  return std::nullopt;
}

bool option_entailed(const Tlg& context, const Tlg& option) {
  bool any = false;
  for (const Edge& e : option.edges()) {
    if (e.rel != Relation::impl) continue;
    const auto from = context_literal(context, option.node(e.src).text);
    const auto to = context_literal(context, option.node(e.dst).text);
    if (!from || !to || !entailment_oracle(context, *from, *to)) return false;
    any = true;
  }
  return any;
}

AuditReport audit(const std::vector<TaskInstance>& data) {
  AuditReport report;
  report.instances = data.size();
  for (const TaskInstance& inst : data) {
    const auto flag = [&](int option, std::string msg) {
      report.violations.push_back({inst.id, option, std::move(msg)});
    };
    if (inst.gold < 0 || static_cast<std::size_t>(inst.gold) >= inst.options.size()) {
      flag(-1, "gold index out of range");
      continue;
    }
    if (!validate(inst.context).empty()) flag(-1, "context graph is invalid");
    std::size_t entailed = 0;
    for (std::size_t o = 0; o < inst.options.size(); ++o) {
      const int oi = static_cast<int>(o);
      if (!validate(inst.options[o]).empty()) {
        flag(oi, "option graph is invalid");
        continue;
      }
      bool yes = false;
      try {
        yes = option_entailed(inst.context, inst.options[o]);
      } catch (const OracleError& e) {
        flag(oi, e.what());
        continue;
      }
      entailed += yes ? 1 : 0;
      if (oi == inst.gold && !yes) flag(oi, "gold option is not entailed");
      if (oi != inst.gold && yes) flag(oi, "distractor is entailed");
    }
    if (entailed != 1) flag(-1, std::to_string(entailed) + " options are entailed");
  }
  return report;
}

std::vector<std::string> collect_vocab(const std::vector<TaskInstance>& data) {
  std::set<std::string> syms;
  const auto add = [&](const Tlg& g) {
    for (const Node& n : g.nodes()) syms.insert(symbol_key(n.text).symbol);
  };
  for (const TaskInstance& inst : data) {
    add(inst.context);
    for (const Tlg& o : inst.options) add(o);
  }
  return {syms.begin(), syms.end()};
}

}  // namespace adalogn
