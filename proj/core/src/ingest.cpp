#include "adalogn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <sstream>

#include "adalogn/random.hpp"
#include "json_io.hpp"

namespace adalogn {

namespace {

#include "connectives.inc"

constexpr std::array<std::string_view, 8> kRhetoricalNames = {
    "LIST", "CONTRAST", "DISJUNCTION", "RESULT",
    "CAUSE", "PURPOSE", "CONDITION", "BACKGROUND"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

}  // namespace

std::string_view to_string(RhetoricalRelation r) {
  return kRhetoricalNames[static_cast<std::size_t>(r)];
}

RhetoricalRelation rhetorical_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRhetoricalNames.size(); ++i) {
    if (kRhetoricalNames[i] == s) return static_cast<RhetoricalRelation>(i);
  }
  throw Error("unknown rhetorical relation '" + std::string(s) + "'");
}

Relation map_rhetorical(RhetoricalRelation r) {
  switch (r) {
    case RhetoricalRelation::list:
    case RhetoricalRelation::contrast:
      return Relation::conj;
    case RhetoricalRelation::disjunction:
      return Relation::disj;
    case RhetoricalRelation::result:
      return Relation::impl;
    case RhetoricalRelation::cause:
    case RhetoricalRelation::purpose:
    case RhetoricalRelation::condition:
    case RhetoricalRelation::background:
      return Relation::rev;
  }
  return Relation::unk;
}

// ---------------------------------------------------------------------------
// Lexicon

ConnectiveLexicon::ConnectiveLexicon(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.words.size() > b.words.size();
                   });
}

ConnectiveLexicon ConnectiveLexicon::parse(std::string_view text) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    const auto tab = l.find('\t');
    if (tab == std::string_view::npos) {
      throw Error("lexicon line " + std::to_string(line_no) +
                  ": expected 'connective<TAB>RELATION'");
    }
    Entry e;
    e.words = split_words(lower(l.substr(0, tab)));
    if (e.words.empty()) {
      throw Error("lexicon line " + std::to_string(line_no) + ": empty connective");
    }
    e.relation = rhetorical_from_string(trim(l.substr(tab + 1)));
    entries.push_back(std::move(e));
  }
  return ConnectiveLexicon(std::move(entries));
}

ConnectiveLexicon ConnectiveLexicon::load(const std::string& path) {
  return parse(detail::read_file(path));
}

const ConnectiveLexicon& ConnectiveLexicon::builtin() {
  static const ConnectiveLexicon lex = parse(kBuiltinConnectives);
  return lex;
}

// ---------------------------------------------------------------------------
// Segmentation

namespace {

struct Token {
  std::string text;
  std::string lower;
  bool boundary = false;  // ',', ';' or ':'
};

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool terminal = (c == '.' || c == '!' || c == '?') &&
                          (i + 1 == text.size() ||
                           std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (terminal) {
      if (!trim(cur).empty()) out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) out.emplace_back(trim(cur));
  return out;
}

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> out;
  for (std::string w : split_words(sentence)) {
    int trailing = 0;
    while (!w.empty() && (w.back() == ',' || w.back() == ';' || w.back() == ':')) {
      w.pop_back();
      ++trailing;
    }
    if (!w.empty()) out.push_back({w, lower(w), false});
    for (int i = 0; i < trailing; ++i) out.push_back({",", ",", true});
  }
  return out;
}

struct Match {
  std::size_t length;
  RhetoricalRelation relation;
};

std::optional<Match> match_at(std::span<const Token> toks, std::size_t pos,
                              const ConnectiveLexicon& lex) {
  for (const auto& e : lex.entries()) {
    if (pos + e.words.size() > toks.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < e.words.size() && ok; ++k) {
      ok = !toks[pos + k].boundary && toks[pos + k].lower == e.words[k];
    }
    if (ok) return Match{e.words.size(), e.relation};
  }
  return std::nullopt;
}

class Segmenter {
 public:
  Segmenter(const ConnectiveLexicon& lex, SegmentedText& out, Part source)
      : lex_(lex), out_(out), source_(source) {}

  /// Segments a clause; returns the EDU that outer relations attach to.
  std::optional<std::size_t> clause(std::span<const Token> toks) {
    while (!toks.empty() && toks.front().boundary) toks = toks.subspan(1);
    while (!toks.empty() && toks.back().boundary) toks = toks.first(toks.size() - 1);
    if (toks.empty()) return std::nullopt;

    // "<conn> X, Y" or "<conn> X then Y"
    if (const auto m = match_at(toks, 0, lex_)) {
      for (std::size_t q = m->length + 1; q + 1 < toks.size(); ++q) {
        const bool comma = toks[q].boundary;
        if (!comma && toks[q].lower != "then") continue;
        std::size_t rest = q + 1;
        if (comma && toks[rest].lower == "then") ++rest;
        if (rest >= toks.size()) break;
        const auto dep = clause(toks.subspan(m->length, q - m->length));
        const auto head = clause(toks.subspan(rest));
        if (dep && head) out_.relations.push_back({*head, m->relation, *dep});
        return head ? head : dep;
      }
    }

    // "X <conn> Y"
    for (std::size_t p = 1; p < toks.size(); ++p) {
      if (toks[p].boundary) continue;
      const auto m = match_at(toks, p, lex_);
      if (!m || p + m->length >= toks.size()) continue;
      const auto head = clause(toks.first(p));
      const auto dep = clause(toks.subspan(p + m->length));
      if (head && dep) out_.relations.push_back({*head, m->relation, *dep});
      return head ? head : dep;
    }

    std::string text;
    for (const Token& t : toks) {
      if (!text.empty() && !t.boundary) text.push_back(' ');
      text += t.text;
    }
    out_.edus.push_back({std::move(text), source_});
    return out_.edus.size() - 1;
  }

 private:
  const ConnectiveLexicon& lex_;
  SegmentedText& out_;
  Part source_;
};

}  // namespace

SegmentedText segment(std::string_view context, std::string_view option,
                      const ConnectiveLexicon& lexicon) {
  if (trim(context).empty() || trim(option).empty()) {
    throw Error("segment: context and option must be non-empty");
  }
  SegmentedText out;
  for (const auto& [text, part] :
       {std::pair{context, Part::context}, std::pair{option, Part::option}}) {
    Segmenter seg(lexicon, out, part);
    for (const std::string& sentence : split_sentences(text)) {
      const auto toks = tokenize(sentence);
      seg.clause(toks);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Negation detection

namespace {

const std::set<std::string>& negators() {
  static const std::set<std::string> s = {"not", "n't", "no", "never"};
  return s;
}

const std::vector<std::pair<std::string, std::string>>& antonym_adverbs() {
  static const std::vector<std::pair<std::string, std::string>> v = {
      {"always", "never"},     {"often", "rarely"},      {"often", "seldom"},
      {"frequently", "rarely"}, {"usually", "rarely"},    {"sometimes", "never"},
      {"likely", "unlikely"},  {"possibly", "impossibly"}, {"everywhere", "nowhere"},
  };
  return v;
}

const std::vector<std::string> kNegationPrefix = {"it", "is", "not", "the", "case", "that"};

bool is_antonym(const std::string& a, const std::string& b) {
  for (const auto& [x, y] : antonym_adverbs()) {
    if ((a == x && b == y) || (a == y && b == x)) return true;
  }
  return false;
}

bool differs_by_negator(const std::vector<std::string>& longer,
                        const std::vector<std::string>& shorter) {
  if (longer.size() != shorter.size() + 1) return false;
  for (std::size_t k = 0; k < longer.size(); ++k) {
    if (!negators().count(longer[k])) continue;
    if (std::equal(longer.begin(), longer.begin() + static_cast<std::ptrdiff_t>(k),
                   shorter.begin()) &&
        std::equal(longer.begin() + static_cast<std::ptrdiff_t>(k) + 1, longer.end(),
                   shorter.begin() + static_cast<std::ptrdiff_t>(k))) {
      return true;
    }
  }
  return false;
}

bool has_negation_prefix(const std::vector<std::string>& longer,
                         const std::vector<std::string>& shorter) {
  return longer.size() == shorter.size() + kNegationPrefix.size() &&
         std::equal(kNegationPrefix.begin(), kNegationPrefix.end(), longer.begin()) &&
         std::equal(shorter.begin(), shorter.end(),
                    longer.begin() + static_cast<std::ptrdiff_t>(kNegationPrefix.size()));
}

}  // namespace

std::vector<std::string> negation_tokens(std::string_view edu) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (cur.empty()) return;
    if (cur.size() > 3 && cur.compare(cur.size() - 3, 3, "n't") == 0) {
      std::string stem = cur.substr(0, cur.size() - 3);
      if (stem == "ca") stem = "can";
      if (stem == "wo") stem = "will";
      out.push_back(stem);
      out.emplace_back("n't");
    } else {
      out.push_back(cur);
    }
    cur.clear();
  };
  for (char c : edu) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'' || c == '-' || c == '_') {
      cur.push_back(c == '\'' ? '\'' : static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

bool detect_negation(std::string_view a, std::string_view b) {
  const auto ta = negation_tokens(a);
  const auto tb = negation_tokens(b);
  if (ta == tb) return false;
  if (differs_by_negator(ta, tb) || differs_by_negator(tb, ta)) return true;
  if (has_negation_prefix(ta, tb) || has_negation_prefix(tb, ta)) return true;
  if (ta.size() != tb.size()) return false;
  std::size_t diffs = 0;
  std::size_t at = 0;
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k] != tb[k]) {
      ++diffs;
      at = k;
    }
  }
  if (diffs != 1) return false;
  static const std::set<std::string> determiners = {"a", "an", "some", "any"};
  const bool no_for_determiner = (ta[at] == "no" && determiners.count(tb[at])) ||
                                 (tb[at] == "no" && determiners.count(ta[at]));
  return no_for_determiner || is_antonym(ta[at], tb[at]);
}

// ---------------------------------------------------------------------------
// Raw TLG

Tlg build_raw_tlg(const SegmentedText& s) {
  bool in_option = false;
  for (const Edu& e : s.edus) {
    if (e.text.empty()) throw Error("build_raw_tlg: empty EDU");
    if (e.source == Part::option) {
      in_option = true;
    } else if (in_option) {
      throw Error("build_raw_tlg: context EDU after option EDU");
    }
  }
  Tlg g;
  for (const Edu& e : s.edus) g.add_node(e.text, e.source);

  const auto n = static_cast<NodeId>(s.edus.size());
  for (const RhetoricalLink& r : s.relations) {
    if (r.head >= s.edus.size() || r.dependent >= s.edus.size()) {
      throw Error("build_raw_tlg: relation index out of range");
    }
    g.add_edge(static_cast<NodeId>(r.head), map_rhetorical(r.relation),
               static_cast<NodeId>(r.dependent));
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (detect_negation(s.edus[static_cast<std::size_t>(i)].text,
                          s.edus[static_cast<std::size_t>(j)].text)) {
        g.add_edge(i, Relation::neg, j);
      }
    }
  }
  for (NodeId i = 0; i + 1 < n; ++i) {
    if (!g.connected(i, i + 1)) g.add_edge(i, Relation::unk, i + 1);
  }
  return g;
}

Tlg join_option(const Tlg& context, const Tlg& option) {
  std::vector<Node> nodes;
  std::map<NodeId, NodeId> cmap;
  std::map<NodeId, NodeId> omap;
  for (const Node& n : context.nodes()) {
    if (n.part != Part::context) throw Error("join_option: option node in context graph");
    cmap[n.id] = static_cast<NodeId>(nodes.size());
    nodes.push_back(n);
  }
  for (const Node& n : option.nodes()) {
    if (n.part != Part::option) throw Error("join_option: context node in option graph");
    omap[n.id] = static_cast<NodeId>(nodes.size());
    nodes.push_back(n);
  }
  const auto remap_nodes = [&nodes](std::size_t from, std::size_t to,
                                    const std::map<NodeId, NodeId>& m) {
    for (std::size_t i = from; i < to; ++i) {
      nodes[i].id = m.at(nodes[i].id);
      if (nodes[i].neg_of) nodes[i].neg_of = m.at(*nodes[i].neg_of);
    }
  };
  remap_nodes(0, context.size(), cmap);
  remap_nodes(context.size(), nodes.size(), omap);

  std::vector<Edge> edges;
  std::vector<Edge> inferred;
  for (const auto& [g, m] : {std::pair{&context, &cmap}, std::pair{&option, &omap}}) {
    for (const Edge& e : g->edges()) {
      const Edge r{m->at(e.src), e.rel, m->at(e.dst)};
      edges.push_back(r);
      if (g->is_inferred(e)) inferred.push_back(r);
    }
  }
  Tlg out = Tlg::unchecked(std::move(nodes), std::move(edges), std::move(inferred));

  const auto nc = static_cast<NodeId>(context.size());
  const auto n = static_cast<NodeId>(out.size());
  for (NodeId c = 0; c < nc; ++c) {
    for (NodeId o = nc; o < n; ++o) {
      if (detect_negation(out.node(c).text, out.node(o).text)) {
        out.add_edge(c, Relation::neg, o);
      }
    }
  }
  if (nc > 0 && n > nc && !out.connected(nc - 1, nc)) {
    out.add_edge(nc - 1, Relation::unk, nc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graph limiting

namespace {

/// Renumbers ids densely in list order.
Tlg densify(const Tlg& g) {
  std::map<NodeId, NodeId> m;
  std::vector<Node> nodes = g.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) m[nodes[i].id] = static_cast<NodeId>(i);
  for (Node& n : nodes) {
    n.id = m.at(n.id);
    if (n.neg_of) n.neg_of = m.at(*n.neg_of);
  }
  std::vector<Edge> edges;
  std::vector<Edge> inferred;
  for (const Edge& e : g.edges()) {
    edges.push_back({m.at(e.src), e.rel, m.at(e.dst)});
    if (g.is_inferred(e)) inferred.push_back(edges.back());
  }
  return Tlg::unchecked(std::move(nodes), std::move(edges), std::move(inferred));
}

Tlg merge_nodes(const Tlg& g, NodeId keep, NodeId drop) {
  std::vector<Node> nodes;
  for (Node n : g.nodes()) {
    if (n.id == drop) continue;
    if (n.id == keep) n.text += " " + g.node(drop).text;
    if (n.neg_of == drop) n.neg_of = keep;
    if (n.neg_of == n.id) n.neg_of.reset();
    nodes.push_back(std::move(n));
  }
  const auto re = [&](NodeId x) { return x == drop ? keep : x; };
  std::vector<Edge> edges;
  std::vector<Edge> inferred;
  for (const Edge& e : g.edges()) {
    const Edge r{re(e.src), e.rel, re(e.dst)};
    if (r.src == r.dst) continue;
    edges.push_back(r);
    if (g.is_inferred(e)) inferred.push_back(r);
  }
  // A node that was neg-linked only through the dropped node may have lost
  // its link as a self-loop.
  Tlg out = Tlg::unchecked(std::move(nodes), std::move(edges), std::move(inferred));
  std::vector<Node> fixed = out.nodes();
  bool changed = false;
  for (Node& n : fixed) {
    if (n.neg_of && !out.has_edge(n.id, Relation::neg, *n.neg_of)) {
      n.neg_of.reset();
      changed = true;
    }
  }
  if (!changed) return out;
  return Tlg::unchecked(std::move(fixed),
                        {out.edges().begin(), out.edges().end()},
                        {out.inferred_edges().begin(), out.inferred_edges().end()});
}

/// One representative triple per logical edge: the impl side of an impl/rev
/// pair and the src < dst side of a symmetric pair.
std::vector<Edge> rendered_edges(const Tlg& g) {
  std::vector<Edge> out;
  for (const Edge& e : g.edges()) {
    if (e.rel == Relation::rev) continue;
    if (is_symmetric(e.rel) && e.src > e.dst) continue;
    out.push_back(e);
  }
  return out;
}

/// Indices into `edges` of bridges of the undirected multigraph they form.
std::vector<bool> find_bridges(const Tlg& g, const std::vector<Edge>& edges) {
  const std::size_t n = g.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (to, edge)
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::size_t a = g.index_of(edges[k].src);
    const std::size_t b = g.index_of(edges[k].dst);
    adj[a].push_back({b, k});
    adj[b].push_back({a, k});
  }
  std::vector<bool> bridge(edges.size(), false);
  std::vector<int> disc(n, -1);
  std::vector<int> low(n, 0);
  int timer = 0;
  const std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t u,
                                                                std::size_t via) {
    disc[u] = low[u] = timer++;
    for (const auto& [v, k] : adj[u]) {
      if (k == via) continue;
      if (disc[v] == -1) {
        dfs(v, k);
        low[u] = std::min(low[u], low[v]);
        if (low[v] > disc[u]) bridge[k] = true;
      } else {
        low[u] = std::min(low[u], disc[v]);
      }
    }
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (disc[u] == -1) dfs(u, SIZE_MAX);
  }
  return bridge;
}

}  // namespace

Tlg limit_graph(const Tlg& g, const LimitOptions& opts) {
  if (!weakly_connected(g)) throw TlgError("limit_graph: input graph is not weakly connected");
  Rng rng(opts.seed);
  Tlg cur = g;

  while (cur.size() > opts.max_nodes) {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (const Edge& e : cur.edges()) {
      if (e.rel != Relation::unk) continue;
      const Node& a = cur.node(e.src);
      const Node& b = cur.node(e.dst);
      if (a.part == b.part && cur.index_of(e.src) < cur.index_of(e.dst)) {
        pairs.emplace_back(e.src, e.dst);
      }
    }
    if (pairs.empty()) {
      throw TlgError("limit_graph: " + std::to_string(cur.size()) +
                     " nodes exceed the limit of " + std::to_string(opts.max_nodes) +
                     " and no unk-connected pair is left to merge");
    }
    const auto [keep, drop] = pairs[rng.index(pairs.size())];
    cur = merge_nodes(cur, keep, drop);
  }

  while (cur.edges().size() > opts.max_edges) {
    const auto edges = rendered_edges(cur);
    const auto bridge = find_bridges(cur, edges);
    std::vector<Edge> removable;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!bridge[k]) removable.push_back(edges[k]);
    }
    if (removable.empty()) {
      throw TlgError("limit_graph: " + std::to_string(cur.edges().size()) +
                     " edges exceed the limit of " + std::to_string(opts.max_edges) +
                     " and every remaining edge is a bridge");
    }
    const Edge victim = removable[rng.index(removable.size())];
    cur.remove_edge_pair(victim);
    if (victim.rel == Relation::neg) {
      // neg_of must not dangle once its neg edge is gone.
      std::vector<Node> nodes = cur.nodes();
      for (Node& n : nodes) {
        if (n.neg_of && !cur.has_edge(n.id, Relation::neg, *n.neg_of)) n.neg_of.reset();
      }
      cur = Tlg::unchecked(std::move(nodes), {cur.edges().begin(), cur.edges().end()},
                           {cur.inferred_edges().begin(), cur.inferred_edges().end()});
    }
  }
  return densify(cur);
}

}  // namespace adalogn
