#pragma once

// Semantic oracles for the implication/negation fragment of a TLG. They share
// nothing with the rule engine beyond the graph type and exist to check it.

#include <map>
#include <set>
#include <utility>

#include "adalogn/tlg.hpp"

namespace adalogn {

/// A propositional literal: variable `var` (the lowest node id of its
/// neg-connected component) or its negation.
struct Literal {
  NodeId var = 0;
  bool negated = false;

  auto operator<=>(const Literal&) const = default;
  [[nodiscard]] Literal complement() const { return {var, !negated}; }
};

class OracleError : public Error {
 public:
  using Error::Error;
};

/// Maps every node to a literal by two-colouring the neg edges. Throws
/// OracleError when a node would have to be its own negation.
std::map<NodeId, Literal> literal_map(const Tlg& g);

using LiteralPairs = std::set<std::pair<Literal, Literal>>;

/// All (x, y) with a path of length >= 1 from x to y in the implication graph
/// over literals, where each impl edge u -> v contributes lit(u) -> lit(v)
/// and its contrapositive. Breadth-first search.
LiteralPairs reachability_oracle(const Tlg& g);

inline constexpr std::size_t kMaxOracleVariables = 14;

/// True iff the impl edges of g (with neg pairs as complementary literals)
/// entail `from -> to`, decided by enumerating every assignment. Throws
/// OracleError beyond kMaxOracleVariables variables.
bool entailment_oracle(const Tlg& g, Literal from, Literal to);
bool entailment_oracle(const Tlg& g, NodeId from, NodeId to);

}  // namespace adalogn
