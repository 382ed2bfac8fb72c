#pragma once

// Symbolic inference over a TLG: hypothetical syllogism, transposition and
// adjacency-transmission, one rule instantiation per candidate.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adalogn/tlg.hpp"

namespace adalogn {

enum class RuleId : std::uint8_t { hs, tr, at };

std::string_view to_string(RuleId r);
RuleId rule_from_string(std::string_view s);

using RuleSet = std::set<RuleId>;

inline const RuleSet kAllRules = {RuleId::hs, RuleId::tr, RuleId::at};

/// Parses "hs,tr,at" (case-insensitive, any order).
RuleSet parse_rules(std::string_view csv);
std::string to_string(const RuleSet& rules);

/// Prefix used for the text of a created negation node.
inline constexpr std::string_view kNegationTextPrefix = "it is not the case that ";

struct ExtensionCandidate {
  /// A node the candidate would create: the negation twin of `negates`.
  /// `placeholder` is the id used for it inside new_edges; apply_candidate()
  /// maps it to an existing twin or a fresh id.
  struct NewNode {
    NodeId placeholder;
    NodeId negates;
    std::string text;
    Part part;

    bool operator==(const NewNode&) const = default;
  };

  RuleId rule = RuleId::hs;
  std::vector<NodeId> premise_nodes;  // V_eps, sorted
  std::vector<Edge> premise_edges;
  std::vector<NewNode> new_nodes;
  std::vector<Edge> new_edges;  // every triple, mirrors and rev pairs included

  bool operator==(const ExtensionCandidate&) const = default;
};

class RuleError : public Error {
 public:
  using Error::Error;
};

/// The node negation-linked to `id` with the lowest position, if any.
std::optional<NodeId> negation_twin(const Tlg& g, NodeId id);

/// All single-step rule applications whose conclusion is absent from g,
/// ordered by (rule, premise ids, new edges).
std::vector<ExtensionCandidate> enumerate_candidates(const Tlg& g, const RuleSet& rules);

/// Adds the candidate's nodes and edges, flagged as inferred. Negation twins
/// already present in g are reused. Throws RuleError when a premise edge is
/// missing.
Tlg apply_candidate(const Tlg& g, const ExtensionCandidate& c);

/// In-place variant used when admitting many candidates into one graph.
void apply_candidate_in_place(Tlg& g, const ExtensionCandidate& c);

/// Fixpoint of enumerate + apply-all. Throws RuleError when the node count
/// would exceed max_nodes.
Tlg closure(const Tlg& g, const RuleSet& rules, std::size_t max_nodes = 256);

}  // namespace adalogn
