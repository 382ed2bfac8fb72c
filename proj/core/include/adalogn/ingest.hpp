#pragma once

// Raw TLG construction: connective-based EDU segmentation, the
// rhetorical-to-logical relation mapping, negation detection, unk
// adjacency edges and graph-size limiting.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adalogn/tlg.hpp"

namespace adalogn {

enum class RhetoricalRelation : std::uint8_t {
  list,
  contrast,
  disjunction,
  result,
  cause,
  purpose,
  condition,
  background,
};

std::string_view to_string(RhetoricalRelation r);
RhetoricalRelation rhetorical_from_string(std::string_view s);

/// LIST, CONTRAST -> conj; DISJUNCTION -> disj; RESULT -> impl;
/// CAUSE, PURPOSE, CONDITION, BACKGROUND -> rev.
Relation map_rhetorical(RhetoricalRelation r);

/// Connective patterns, matched case-insensitively on whole words.
class ConnectiveLexicon {
 public:
  struct Entry {
    std::vector<std::string> words;  // lower-cased connective tokens
    RhetoricalRelation relation;
  };

  ConnectiveLexicon() = default;
  explicit ConnectiveLexicon(std::vector<Entry> entries);

  /// One pattern per line: `connective<TAB>RELATION`. Blank lines and lines
  /// starting with '#' are skipped.
  static ConnectiveLexicon parse(std::string_view text);
  static ConnectiveLexicon load(const std::string& path);
  /// The table shipped in data/connectives.tsv, compiled in.
  static const ConnectiveLexicon& builtin();

  [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;  // longest patterns first
};

struct Edu {
  std::string text;
  Part source = Part::context;

  bool operator==(const Edu&) const = default;
};

struct RhetoricalLink {
  std::size_t head;
  RhetoricalRelation relation;
  std::size_t dependent;

  bool operator==(const RhetoricalLink&) const = default;
};

/// A link (head, R, dependent) reads "dependent stands in relation R to
/// head": for CONDITION the dependent is the condition, for RESULT it is the
/// result.
struct SegmentedText {
  std::vector<Edu> edus;
  std::vector<RhetoricalLink> relations;

  bool operator==(const SegmentedText&) const = default;
};

SegmentedText segment(std::string_view context, std::string_view option,
                      const ConnectiveLexicon& lexicon = ConnectiveLexicon::builtin());

/// Lower-cased word tokens with "n't" split off ("isn't" -> "is", "n't").
std::vector<std::string> negation_tokens(std::string_view edu);

/// True iff one EDU is the other with a single negator (not, n't, no, never)
/// inserted, with the prefix "it is not the case that" added, or with one
/// adverb replaced by its listed antonym.
bool detect_negation(std::string_view a, std::string_view b);

/// One node per EDU in text order, mapped logical edges, neg edges between
/// negating EDUs and unk edges between otherwise unrelated adjacent EDUs.
Tlg build_raw_tlg(const SegmentedText& s);

struct LimitOptions {
  std::size_t max_nodes = 25;
  std::size_t max_edges = 50;  // counted as stored directed triples
  std::uint64_t seed = 0;
};

/// Shrinks a weakly connected graph by merging random same-part
/// unk-connected node pairs and deleting random non-bridge edge pairs.
/// Node ids of the result are dense in text order.
/// Throws TlgError when the limits cannot be met.
Tlg limit_graph(const Tlg& g, const LimitOptions& opts);

/// Combines a context-only graph with an option-only graph into the raw TLG
/// for that option: option nodes are renumbered after the context nodes, neg
/// edges are added between negating context/option EDUs and the last context
/// EDU is linked to the first option EDU by unk if they are otherwise
/// unrelated.
Tlg join_option(const Tlg& context, const Tlg& option);

}  // namespace adalogn
