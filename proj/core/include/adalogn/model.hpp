#pragma once

// The reasoning network over a raw TLG: relevance-gated rule extension,
// L rounds of relational message passing with a gated subgraph-to-node
// term, residual fusion, a residual BiGRU, option-attended pooling and an
// MLP scorer.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adalogn/embedding.hpp"
#include "adalogn/params.hpp"
#include "adalogn/rules.hpp"
#include "adalogn/task.hpp"
#include "adalogn/tlg.hpp"

namespace adalogn {

enum class Variant : std::uint8_t { standard, no_ext, full_ext, no_at, n2n, n2n_plus };

std::string_view to_string(Variant v);
/// Accepts "standard", "no-ext", "full-ext", "no-at", "n2n", "n2n+".
Variant variant_from_string(std::string_view s);

struct ModelConfig {
  std::size_t d = 64;
  std::size_t iterations = 2;  // L
  double tau = 0.6;
  double gamma = 0.25;
  RuleSet rules = kAllRules;
  Variant variant = Variant::standard;
  std::uint64_t seed = 0;
  std::size_t heads = 1;
  bool share_attention = false;
  EmbeddingMode embedding = EmbeddingMode::hash;
  std::vector<std::string> vocab;  // table mode symbols
  std::size_t closure_max_nodes = 256;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Throws ConfigError unless every field is in range.
void validate(const ModelConfig& cfg);

using NodeReps = std::map<NodeId, Tensor>;

struct CandidateTrace {
  RuleId rule = RuleId::hs;
  std::vector<NodeId> premise_nodes;
  std::vector<Edge> new_edges;
  double rel = 0.0;
  bool admitted = false;
};

/// Attention distribution of one node: weights[head][k] over `over[k]`.
struct AttentionRow {
  NodeId node = 0;
  std::vector<NodeId> over;
  std::vector<std::vector<double>> weights;
};

struct IterationTrace {
  std::vector<CandidateTrace> candidates;
  double rel_mean = 0.0;
  std::size_t admitted = 0;
  std::size_t working_nodes = 0;
  std::size_t working_edges = 0;
  std::size_t densified_pairs = 0;  // n2n+ only
  bool gated = false;               // false for n2n, n2n+
  std::vector<AttentionRow> neighbor_attention;
  std::vector<AttentionRow> subgraph_attention;
  std::map<NodeId, double> gates;   // beta per node
};

struct ForwardTrace {
  std::vector<IterationTrace> iterations;
  AttentionRow pool_attention;
  std::vector<double> h_v;
  std::vector<double> h_g;
  double score = 0.0;
};

struct ExtensionResult {
  Tlg working;
  std::vector<Tensor> rels;   // one per candidate, shape [1]
  std::vector<bool> admitted;
};

struct OptionOutput {
  Tensor score;  // shape [1]
  ForwardTrace trace;
};

struct InstanceOutput {
  Tensor scores;  // shape [|O|]
  std::vector<ForwardTrace> traces;
};

class Model {
 public:
  /// Fresh parameters drawn from cfg.seed.
  explicit Model(ModelConfig cfg);
  /// Existing parameters; names and shapes must match the layout for cfg.
  Model(ModelConfig cfg, ParameterStore params);

  [[nodiscard]] const ModelConfig& config() const { return cfg_; }
  [[nodiscard]] ParameterStore& params() { return params_; }
  [[nodiscard]] const ParameterStore& params() const { return params_; }
  [[nodiscard]] const EmbeddingProvider& embeddings() const { return embed_; }

  /// rel = sigmoid(linear(mean of premise reps || g_o)). Throws Error when a
  /// premise node has no representation.
  [[nodiscard]] Tensor score_candidate(const ExtensionCandidate& c, const NodeReps& h,
                                       const Tensor& g_o) const;

  /// Scores `candidates` (enumerated on g_raw) and builds the working graph
  /// from the admitted ones, per the configured variant.
  [[nodiscard]] ExtensionResult adaptive_extend(const Tlg& g_raw,
                                                const std::vector<ExtensionCandidate>& candidates,
                                                const NodeReps& h, const Tensor& g_o) const;

  /// One round of message passing on g; `l` is 1-based. Every node of g
  /// needs a representation in h. Returns reps for every node of g.
  [[nodiscard]] NodeReps message_pass(const Tlg& g, const NodeReps& h, std::size_t l,
                                      IterationTrace* trace = nullptr) const;

  /// Candidates the configured variant enumerates on a raw graph.
  [[nodiscard]] std::vector<ExtensionCandidate> candidates(const Tlg& g_raw) const;

  [[nodiscard]] OptionOutput forward_option(const Tlg& g_raw, std::string_view question,
                                            bool record_trace = true) const;
  [[nodiscard]] InstanceOutput forward_instance(const TaskInstance& inst,
                                                bool record_trace = true) const;

  /// Representation of a node's text.
  [[nodiscard]] Tensor embed(std::string_view text) const { return embed_.embed(text, params_); }

 private:
  void register_params(Rng& rng);
  [[nodiscard]] std::string attention_prefix(std::size_t l) const;

  ModelConfig cfg_;
  EmbeddingProvider embed_;
  ParameterStore params_;
};

}  // namespace adalogn
