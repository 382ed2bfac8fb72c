#pragma once

// Synthetic multiple-choice entailment tasks over symbolic EDUs ("P3",
// "not P3"). Contexts are implication chains plus distractor structure;
// exactly one option is entailed, which the entailment oracle confirms.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adalogn/oracle.hpp"
#include "adalogn/rules.hpp"
#include "adalogn/task.hpp"

namespace adalogn {

enum class OptionForm : std::uint8_t {
  positive,        // "if Pi then Pj"
  contrapositive,  // "if not Pj then not Pi"
};

std::string_view to_string(OptionForm f);
OptionForm option_form_from_string(std::string_view s);

inline constexpr std::string_view kDefaultQuestion =
    "Which one of the following can be properly inferred from the statements above?";

struct GeneratorSpec {
  std::size_t vars = 5;       // symbols P0 .. P{vars-1}
  std::size_t chain_len = 3;  // impl edges per chain
  std::size_t chains = 1;
  RuleSet needs_rules = {RuleId::hs};
  std::size_t distractors = 1;  // extra conj/unk edges in the context
  std::size_t neg_pairs = 0;    // context nodes "not Pk" linked to Pk
  OptionForm option_form = OptionForm::positive;
  std::size_t options = 4;
  std::uint64_t seed = 0;
  std::size_t max_retries = 64;
};

class SynthError : public Error {
 public:
  using Error::Error;
};

/// Throws SynthError when the spec cannot be satisfied.
void validate(const GeneratorSpec& spec);

/// n instances; instance i depends only on (spec, i) apart from the gold
/// position, which is drawn from a balanced sequence.
std::vector<TaskInstance> generate(std::size_t n, const GeneratorSpec& spec);

/// Literal of an option-node text in the context's theory, if its symbol
/// occurs in the context.
std::optional<Literal> context_literal(const Tlg& context, std::string_view text);

/// True iff every impl edge of the option graph is entailed by the context.
bool option_entailed(const Tlg& context, const Tlg& option);

struct AuditViolation {
  std::string instance;
  int option = -1;  // -1 for instance-level problems
  std::string message;
};

struct AuditReport {
  std::size_t instances = 0;
  std::vector<AuditViolation> violations;
};

/// Re-checks every option of every instance with the entailment oracle.
AuditReport audit(const std::vector<TaskInstance>& data);

/// Sorted symbols of every node text in the data.
std::vector<std::string> collect_vocab(const std::vector<TaskInstance>& data);

}  // namespace adalogn
