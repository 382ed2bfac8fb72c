#pragma once

// Node and question encodings. Stands in for a pretrained text encoder:
// either a fixed pseudo-random vector per text (hash mode) or a learned
// table row per (symbol, negated) pair (table mode).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adalogn/params.hpp"

namespace adalogn {

enum class EmbeddingMode : std::uint8_t { hash, table };

std::string_view to_string(EmbeddingMode m);
EmbeddingMode embedding_mode_from_string(std::string_view s);

struct SymbolKey {
  std::string symbol;
  bool negated = false;

  bool operator==(const SymbolKey&) const = default;
};

/// Strips leading "it is not the case that " / "not " markers (each one
/// toggles the flag) and surrounding blanks: "not P3" -> {"P3", true}.
SymbolKey symbol_key(std::string_view text);

inline constexpr std::string_view kEmbeddingTable = "embedding.table";

class EmbeddingProvider {
 public:
  EmbeddingProvider(EmbeddingMode mode, std::size_t d, std::uint64_t seed,
                    std::vector<std::string> vocab = {});

  [[nodiscard]] EmbeddingMode mode() const { return mode_; }
  [[nodiscard]] std::size_t dim() const { return d_; }
  [[nodiscard]] const std::vector<std::string>& vocab() const { return vocab_; }

  /// Adds the table group (table mode only).
  void register_params(ParameterStore& params, Rng& rng) const;

  /// Table row for a text whose symbol is in the vocabulary.
  [[nodiscard]] std::optional<std::size_t> row(std::string_view text) const;

  /// Deterministic vector in [-1, 1)^d seeded by the text and the seed.
  [[nodiscard]] Tensor hash_vector(std::string_view text) const;

  /// Table lookup when the symbol is known, hash vector otherwise.
  [[nodiscard]] Tensor embed(std::string_view text, const ParameterStore& params) const;

 private:
  EmbeddingMode mode_;
  std::size_t d_;
  std::uint64_t seed_;
  std::vector<std::string> vocab_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace adalogn
