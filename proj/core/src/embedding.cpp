#include "adalogn/embedding.hpp"

#include "adalogn/ops.hpp"

namespace adalogn {

std::string_view to_string(EmbeddingMode m) {
  return m == EmbeddingMode::hash ? "hash" : "table";
}

EmbeddingMode embedding_mode_from_string(std::string_view s) {
  if (s == "hash") return EmbeddingMode::hash;
  if (s == "table") return EmbeddingMode::table;
  throw Error("unknown embedding mode '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SymbolKey symbol_key(std::string_view text) {
  static constexpr std::string_view kPrefixes[] = {"it is not the case that ", "not "};
  SymbolKey key;
  text = trim(text);
  for (bool stripped = true; stripped;) {
    stripped = false;
    for (std::string_view p : kPrefixes) {
      if (text.substr(0, p.size()) == p) {
        text = trim(text.substr(p.size()));
        key.negated = !key.negated;
        stripped = true;
      }
    }
  }
  key.symbol = std::string(text);
  return key;
}

EmbeddingProvider::EmbeddingProvider(EmbeddingMode mode, std::size_t d, std::uint64_t seed,
                                     std::vector<std::string> vocab)
    : mode_(mode), d_(d), seed_(seed), vocab_(std::move(vocab)) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], i).second) {
      throw Error("duplicate vocabulary symbol '" + vocab_[i] + "'");
    }
  }
}

void EmbeddingProvider::register_params(ParameterStore& params, Rng& rng) const {
  if (mode_ != EmbeddingMode::table) return;
  if (vocab_.empty()) throw Error("table embeddings need a non-empty vocabulary");
  params.add(std::string(kEmbeddingTable), {2 * vocab_.size(), d_}, Init::unit_uniform, rng);
}

std::optional<std::size_t> EmbeddingProvider::row(std::string_view text) const {
  const SymbolKey key = symbol_key(text);
  const auto it = index_.find(key.symbol);
  if (it == index_.end()) return std::nullopt;
  return 2 * it->second + (key.negated ? 1 : 0);
}

Tensor EmbeddingProvider::hash_vector(std::string_view text) const {
  Rng rng(mix_seed(fnv1a(text) ^ mix_seed(seed_)));
  std::vector<double> v(d_);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor::vector(std::move(v));
}

Tensor EmbeddingProvider::embed(std::string_view text, const ParameterStore& params) const {
  if (mode_ == EmbeddingMode::table) {
    if (const auto r = row(text)) return ops::row(params.at(std::string(kEmbeddingTable)), *r);
  }
  return hash_vector(text);
}

}  // namespace adalogn
