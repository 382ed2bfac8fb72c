#pragma once

// Named, trainable parameter groups and their binary checkpoint format.
//
// Checkpoint layout (little-endian):
//   8 bytes  magic "ADLGCKPT"
//   u32      format version
//   u32      group count
//   per group: u32 name length, name bytes, u32 rank, u64 dims[rank],
//              f64 values[product(dims)]
// Values are written as raw IEEE-754 bits, so a round trip is bit-exact.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adalogn/random.hpp"
#include "adalogn/tensor.hpp"

namespace adalogn {

class CheckpointError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class Init : std::uint8_t {
  zeros,
  fan_in_uniform,  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)), fan_in = last dim
  unit_uniform,    // U(-1, 1)
};

class ParameterStore {
 public:
  /// Registers a new group. Throws Error when `name` is already taken.
  Tensor add(const std::string& name, Shape shape, Init init, Rng& rng);
  /// Registers a group holding the given tensor's values.
  Tensor add(const std::string& name, const Tensor& values);

  [[nodiscard]] bool contains(const std::string& name) const;
  [[nodiscard]] const Tensor& at(const std::string& name) const;
  [[nodiscard]] Tensor& at(const std::string& name);

  /// Groups in registration order.
  [[nodiscard]] const std::vector<std::pair<std::string, Tensor>>& groups() const {
    return groups_;
  }
  [[nodiscard]] std::vector<std::pair<std::string, Tensor>>& groups() { return groups_; }
  [[nodiscard]] std::size_t scalar_count() const;

  void zero_grad();
  /// Deep copy with fresh leaf tensors.
  [[nodiscard]] ParameterStore clone() const;
  /// Copies values from `other`, which must have identical names and shapes.
  void assign(const ParameterStore& other);

  [[nodiscard]] std::string to_bytes() const;
  static ParameterStore from_bytes(const std::string& bytes);
  void save(const std::string& path) const;
  static ParameterStore load(const std::string& path);

  /// Bitwise equality of names, shapes and values.
  [[nodiscard]] bool identical(const ParameterStore& other) const;

 private:
  std::vector<std::pair<std::string, Tensor>> groups_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace adalogn
