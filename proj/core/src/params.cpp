#include "adalogn/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace adalogn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'A', 'D', 'L', 'G', 'C', 'K', 'P', 'T'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& b) : bytes_(b) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string take(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Tensor ParameterStore::add(const std::string& name, Shape shape, Init init, Rng& rng) {
  Tensor t = Tensor::zeros(shape, true);
  auto data = t.mutable_data();
  switch (init) {
    case Init::zeros:
      break;
    case Init::fan_in_uniform: {
      const double fan_in = shape.empty() ? 1.0 : static_cast<double>(shape.back());
      const double bound = 1.0 / std::sqrt(fan_in);
      for (double& v : data) v = rng.uniform(-bound, bound);
      break;
    }
    case Init::unit_uniform:
      for (double& v : data) v = rng.uniform(-1.0, 1.0);
      break;
  }
  return add(name, t);
}

Tensor ParameterStore::add(const std::string& name, const Tensor& values) {
  if (index_.count(name)) throw Error("parameter group '" + name + "' registered twice");
  index_[name] = groups_.size();
  groups_.emplace_back(name, Tensor::from(values.shape(),
                                          {values.data().begin(), values.data().end()}, true));
  return groups_.back().second;
}

bool ParameterStore::contains(const std::string& name) const { return index_.count(name) != 0; }

const Tensor& ParameterStore::at(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter group '" + name + "'");
  return groups_[it->second].second;
}

Tensor& ParameterStore::at(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : groups_) n += t.numel();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& [name, t] : groups_) t.zero_grad();
}

ParameterStore ParameterStore::clone() const {
  ParameterStore out;
  for (const auto& [name, t] : groups_) out.add(name, t);
  return out;
}

void ParameterStore::assign(const ParameterStore& other) {
  if (other.groups_.size() != groups_.size()) {
    throw CheckpointError("parameter stores differ in group count");
  }
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    auto& [name, t] = groups_[i];
    const auto& [oname, ot] = other.groups_[i];
    if (name != oname || t.shape() != ot.shape()) {
      throw CheckpointError("parameter group mismatch: '" + name + "' " +
                            to_string(t.shape()) + " vs '" + oname + "' " +
                            to_string(ot.shape()));
    }
    std::copy(ot.data().begin(), ot.data().end(), t.mutable_data().begin());
  }
}

std::string ParameterStore::to_bytes() const {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(groups_.size()));
  for (const auto& [name, t] : groups_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
    for (double v : t.data()) put<double>(out, v);
  }
  return out;
}

ParameterStore ParameterStore::from_bytes(const std::string& bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  ParameterStore out;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t g = 0; g < count; ++g) {
    const std::string name = r.take(r.get<std::uint32_t>());
    const auto rank = r.get<std::uint32_t>();
    Shape shape;
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
      n *= shape.back();
    }
    std::vector<double> values(n);
    for (double& v : values) v = r.get<double>();
    if (out.contains(name)) throw CheckpointError("duplicate group '" + name + "'");
    out.add(name, Tensor::from(std::move(shape), std::move(values)));
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
  return out;
}

void ParameterStore::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  const std::string bytes = to_bytes();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing '" + path + "'");
}

ParameterStore ParameterStore::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_bytes(ss.str());
}

bool ParameterStore::identical(const ParameterStore& other) const {
  if (groups_.size() != other.groups_.size()) return false;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const auto& [a, ta] = groups_[i];
    const auto& [b, tb] = other.groups_[i];
    if (a != b || ta.shape() != tb.shape()) return false;
    if (std::memcmp(ta.data().data(), tb.data().data(), ta.numel() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace adalogn
