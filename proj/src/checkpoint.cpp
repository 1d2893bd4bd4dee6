#include "dmrl/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "dmrl/errors.hpp"
#include "dmrl/rng.hpp"

namespace dmrl::nn {
namespace {

constexpr char kMagic[8] = {'D', 'M', 'R', 'L', 'C', 'K', 'P', 'T'};

template <typename U>
void put(std::vector<char>& out, U v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.insert(out.end(), p, p + sizeof(U));
}

void put_str(std::vector<char>& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(const std::vector<char>& b) : b_(b) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U v;
    std::memcpy(&v, b_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return v;
  }

  std::string get_str() {
    auto n = get<std::uint32_t>();
    need(n);
    std::string s(b_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  void read(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, b_.data() + pos_, n);
    pos_ += n;
  }

  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw VersionError("checkpoint truncated");
  }
  const std::vector<char>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<char> serialize_checkpoint(const Checkpoint& ckpt) {
  std::vector<char> out(kMagic, kMagic + 8);
  put<std::uint32_t>(out, Checkpoint::kVersion);
  put<std::uint64_t>(out, ckpt.schema_hash);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors.tensors()) {
    put_str(out, t.name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.value.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.value.cols()));
    const char* p = reinterpret_cast<const char*>(t.value.data());
    out.insert(out.end(), p, p + t.value.size() * sizeof(float));
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<char>& bytes,
                                  std::uint64_t expected_schema_hash) {
  Reader r(bytes);
  char magic[8];
  r.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw VersionError("not a checkpoint file");
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kVersion) {
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.schema_hash = r.get<std::uint64_t>();
  if (expected_schema_hash != 0 && ckpt.schema_hash != expected_schema_hash) {
    throw VersionError("checkpoint schema hash does not match the loaded schema");
  }
  const auto n_meta = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = r.get_str();
    ckpt.meta[k] = r.get_str();
  }
  const auto n = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto name = r.get_str();
    const auto rows = r.get<std::uint32_t>();
    const auto cols = r.get<std::uint32_t>();
    int idx = ckpt.tensors.add(name, static_cast<int>(rows), static_cast<int>(cols));
    r.read(ckpt.tensors[idx].data(), std::size_t(rows) * cols * sizeof(float));
  }
  if (!r.done()) throw VersionError("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {
std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
}  // namespace

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::uint64_t expected_schema_hash) {
  return deserialize_checkpoint(read_file(path), expected_schema_hash);
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return fnv1a(bytes.data(), bytes.size());
}

}  // namespace dmrl::nn
