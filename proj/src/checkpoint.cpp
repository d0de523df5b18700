#include "l2b/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "l2b/errors.hpp"

namespace l2b::nn {
namespace {

constexpr char kMagic[8] = {'L', '2', 'B', 'V', 'N', 'E', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian");

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_raw(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  template <typename T>
  T get(const char* what) {
    T v;
    get_raw(&v, sizeof(T), what);
    return v;
  }
  void get_raw(void* dst, std::size_t n, const char* what) {
    if (pos_ + n > end_) throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::string widths_str(const std::vector<int>& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + "]";
}

}  // namespace

std::string serialize(const Checkpoint& ck) {
  const NetParams& p = ck.params;
  const NetConfig& c = p.config();
  Writer w;
  w.put_raw(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  const std::vector<int>* blocks[] = {&c.embedding, &c.pairwise, &c.attention, &c.value};
  w.put<std::uint32_t>(4);
  for (const auto* b : blocks) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(b->size()));
    for (const int x : *b) w.put<std::uint32_t>(static_cast<std::uint32_t>(x));
  }
  w.put<std::uint64_t>(p.adam_step());
  w.put<std::uint64_t>(ck.meta.episode);
  w.put<std::uint64_t>(ck.meta.updates);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(p.size()));
  const std::size_t n = static_cast<std::size_t>(p.size()) * sizeof(double);
  w.put_raw(p.values().data(), n);
  w.put_raw(p.adam_m().data(), n);
  w.put_raw(p.adam_v().data(), n);
  w.put<std::uint64_t>(fnv1a(w.str().data(), w.str().size()));
  return std::move(w.str());
}

Checkpoint deserialize(const std::string& bytes, const std::optional<NetConfig>& expected) {
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a value-network checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored_sum;
  std::memcpy(&stored_sum, bytes.data() + body, sizeof(stored_sum));
  if (stored_sum != fnv1a(bytes.data(), body)) {
    throw CheckpointError("checkpoint checksum mismatch (file corrupted or truncated)");
  }

  Reader r(bytes, body);
  char magic[8];
  r.get_raw(magic, sizeof(magic), "magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  NetConfig config;
  std::vector<int>* blocks[] = {&config.embedding, &config.pairwise, &config.attention, &config.value};
  if (r.get<std::uint32_t>("block count") != 4) throw CheckpointError("checkpoint block count must be 4");
  for (auto* b : blocks) {
    const auto n = r.get<std::uint32_t>("block size");
    if (n == 0 || n > 64) throw CheckpointError("checkpoint has an invalid block depth");
    b->clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto width = r.get<std::uint32_t>("layer width");
      if (width == 0 || width > 1u << 16) throw CheckpointError("checkpoint has an invalid layer width");
      b->push_back(static_cast<int>(width));
    }
  }

  if (expected && !(*expected == config)) {
    const NetParams want(*expected);
    const NetParams got(config);
    std::ostringstream msg;
    msg << "checkpoint architecture mismatch:";
    const char* names[] = {"embedding", "pairwise", "attention", "value"};
    const std::vector<int>* want_blocks[] = {&expected->embedding, &expected->pairwise,
                                             &expected->attention, &expected->value};
    for (int i = 0; i < 4; ++i) {
      if (*want_blocks[i] != *blocks[i]) {
        msg << ' ' << names[i] << " widths checkpoint " << widths_str(*blocks[i]) << " vs expected "
            << widths_str(*want_blocks[i]) << ';';
      }
    }
    const std::size_t n = std::min(want.tensors().size(), got.tensors().size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = got.tensors()[i];
      const auto& b = want.tensors()[i];
      if (a.rows != b.rows || a.cols != b.cols) {
        msg << " tensor " << b.name << " checkpoint " << a.rows << 'x' << a.cols << " vs expected "
            << b.rows << 'x' << b.cols << ';';
      }
    }
    if (want.tensors().size() != got.tensors().size()) {
      msg << " tensor count checkpoint " << got.tensors().size() << " vs expected "
          << want.tensors().size() << ';';
    }
    throw CheckpointError(msg.str());
  }

  Checkpoint ck{NetParams(config), {}};
  ck.params.set_adam_step(r.get<std::uint64_t>("adam step"));
  ck.meta.episode = r.get<std::uint64_t>("episode");
  ck.meta.updates = r.get<std::uint64_t>("updates");
  const auto count = r.get<std::uint64_t>("parameter count");
  if (count != static_cast<std::uint64_t>(ck.params.size())) {
    throw CheckpointError("checkpoint parameter count " + std::to_string(count) +
                          " does not match its architecture (" +
                          std::to_string(ck.params.size()) + ")");
  }
  const std::size_t n = static_cast<std::size_t>(count) * sizeof(double);
  r.get_raw(ck.params.values().data(), n, "values");
  r.get_raw(ck.params.adam_m().data(), n, "adam_m");
  r.get_raw(ck.params.adam_v().data(), n, "adam_v");
  if (r.pos() != body) throw CheckpointError("checkpoint has trailing bytes");
  if (!ck.params.values().allFinite()) throw CheckpointError("checkpoint holds non-finite weights");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string bytes = serialize(checkpoint);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("short write to checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<NetConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize(ss.str(), expected);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace l2b::nn
