#include "equigan/gan/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace equigan::gan {

namespace {

constexpr char kMagic[8] = {'E', 'Q', 'G', 'A', 'N', 'C', 'K', '\0'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t size) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size)); }
  template <typename T>
  void uint(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t b = 0; b < sizeof(T); ++b) buf[b] = static_cast<unsigned char>((v >> (8 * b)) & 0xff);
    bytes(buf, sizeof buf);
  }
  void i32(int v) { uint(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    uint(bits);
  }
  void text(const std::string& s) {
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) throw Error(ErrorCode::BadCheckpoint, "truncated checkpoint");
  }
  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof buf);
    T v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<T>(buf[b]) << (8 * b);
    return v;
  }
  int i32() { return static_cast<int>(static_cast<std::int32_t>(uint<std::uint32_t>())); }
  double f64() {
    const auto bits = uint<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string text(std::size_t limit = 1 << 24) {
    const auto size = uint<std::uint32_t>();
    if (size > limit) throw Error(ErrorCode::BadCheckpoint, "implausible string length");
    std::string s(size, '\0');
    bytes(s.data(), size);
    return s;
  }

 private:
  std::istream& in_;
};

void write_store(Writer& w, const char* prefix, const gnn::ParameterStore& store) {
  for (const auto& name : store.names()) {
    const Matrix& m = store[name];
    w.text(std::string(prefix) + name);
    w.uint(static_cast<std::uint64_t>(m.rows()));
    w.uint(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  if (ck.params.stage != ck.config.stage) throw Error(ErrorCode::BadCheckpoint, "parameters and config disagree on the stage");
  Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.uint(kCheckpointVersion);
  w.uint(static_cast<std::uint8_t>(ck.config.stage));
  w.uint(digest(ck.config));
  w.text(dump(ck.config));
  w.uint(static_cast<std::uint32_t>(ck.vocab.size()));
  for (const auto& atom : ck.vocab) {
    w.text(atom.element);
    w.i32(atom.formal_charge);
    w.i32(atom.explicit_h);
  }
  w.uint(static_cast<std::uint32_t>(ck.node_counts.size()));
  for (int n : ck.node_counts) w.i32(n);
  w.uint(static_cast<std::uint32_t>(ck.params.generator.names().size() + ck.params.discriminator.names().size()));
  write_store(w, "g/", ck.params.generator);
  write_store(w, "d/", ck.params.discriminator);
  if (!out) throw Error(ErrorCode::IoError, "checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error(ErrorCode::BadCheckpoint, "not a checkpoint file");
  const auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::BadCheckpoint, "unsupported checkpoint version " + std::to_string(version));
  const auto stage_byte = r.uint<std::uint8_t>();
  if (stage_byte < 1 || stage_byte > 3) throw Error(ErrorCode::BadCheckpoint, "bad stage id");
  const auto stored_digest = r.uint<std::uint64_t>();

  Checkpoint ck;
  try {
    ck.config = parse_config(r.text());
  } catch (const Error& e) {
    throw Error(ErrorCode::BadCheckpoint, std::string("embedded config: ") + e.what());
  }
  if (digest(ck.config) != stored_digest) throw Error(ErrorCode::BadCheckpoint, "config digest mismatch");
  if (static_cast<int>(ck.config.stage) != stage_byte) throw Error(ErrorCode::BadCheckpoint, "stage id mismatch");
  ck.params.stage = ck.config.stage;

  const auto vocab_size = r.uint<std::uint32_t>();
  for (std::uint32_t v = 0; v < vocab_size; ++v) {
    AtomDescriptor atom;
    atom.element = r.text(16);
    atom.formal_charge = r.i32();
    atom.explicit_h = r.i32();
    ck.vocab.push_back(atom);
  }
  const auto counts = r.uint<std::uint32_t>();
  for (std::uint32_t q = 0; q < counts; ++q) ck.node_counts.push_back(r.i32());

  const auto blocks = r.uint<std::uint32_t>();
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const std::string name = r.text(4096);
    const auto rows = r.uint<std::uint64_t>();
    const auto cols = r.uint<std::uint64_t>();
    if (rows * cols > (1ULL << 28)) throw Error(ErrorCode::BadCheckpoint, "implausible block shape for " + name);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
    if (name.rfind("g/", 0) == 0) ck.params.generator.add(name.substr(2), std::move(m));
    else if (name.rfind("d/", 0) == 0) ck.params.discriminator.add(name.substr(2), std::move(m));
    else throw Error(ErrorCode::BadCheckpoint, "block '" + name + "' belongs to no network");
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_checkpoint(out, ck);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return read_checkpoint(in);
}

}  // namespace equigan::gan
