#include "tess/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "tess/errors.hpp"

namespace tess {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    out.insert(out.end(), b, b + n);
  }
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<unsigned char> out;

 private:
  void little(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
  }
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

  std::uint64_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  const unsigned char* take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated checkpoint while reading ") + what, pos_);
    const unsigned char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(little(4, what)); }
  std::uint64_t u64(const char* what) { return little(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(little(8, what)); }

 private:
  std::uint64_t little(int width, const char* what) {
    const unsigned char* p = take(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
};

void write_values(Writer& w, const Tensor& t) {
  for (Real v : t.values()) w.f64(v);
}

Tensor read_values(Reader& r, const Shape& shape, const char* what) {
  Tensor t(shape);
  for (Real& v : t.values()) v = r.f64(what);
  return t;
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.moments.size() != ckpt.weights.size()) throw ShapeError("checkpoint: one moment record per layer");
  Writer w;
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.weights.size()));
  w.f64(ckpt.learning_rate);
  w.u64(ckpt.epoch);
  for (const Tensor& t : ckpt.weights) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t extent : t.shape()) w.u64(extent);
    write_values(w, t);
  }
  for (std::size_t i = 0; i < ckpt.moments.size(); ++i) {
    const AdamState& s = ckpt.moments[i];
    require_same_shape(s.m, ckpt.weights[i], "checkpoint first moment");
    require_same_shape(s.v, ckpt.weights[i], "checkpoint second moment");
    w.u64(s.step);
    write_values(w, s.m);
    write_values(w, s.v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.rng_state.size()));
  w.bytes(ckpt.rng_state.data(), ckpt.rng_state.size());
  return std::move(w.out);
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  const unsigned char* magic = r.take(sizeof kCheckpointMagic, "magic");
  if (!std::equal(magic, magic + sizeof kCheckpointMagic, kCheckpointMagic)) throw FormatError("bad checkpoint magic", 0);
  const std::uint64_t version_at = r.offset();
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), version_at);
  }
  const std::uint32_t layers = r.u32("layer count");

  Checkpoint ckpt;
  ckpt.learning_rate = r.f64("learning rate");
  ckpt.epoch = r.u64("epoch");
  for (std::uint32_t l = 0; l < layers; ++l) {
    const std::uint64_t rank_at = r.offset();
    const std::uint32_t rank = r.u32("tensor rank");
    if (rank == 0 || rank > 8) throw FormatError("implausible tensor rank " + std::to_string(rank), rank_at);
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<std::size_t>(r.u64("tensor extent")));
    const std::uint64_t payload = shape_size(shape) * 8;
    if (payload > bytes.size()) throw FormatError("tensor larger than file", rank_at);
    ckpt.weights.push_back(read_values(r, shape, "weights"));
  }
  for (std::uint32_t l = 0; l < layers; ++l) {
    AdamState s;
    s.step = r.u64("adam step");
    s.m = read_values(r, ckpt.weights[l].shape(), "first moment");
    s.v = read_values(r, ckpt.weights[l].shape(), "second moment");
    ckpt.moments.push_back(std::move(s));
  }
  const std::uint32_t rng_len = r.u32("rng length");
  const unsigned char* rng = r.take(rng_len, "rng state");
  ckpt.rng_state.assign(reinterpret_cast<const char*>(rng), rng_len);
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint", r.offset());
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::vector<unsigned char> bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string(), 0);
  return decode_checkpoint(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));
}

Checkpoint make_checkpoint(const Network& net, const std::vector<AdamState>& moments, double learning_rate,
                           std::uint64_t epoch, std::string rng_state) {
  Checkpoint ckpt;
  ckpt.learning_rate = learning_rate;
  ckpt.epoch = epoch;
  ckpt.rng_state = std::move(rng_state);
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (!net.layer(i).weighted()) continue;
    ckpt.weights.push_back(net.layer(i).weights);
    ckpt.moments.push_back(i < moments.size() && !moments[i].m.empty() ? moments[i]
                                                                        : AdamState::zeros(net.layer(i).shapes.weights));
  }
  return ckpt;
}

void restore_checkpoint(const Checkpoint& ckpt, Network& net, std::vector<AdamState>* moments) {
  if (ckpt.weights.size() != net.weighted_layer_count()) {
    throw ShapeError("checkpoint holds " + std::to_string(ckpt.weights.size()) + " weighted layers, network has " +
                     std::to_string(net.weighted_layer_count()));
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (!net.layer(i).weighted()) continue;
    Tensor& w = net.weights(i);
    require_same_shape(w, ckpt.weights[k], "restore_checkpoint");
    w = ckpt.weights[k];
    if (moments != nullptr && i < moments->size()) (*moments)[i] = ckpt.moments[k];
    ++k;
  }
}

}  // namespace tess
