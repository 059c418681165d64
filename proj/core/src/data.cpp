#include "tess/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>

#include "tess/errors.hpp"

namespace tess {

void SpikeDataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const std::string where = "sample " + std::to_string(i);
    if (s.label >= class_count) throw ConfigError(where + ": label out of range");
    Shape expected = frame_shape;
    expected.insert(expected.begin(), time_steps);
    if (s.input.shape() != expected) {
      throw ConfigError(where + ": shape " + shape_string(s.input.shape()) + " != " + shape_string(expected));
    }
    for (Real v : s.input.values()) {
      if (!(v >= 0 && v <= 1)) throw ConfigError(where + ": value outside [0, 1]");
    }
  }
}

Tensor one_hot(std::size_t label, std::size_t class_count) {
  if (label >= class_count) throw ConfigError("label " + std::to_string(label) + " out of range");
  Tensor t({class_count});
  t[label] = 1;
  return t;
}

Tensor encode_static(const Tensor& image, std::size_t time_steps) {
  if (time_steps == 0) throw ConfigError("encode_static: T must be positive");
  Shape shape = image.shape();
  shape.insert(shape.begin(), time_steps);
  std::vector<Real> values;
  values.reserve(time_steps * image.size());
  for (std::size_t t = 0; t < time_steps; ++t) {
    values.insert(values.end(), image.values().begin(), image.values().end());
  }
  return Tensor(std::move(shape), std::move(values));
}

namespace {

class ByteReader {
 public:
  explicit ByteReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  std::uint64_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  const unsigned char* take(std::size_t n, const char* what) {
    if (remaining() < n) throw FormatError(std::string("truncated EVF1 file while reading ") + what, pos_);
    const unsigned char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  std::uint32_t u32(const char* what) {
    const unsigned char* p = take(4, what);
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw ConfigError(std::string("EVF1 field overflow: ") + what);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

SpikeDataset load_event_frames(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open EVF1 file " + path.string(), 0);
  ByteReader reader(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));

  const unsigned char* magic = reader.take(4, "magic");
  if (!std::equal(magic, magic + 4, "EVF1")) throw FormatError("bad EVF1 magic", 0);
  const std::uint32_t count = reader.u32("sample count");
  const std::uint32_t steps = reader.u32("time steps");
  const std::uint32_t height = reader.u32("height");
  const std::uint32_t width = reader.u32("width");
  const std::uint32_t channels = reader.u32("channels");
  const std::uint32_t classes = reader.u32("class count");

  SpikeDataset ds;
  ds.class_count = classes;
  ds.time_steps = steps;
  ds.frame_shape = {channels, height, width};
  const std::size_t values = std::size_t{steps} * channels * height * width;
  ds.samples.reserve(std::min<std::size_t>(count, reader.remaining() / (values + 1)));
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t at = reader.offset();
    const unsigned char label = *reader.take(1, "label");
    if (label >= classes) throw FormatError("label " + std::to_string(label) + " out of range", at);
    const unsigned char* raw = reader.take(values, "frame data");
    Tensor input({steps, channels, height, width});
    for (std::size_t k = 0; k < values; ++k) input[k] = std::clamp(raw[k] / Real{255}, Real{0}, Real{1});
    ds.samples.push_back({std::move(input), label});
  }
  if (reader.remaining() != 0) throw FormatError("trailing bytes after last EVF1 sample", reader.offset());
  return ds;
}

void save_event_frames(const std::filesystem::path& path, const SpikeDataset& dataset) {
  if (dataset.frame_shape.size() != 3) throw ConfigError("EVF1 frames must be [C, H, W]");
  if (dataset.class_count > 256) throw ConfigError("EVF1 stores labels in one byte");
  std::vector<unsigned char> out;
  out.insert(out.end(), {'E', 'V', 'F', '1'});
  put_u32(out, checked_u32(dataset.samples.size(), "sample count"));
  put_u32(out, checked_u32(dataset.time_steps, "time steps"));
  put_u32(out, checked_u32(dataset.frame_shape[1], "height"));
  put_u32(out, checked_u32(dataset.frame_shape[2], "width"));
  put_u32(out, checked_u32(dataset.frame_shape[0], "channels"));
  put_u32(out, checked_u32(dataset.class_count, "class count"));
  const std::size_t values = dataset.time_steps * shape_size(dataset.frame_shape);
  for (const Sample& s : dataset.samples) {
    if (s.input.size() != values) throw ShapeError("EVF1 sample size does not match header");
    out.push_back(static_cast<unsigned char>(s.label));
    for (Real v : s.input.values()) {
      out.push_back(static_cast<unsigned char>(std::lround(std::clamp(v, Real{0}, Real{1}) * 255)));
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write EVF1 file " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

std::vector<Tensor> synth_prototypes(const SynthTaskOptions& options) {
  Shape shape = options.frame_shape;
  shape.insert(shape.begin(), options.time_steps);
  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution fire(0.5);
  std::vector<Tensor> prototypes;
  while (prototypes.size() < options.classes) {
    Tensor p(shape);
    for (Real& v : p.values()) v = fire(rng) ? 1 : 0;
    if (std::find(prototypes.begin(), prototypes.end(), p) == prototypes.end()) prototypes.push_back(std::move(p));
  }
  return prototypes;
}

DatasetSplits split_dataset(SpikeDataset dataset, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(dataset.samples.begin(), dataset.samples.end(), rng);
  const std::size_t n = dataset.samples.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;

  auto part = [&](std::size_t begin, std::size_t end) {
    SpikeDataset ds;
    ds.class_count = dataset.class_count;
    ds.time_steps = dataset.time_steps;
    ds.frame_shape = dataset.frame_shape;
    for (std::size_t i = begin; i < end; ++i) ds.samples.push_back(dataset.samples[i]);
    return ds;
  };
  return {part(0, n_train), part(n_train, n_train + n_val), part(n_train + n_val, n)};
}

DatasetSplits synth_pattern_task(const SynthTaskOptions& options) {
  if (options.classes < 2) throw ConfigError("synthetic task needs at least 2 classes");
  if (options.classes > shape_size(options.frame_shape)) throw ConfigError("synthetic task: classes exceed neurons");
  if (options.time_steps == 0) throw ConfigError("synthetic task: T must be positive");
  if (!(options.noise >= 0 && options.noise <= 1)) throw ConfigError("synthetic task: noise must lie in [0, 1]");

  const std::vector<Tensor> prototypes = synth_prototypes(options);
  std::mt19937_64 rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  std::bernoulli_distribution flip(options.noise);

  SpikeDataset all;
  all.class_count = options.classes;
  all.time_steps = options.time_steps;
  all.frame_shape = options.frame_shape;
  all.samples.reserve(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) {
    const std::size_t label = i % options.classes;
    Tensor input = prototypes[label];
    for (Real& v : input.values()) {
      if (flip(rng)) v = 1 - v;
    }
    all.samples.push_back({std::move(input), label});
  }
  return split_dataset(std::move(all), options.seed + 1);
}

namespace {

void require_image(const Tensor& image, const char* context) {
  if (image.rank() != 3) throw ShapeError(std::string(context) + ": expected a [C, H, W] image");
}

}  // namespace

Tensor random_crop(const Tensor& image, std::size_t padding, std::mt19937_64& rng) {
  require_image(image, "random_crop");
  const std::size_t c = image.dim(0), h = image.dim(1), w = image.dim(2);
  std::uniform_int_distribution<std::size_t> shift(0, 2 * padding);
  const auto dy = static_cast<std::ptrdiff_t>(shift(rng)) - static_cast<std::ptrdiff_t>(padding);
  const auto dx = static_cast<std::ptrdiff_t>(shift(rng)) - static_cast<std::ptrdiff_t>(padding);
  Tensor out(image.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const auto sy = static_cast<std::ptrdiff_t>(y) + dy;
        const auto sx = static_cast<std::ptrdiff_t>(x) + dx;
        if (sy < 0 || sx < 0 || sy >= static_cast<std::ptrdiff_t>(h) || sx >= static_cast<std::ptrdiff_t>(w)) continue;
        out[(ch * h + y) * w + x] = image[(ch * h + static_cast<std::size_t>(sy)) * w + static_cast<std::size_t>(sx)];
      }
    }
  }
  return out;
}

Tensor random_horizontal_flip(const Tensor& image, std::mt19937_64& rng) {
  require_image(image, "random_horizontal_flip");
  if (!std::bernoulli_distribution(0.5)(rng)) return image;
  const std::size_t c = image.dim(0), h = image.dim(1), w = image.dim(2);
  Tensor out(image.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out[(ch * h + y) * w + x] = image[(ch * h + y) * w + (w - 1 - x)];
    }
  }
  return out;
}

Tensor cutout(const Tensor& image, std::size_t size, std::mt19937_64& rng) {
  require_image(image, "cutout");
  const std::size_t c = image.dim(0), h = image.dim(1), w = image.dim(2);
  std::uniform_int_distribution<std::size_t> cy(0, h - 1), cx(0, w - 1);
  const auto y0 = static_cast<std::ptrdiff_t>(cy(rng)) - static_cast<std::ptrdiff_t>(size / 2);
  const auto x0 = static_cast<std::ptrdiff_t>(cx(rng)) - static_cast<std::ptrdiff_t>(size / 2);
  Tensor out = image;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (auto y = std::max<std::ptrdiff_t>(y0, 0); y < std::min<std::ptrdiff_t>(y0 + static_cast<std::ptrdiff_t>(size), static_cast<std::ptrdiff_t>(h)); ++y) {
      for (auto x = std::max<std::ptrdiff_t>(x0, 0); x < std::min<std::ptrdiff_t>(x0 + static_cast<std::ptrdiff_t>(size), static_cast<std::ptrdiff_t>(w)); ++x) {
        out[(ch * h + static_cast<std::size_t>(y)) * w + static_cast<std::size_t>(x)] = 0;
      }
    }
  }
  return out;
}

}  // namespace tess
