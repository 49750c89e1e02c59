#include "rtdenoise/conv_net.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "rtdenoise/errors.hpp"
#include "rtdenoise/image_io.hpp"

namespace rtdenoise {

namespace {

constexpr char kMagic[4] = {'C', 'W', 'B', '1'};

static_assert(std::numeric_limits<float>::is_iec559, "IEEE-754 floats required");

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError("truncated weight file", pos_);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

}  // namespace

ConvWeightSet ConvWeightSet::zeros() {
  ConvWeightSet ws;
  for (std::size_t l = 0; l < 3; ++l) {
    auto& layer = ws.layers[l];
    layer.in_channels = kShapes[l][0];
    layer.out_channels = kShapes[l][1];
    layer.kernel.assign(static_cast<std::size_t>(layer.in_channels) * layer.out_channels * 9, 0.f);
    layer.bias.assign(layer.out_channels, 0.f);
  }
  return ws;
}

void ConvWeightSet::validate() const {
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& layer = layers[l];
    if (layer.in_channels != kShapes[l][0] || layer.out_channels != kShapes[l][1]) {
      throw FormatError("layer " + std::to_string(l + 1) + " has shape " +
                        std::to_string(layer.in_channels) + "->" +
                        std::to_string(layer.out_channels) + ", expected " +
                        std::to_string(kShapes[l][0]) + "->" + std::to_string(kShapes[l][1]));
    }
    if (layer.kernel.size() != static_cast<std::size_t>(layer.in_channels) * layer.out_channels * 9 ||
        layer.bias.size() != layer.out_channels) {
      throw FormatError("layer " + std::to_string(l + 1) + " tensor sizes do not match its shape");
    }
  }
}

ConvWeightSet read_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("missing CWB1 magic", 0);
  }
  if (bytes.size() < 8) throw FormatError("truncated weight file", bytes.size());
  Reader r(bytes.subspan(4));
  ConvWeightSet ws;
  for (std::size_t l = 0; l < 3; ++l) {
    auto& layer = ws.layers[l];
    const std::size_t at = 4 + r.pos();
    layer.in_channels = r.u32();
    layer.out_channels = r.u32();
    if (layer.in_channels != ConvWeightSet::kShapes[l][0] ||
        layer.out_channels != ConvWeightSet::kShapes[l][1]) {
      throw FormatError("layer " + std::to_string(l + 1) + " declares shape " +
                            std::to_string(layer.in_channels) + "->" +
                            std::to_string(layer.out_channels),
                        at);
    }
    const std::size_t nk = static_cast<std::size_t>(layer.in_channels) * layer.out_channels * 9;
    r.need(4 * (nk + layer.out_channels));
    layer.kernel.resize(nk);
    for (auto& v : layer.kernel) v = r.f32();
    layer.bias.resize(layer.out_channels);
    for (auto& v : layer.bias) v = r.f32();
  }
  const std::size_t payload_end = 4 + r.pos();
  const std::uint32_t stored = r.u32();
  if (r.remaining() != 0) throw FormatError("trailing bytes after checksum", 4 + r.pos());
  const std::uint32_t actual = crc_of(bytes.data() + 4, payload_end - 4);
  if (stored != actual) throw FormatError("weight file checksum mismatch", payload_end);
  return ws;
}

ConvWeightSet load_weights(const std::filesystem::path& path) {
  return read_weights(read_file_bytes(path));
}

void write_weights(const ConvWeightSet& weights, std::ostream& out) {
  weights.validate();
  std::string payload;
  for (const auto& layer : weights.layers) {
    put_u32(payload, layer.in_channels);
    put_u32(payload, layer.out_channels);
    for (float v : layer.kernel) put_u32(payload, std::bit_cast<std::uint32_t>(v));
    for (float v : layer.bias) put_u32(payload, std::bit_cast<std::uint32_t>(v));
  }
  std::string crc;
  put_u32(crc, crc_of(reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()));
  out.write(kMagic, 4);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.write(crc.data(), 4);
  if (!out) throw std::runtime_error("failed to write weight file");
}

void save_weights(const ConvWeightSet& weights, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  write_weights(weights, out);
}

Tensor conv3x3(const Tensor& in, const ConvLayer& layer, bool relu) {
  if (static_cast<std::uint32_t>(in.channels) != layer.in_channels) {
    throw std::invalid_argument("conv3x3: channel count mismatch");
  }
  const int w = in.width;
  const int h = in.height;
  const int pw = w + 2;
  Tensor out(w, h, static_cast<int>(layer.out_channels));

  std::vector<double> padded(static_cast<std::size_t>(pw) * (h + 2) * in.channels);
  for (int c = 0; c < in.channels; ++c) {
    const double* src = in.plane(c);
    double* dst = padded.data() + static_cast<std::size_t>(c) * pw * (h + 2);
    for (int y = 0; y < h + 2; ++y) {
      const int sy = std::clamp(y - 1, 0, h - 1);
      for (int x = 0; x < pw; ++x) {
        dst[static_cast<std::size_t>(y) * pw + x] =
            src[static_cast<std::size_t>(sy) * w + std::clamp(x - 1, 0, w - 1)];
      }
    }
  }

  for (std::uint32_t o = 0; o < layer.out_channels; ++o) {
    double* acc = out.plane(static_cast<int>(o));
    std::fill(acc, acc + static_cast<std::size_t>(w) * h, static_cast<double>(layer.bias[o]));
    for (std::uint32_t i = 0; i < layer.in_channels; ++i) {
      const double* src = padded.data() + static_cast<std::size_t>(i) * pw * (h + 2);
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wgt = layer.weight(o, i, ky, kx);
          if (wgt == 0.0) continue;
          for (int y = 0; y < h; ++y) {
            const double* row = src + static_cast<std::size_t>(y + ky) * pw + kx;
            double* dst = acc + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) dst[x] += wgt * row[x];
          }
        }
      }
    }
    if (relu) {
      for (std::size_t k = 0; k < static_cast<std::size_t>(w) * h; ++k) acc[k] = std::max(acc[k], 0.0);
    }
  }
  return out;
}

Tensor conv_forward(const ConvWeightSet& weights, const Tensor& input) {
  const Tensor h1 = conv3x3(input, weights.layers[0], true);
  const Tensor h2 = conv3x3(h1, weights.layers[1], true);
  return conv3x3(h2, weights.layers[2], false);
}

}  // namespace rtdenoise
