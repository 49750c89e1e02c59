#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace rtdenoise {

// One 3x3 convolution layer. Kernel layout is [out][in][ky][kx].
struct ConvLayer {
  std::uint32_t in_channels = 0;
  std::uint32_t out_channels = 0;
  std::vector<float> kernel;
  std::vector<float> bias;

  float weight(std::uint32_t o, std::uint32_t i, int ky, int kx) const {
    return kernel[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) * 3 + kx];
  }
};

// Residual surrogate for a temporal denoising block:
// 4 -> 16 -> 16 -> 1 channels, rectifiers between layers.
struct ConvWeightSet {
  static constexpr std::array<std::array<std::uint32_t, 2>, 3> kShapes{
      {{4, 16}, {16, 16}, {16, 1}}};

  std::array<ConvLayer, 3> layers;

  static ConvWeightSet zeros();
  // Throws FormatError if any layer deviates from kShapes.
  void validate() const;
};

// File layout: "CWB1", then per layer u32 in, u32 out, out*in*9 kernel floats,
// out bias floats (all little-endian), then CRC-32 (zlib polynomial) of every
// byte between the magic and the checksum.
ConvWeightSet read_weights(std::span<const std::uint8_t> bytes);
ConvWeightSet load_weights(const std::filesystem::path& path);
void write_weights(const ConvWeightSet& weights, std::ostream& out);
void save_weights(const ConvWeightSet& weights, const std::filesystem::path& path);

// Channel-major planar tensor.
struct Tensor {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, 0.0) {}
  double* plane(int c) { return data.data() + static_cast<std::size_t>(c) * width * height; }
  const double* plane(int c) const {
    return data.data() + static_cast<std::size_t>(c) * width * height;
  }
};

// 3x3 convolution, replicate padding, optional rectifier on the output.
Tensor conv3x3(const Tensor& in, const ConvLayer& layer, bool relu);

// Full three-layer forward pass; returns the single-channel residual.
Tensor conv_forward(const ConvWeightSet& weights, const Tensor& input);

}  // namespace rtdenoise
