#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtdenoise/frame.hpp"

namespace rtdenoise {

// Real-valued single-channel image used inside filters and metrics.
struct RealPlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RealPlane() = default;
  RealPlane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

RealPlane to_real(const Frame& frame);

// Sampled Gaussian exp(-x^2 / 2s^2) over [-radius, radius], normalised to 1.
std::vector<double> gaussian_kernel(double sigma, int radius);

// Separable convolution with replicate-padded borders, same-size output.
RealPlane convolve_separable(const RealPlane& in, std::span<const double> kernel);

// Separable Gaussian blur truncated at ceil(3 sigma), quantized to 8 bits.
Frame gaussian_blur(const Frame& frame, double sigma);

// Bilateral filter over a (2r+1)^2 window with replicate borders.
Frame bilateral_filter(const Frame& frame, double spatial_sigma,
                       double range_sigma, int radius);

Frame median3x3(const Frame& frame);

// |grad| from central differences ((p[x+1]-p[x-1])/2, same in y),
// replicate borders.
std::vector<double> gradient_magnitude(const Frame& frame);

// Bilinear resampling of the luma plane with pixel-centre alignment.
std::vector<std::uint8_t> resize_bilinear(std::span<const std::uint8_t> src,
                                          int src_w, int src_h, int dst_w,
                                          int dst_h);

}  // namespace rtdenoise
