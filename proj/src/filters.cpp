#include "rtdenoise/filters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rtdenoise {

RealPlane to_real(const Frame& frame) {
  RealPlane out(frame.width(), frame.height());
  const auto luma = frame.luma();
  std::copy(luma.begin(), luma.end(), out.data.begin());
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0) || radius < 0) {
    throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  }
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

RealPlane convolve_separable(const RealPlane& in, std::span<const double> kernel) {
  const int w = in.width;
  const int h = in.height;
  const int r = static_cast<int>(kernel.size() / 2);
  RealPlane tmp(w, h);
  std::vector<double> row(w + 2 * r);
  for (int y = 0; y < h; ++y) {
    const double* src = &in.data[static_cast<std::size_t>(y) * w];
    for (int i = 0; i < w + 2 * r; ++i) row[i] = src[std::clamp(i - r, 0, w - 1)];
    double* dst = &tmp.data[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * r; ++k) acc += kernel[k] * row[x + k];
      dst[x] = acc;
    }
  }
  RealPlane out(w, h);
  for (int y = 0; y < h; ++y) {
    double* dst = &out.data[static_cast<std::size_t>(y) * w];
    for (int k = 0; k <= 2 * r; ++k) {
      const int sy = std::clamp(y + k - r, 0, h - 1);
      const double* src = &tmp.data[static_cast<std::size_t>(sy) * w];
      const double c = kernel[k];
      for (int x = 0; x < w; ++x) dst[x] += c * src[x];
    }
  }
  return out;
}

Frame gaussian_blur(const Frame& frame, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto kernel = gaussian_kernel(sigma, radius);
  const RealPlane blurred = convolve_separable(to_real(frame), kernel);
  std::vector<std::uint8_t> luma(frame.pixel_count());
  for (std::size_t i = 0; i < luma.size(); ++i) luma[i] = to_pixel(blurred.data[i]);
  return frame.with_luma(std::move(luma));
}

Frame bilateral_filter(const Frame& frame, double spatial_sigma,
                       double range_sigma, int radius) {
  const int w = frame.width();
  const int h = frame.height();
  const int side = 2 * radius + 1;

  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial[(dy + radius) * side + dx + radius] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * spatial_sigma * spatial_sigma));
    }
  }
  // Pixel differences are integers, so the range kernel is a 256-entry table.
  std::array<double, 256> range{};
  for (int d = 0; d < 256; ++d) {
    range[d] = std::exp(-(static_cast<double>(d) * d) /
                        (2.0 * range_sigma * range_sigma));
  }

  // Replicate-padded copy keeps the inner loop branch-free.
  const int pw = w + 2 * radius;
  const int ph = h + 2 * radius;
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      padded[static_cast<std::size_t>(y) * pw + x] =
          frame.clamped(x - radius, y - radius);
    }
  }

  std::vector<std::uint8_t> out(frame.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int center = padded[static_cast<std::size_t>(y + radius) * pw + x + radius];
      double wsum = 0.0;
      double vsum = 0.0;
      for (int dy = 0; dy < side; ++dy) {
        const std::uint8_t* row = &padded[static_cast<std::size_t>(y + dy) * pw + x];
        const double* srow = &spatial[dy * side];
        for (int dx = 0; dx < side; ++dx) {
          const int v = row[dx];
          const double wgt = srow[dx] * range[std::abs(v - center)];
          wsum += wgt;
          vsum += wgt * v;
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = to_pixel(vsum / wsum);
    }
  }
  return frame.with_luma(std::move(out));
}

Frame median3x3(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<std::uint8_t> out(frame.pixel_count());
  std::array<std::uint8_t, 9> window{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) window[n++] = frame.clamped(x + dx, y + dy);
      }
      std::nth_element(window.begin(), window.begin() + 4, window.end());
      out[static_cast<std::size_t>(y) * w + x] = window[4];
    }
  }
  return frame.with_luma(std::move(out));
}

std::vector<double> gradient_magnitude(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<double> g(frame.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (frame.clamped(x + 1, y) - frame.clamped(x - 1, y));
      const double gy = 0.5 * (frame.clamped(x, y + 1) - frame.clamped(x, y - 1));
      g[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return g;
}

std::vector<std::uint8_t> resize_bilinear(std::span<const std::uint8_t> src,
                                          int src_w, int src_h, int dst_w,
                                          int dst_h) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(dst_w) * dst_h);
  const double sx = static_cast<double>(src_w) / dst_w;
  const double sy = static_cast<double>(src_h) / dst_h;
  auto px = [&](int x, int y) {
    return static_cast<double>(src[static_cast<std::size_t>(y) * src_w + x]);
  };
  for (int y = 0; y < dst_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src_h - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src_h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < dst_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src_w - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src_w - 1);
      const double tx = fx - x0;
      const double top = px(x0, y0) * (1 - tx) + px(x1, y0) * tx;
      const double bottom = px(x0, y1) * (1 - tx) + px(x1, y1) * tx;
      out[static_cast<std::size_t>(y) * dst_w + x] =
          to_pixel(top * (1 - ty) + bottom * ty);
    }
  }
  return out;
}

}  // namespace rtdenoise
