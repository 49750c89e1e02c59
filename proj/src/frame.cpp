#include "rtdenoise/frame.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rtdenoise {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("frame dimensions must be positive, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
}

}  // namespace

Frame::Frame(int width, int height, ChromaFormat format, std::uint8_t fill)
    : width_(width), height_(height), format_(format) {
  check_dims(width, height);
  luma_.assign(static_cast<std::size_t>(width) * height, fill);
  if (format == ChromaFormat::k420) {
    const std::size_t n =
        static_cast<std::size_t>(chroma_width()) * chroma_height();
    cb_.assign(n, 128);
    cr_.assign(n, 128);
  }
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> luma)
    : width_(width), height_(height), luma_(std::move(luma)) {
  check_dims(width, height);
  if (luma_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("luma plane size does not match dimensions");
  }
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> luma,
             std::vector<std::uint8_t> cb, std::vector<std::uint8_t> cr)
    : width_(width),
      height_(height),
      format_(ChromaFormat::k420),
      luma_(std::move(luma)),
      cb_(std::move(cb)),
      cr_(std::move(cr)) {
  check_dims(width, height);
  if (luma_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("luma plane size does not match dimensions");
  }
  const std::size_t n =
      static_cast<std::size_t>(chroma_width()) * chroma_height();
  if (cb_.size() != n || cr_.size() != n) {
    throw std::invalid_argument("chroma plane size does not match dimensions");
  }
}

std::uint8_t Frame::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return luma_[static_cast<std::size_t>(y) * width_ + x];
}

Frame Frame::with_luma(std::vector<std::uint8_t> luma) const {
  if (luma.size() != luma_.size()) {
    throw std::invalid_argument("replacement luma plane has wrong size");
  }
  Frame out = *this;
  out.luma_ = std::move(luma);
  return out;
}

void VideoSequence::validate() const {
  if (frame_rate.num <= 0 || frame_rate.den <= 0) {
    throw std::invalid_argument("frame rate must be positive");
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!frames[i].same_shape(frames[0])) {
      throw std::invalid_argument("frame " + std::to_string(i) +
                                  " differs in shape from frame 0");
    }
  }
}

std::size_t clamp_index(std::int64_t i, std::size_t n) {
  if (n == 0) throw std::invalid_argument("clamp_index: empty sequence");
  if (i <= 0) return 0;
  const auto u = static_cast<std::size_t>(i);
  return u >= n ? n - 1 : u;
}

}  // namespace rtdenoise
