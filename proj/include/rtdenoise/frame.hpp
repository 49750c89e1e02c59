#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rtdenoise {

enum class ChromaFormat { kMono, k420 };

// One 8-bit planar picture. The luma plane is always present; 4:2:0 frames
// carry two chroma planes of ceil(w/2) x ceil(h/2).
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, ChromaFormat format = ChromaFormat::kMono,
        std::uint8_t fill = 0);
  Frame(int width, int height, std::vector<std::uint8_t> luma);
  Frame(int width, int height, std::vector<std::uint8_t> luma,
        std::vector<std::uint8_t> cb, std::vector<std::uint8_t> cr);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return luma_.size(); }
  ChromaFormat format() const { return format_; }
  bool has_chroma() const { return format_ == ChromaFormat::k420; }
  int chroma_width() const { return (width_ + 1) / 2; }
  int chroma_height() const { return (height_ + 1) / 2; }

  std::span<const std::uint8_t> luma() const { return luma_; }
  std::span<std::uint8_t> luma() { return luma_; }
  std::span<const std::uint8_t> cb() const { return cb_; }
  std::span<std::uint8_t> cb() { return cb_; }
  std::span<const std::uint8_t> cr() const { return cr_; }
  std::span<std::uint8_t> cr() { return cr_; }

  std::uint8_t at(int x, int y) const {
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& at(int x, int y) {
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }
  // Replicate-clamped luma read.
  std::uint8_t clamped(int x, int y) const;

  // Same dimensions and chroma format.
  bool same_shape(const Frame& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           format_ == other.format_;
  }
  // Copy of this frame with the luma plane replaced; chroma is carried over.
  Frame with_luma(std::vector<std::uint8_t> luma) const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  ChromaFormat format_ = ChromaFormat::kMono;
  std::vector<std::uint8_t> luma_;
  std::vector<std::uint8_t> cb_;
  std::vector<std::uint8_t> cr_;
};

struct FrameRate {
  int num = 25;
  int den = 1;
  double fps() const { return static_cast<double>(num) / den; }
  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

// Ordered frames sharing one shape.
struct VideoSequence {
  std::vector<Frame> frames;
  FrameRate frame_rate;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  // Throws std::invalid_argument if frames disagree in shape.
  void validate() const;

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;
};

// min(max(i, 0), n - 1); throws std::invalid_argument when n == 0.
std::size_t clamp_index(std::int64_t i, std::size_t n);

// Rounds and clamps a real value into the 8-bit pixel range.
inline std::uint8_t to_pixel(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 254.5) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace rtdenoise
