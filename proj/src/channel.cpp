#include "rtdenoise/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rtdenoise/filters.hpp"
#include "rtdenoise/random.hpp"

namespace rtdenoise {

double scale_factor(ResolutionScale s) {
  switch (s) {
    case ResolutionScale::kHalf: return 0.5;
    case ResolutionScale::kThreeQuarters: return 0.75;
    case ResolutionScale::kFull: return 1.0;
  }
  return 1.0;
}

std::string_view to_string(ResolutionScale s) {
  switch (s) {
    case ResolutionScale::kHalf: return "1/2";
    case ResolutionScale::kThreeQuarters: return "3/4";
    case ResolutionScale::kFull: return "1";
  }
  return "1";
}

std::optional<ResolutionScale> resolution_scale_from_string(std::string_view s) {
  if (s == "1" || s == "1/1" || s == "1.0") return ResolutionScale::kFull;
  if (s == "3/4" || s == "0.75") return ResolutionScale::kThreeQuarters;
  if (s == "1/2" || s == "0.5") return ResolutionScale::kHalf;
  return std::nullopt;
}

void SenderConfig::validate() const {
  if (q_min < 1 || q_max > 64 || q_min > q_max) {
    throw std::invalid_argument("sender: need 1 <= q_min <= q_max <= 64");
  }
  if (quant_step < q_min || quant_step > q_max) {
    throw std::invalid_argument("sender: quant_step " + std::to_string(quant_step) +
                                " outside [q_min, q_max]");
  }
  if (framerate_divisor < 1) {
    throw std::invalid_argument("sender: framerate_divisor must be >= 1");
  }
}

void LossModel::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string("loss: ") + name + " must be in [0,1]");
    }
  };
  prob(p_loss, "p_loss");
  prob(p_good_bad, "p_good_bad");
  prob(p_bad_good, "p_bad_good");
  prob(p_loss_bad, "p_loss_bad");
  if (slice_height < 1) throw std::invalid_argument("loss: slice_height must be >= 1");
}

LossChannel::LossChannel(const LossModel& model) : model_(model), engine_(model.seed) {
  model_.validate();
}

bool LossChannel::next_slice_lost() {
  auto draw = [this] { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; };
  if (model_.kind == LossKind::kBernoulli) return draw() < model_.p_loss;
  const bool lost = bad_ && draw() < model_.p_loss_bad;
  const double u = draw();
  bad_ = bad_ ? !(u < model_.p_bad_good) : u < model_.p_good_bad;
  return lost;
}

namespace {

template <typename PixelFn>
Frame map_luma(const Frame& frame, PixelFn&& fn) {
  std::vector<std::uint8_t> luma(frame.luma().begin(), frame.luma().end());
  for (auto& v : luma) v = fn(v);
  return frame.with_luma(std::move(luma));
}

using Block = std::array<double, 64>;

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> c{};
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        c[u * 8 + x] = alpha * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return c;
  }();
  return basis;
}

// out = C * in * C^T  (forward) or C^T * in * C (inverse).
Block dct8x8(const Block& in, bool inverse) {
  const auto& c = dct_basis();
  Block tmp{};
  Block out{};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) {
        acc += (inverse ? c[k * 8 + i] : c[i * 8 + k]) * in[k * 8 + j];
      }
      tmp[i * 8 + j] = acc;
    }
  }
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) {
        acc += tmp[i * 8 + k] * (inverse ? c[k * 8 + j] : c[j * 8 + k]);
      }
      out[i * 8 + j] = acc;
    }
  }
  return out;
}

}  // namespace

Frame add_gaussian_noise(const Frame& frame, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma < 0");
  if (sigma == 0.0) return frame;
  Rng rng(seed);
  return map_luma(frame, [&](std::uint8_t v) { return to_pixel(v + sigma * rng.normal()); });
}

Frame add_salt_pepper(const Frame& frame, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) {
    throw std::invalid_argument("add_salt_pepper: density outside [0,1]");
  }
  if (density == 0.0) return frame;
  Rng rng(seed);
  return map_luma(frame, [&](std::uint8_t v) -> std::uint8_t {
    if (rng.uniform01() < density) return rng.coin() ? 255 : 0;
    return v;
  });
}

Frame add_speckle(const Frame& frame, double sigma_mult, std::uint64_t seed) {
  if (sigma_mult < 0.0) throw std::invalid_argument("add_speckle: sigma_mult < 0");
  if (sigma_mult == 0.0) return frame;
  Rng rng(seed);
  return map_luma(frame, [&](std::uint8_t v) {
    return to_pixel(v * (1.0 + sigma_mult * rng.normal()));
  });
}

Frame encode_decode(const Frame& frame, const SenderConfig& config) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<std::uint8_t> luma(frame.luma().begin(), frame.luma().end());

  const double s = scale_factor(config.resolution_scale);
  if (s < 1.0) {
    const int dw = std::max(1, static_cast<int>(std::lround(w * s)));
    const int dh = std::max(1, static_cast<int>(std::lround(h * s)));
    const auto small = resize_bilinear(luma, w, h, dw, dh);
    luma = resize_bilinear(small, dw, dh, w, h);
  }

  const double q = config.quant_step;
  std::vector<std::uint8_t> out(luma.size());
  Block block{};
  for (int by = 0; by < h; by += 8) {
    for (int bx = 0; bx < w; bx += 8) {
      for (int y = 0; y < 8; ++y) {
        const int sy = std::min(by + y, h - 1);
        for (int x = 0; x < 8; ++x) {
          const int sx = std::min(bx + x, w - 1);
          block[y * 8 + x] = luma[static_cast<std::size_t>(sy) * w + sx];
        }
      }
      Block coeffs = dct8x8(block, false);
      for (double& c : coeffs) c = std::round(c / q) * q;
      const Block recon = dct8x8(coeffs, true);
      for (int y = 0; y < 8 && by + y < h; ++y) {
        for (int x = 0; x < 8 && bx + x < w; ++x) {
          out[static_cast<std::size_t>(by + y) * w + bx + x] = to_pixel(recon[y * 8 + x]);
        }
      }
    }
  }
  return frame.with_luma(std::move(out));
}

TransmitResult transmit(const Frame& frame, const Frame* prev_decoded,
                        LossChannel& channel) {
  if (prev_decoded != nullptr && !prev_decoded->same_shape(frame)) {
    throw std::invalid_argument("transmit: previous frame has a different shape");
  }
  TransmitResult result{frame, {}};
  Frame& out = result.frame;
  const int w = frame.width();
  const int h = frame.height();
  const int sh = channel.model().slice_height;
  const int slices = (h + sh - 1) / sh;

  auto conceal_rows = [&](std::span<std::uint8_t> dst,
                          std::span<const std::uint8_t> prev, int width,
                          int y0, int y1) {
    const auto begin = static_cast<std::size_t>(y0) * width;
    const auto end = static_cast<std::size_t>(y1) * width;
    if (prev.empty()) {
      std::fill(dst.begin() + begin, dst.begin() + end, std::uint8_t{128});
    } else {
      std::copy(prev.begin() + begin, prev.begin() + end, dst.begin() + begin);
    }
  };

  for (int i = 0; i < slices; ++i) {
    if (!channel.next_slice_lost()) continue;
    result.lost_slices.push_back(i);
    const int y0 = i * sh;
    const int y1 = std::min(h, y0 + sh);
    conceal_rows(out.luma(), prev_decoded ? prev_decoded->luma() : std::span<const std::uint8_t>{},
                 w, y0, y1);
    if (out.has_chroma()) {
      const int cy0 = y0 / 2;
      const int cy1 = std::min(out.chroma_height(), (y1 + 1) / 2);
      const int cw = out.chroma_width();
      conceal_rows(out.cb(), prev_decoded ? prev_decoded->cb() : std::span<const std::uint8_t>{},
                   cw, cy0, cy1);
      conceal_rows(out.cr(), prev_decoded ? prev_decoded->cr() : std::span<const std::uint8_t>{},
                   cw, cy0, cy1);
    }
  }
  return result;
}

SenderConfig sender_step(const SenderConfig& config, const FeedbackMessage& feedback) {
  SenderConfig next = config;
  switch (feedback.recommendation) {
    case Recommendation::kNone:
      break;
    case Recommendation::kRaiseBitrate:
      if (config.quant_step > config.q_min) {
        next.quant_step = std::max(config.quant_step - 4, config.q_min);
      } else if (config.resolution_scale == ResolutionScale::kHalf) {
        next.resolution_scale = ResolutionScale::kThreeQuarters;
      } else if (config.resolution_scale == ResolutionScale::kThreeQuarters) {
        next.resolution_scale = ResolutionScale::kFull;
      }
      break;
    case Recommendation::kLowerResolution:
      if (config.resolution_scale == ResolutionScale::kFull) {
        next.resolution_scale = ResolutionScale::kThreeQuarters;
      } else if (config.resolution_scale == ResolutionScale::kThreeQuarters) {
        next.resolution_scale = ResolutionScale::kHalf;
      }
      break;
    case Recommendation::kLowerFramerate:
      if (config.framerate_divisor < 4) next.framerate_divisor = config.framerate_divisor + 1;
      break;
  }
  return next;
}

}  // namespace rtdenoise
