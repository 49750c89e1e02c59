#include "rtdenoise/video_denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace rtdenoise {

std::string_view to_string(BlockMode m) {
  return m == BlockMode::kConv ? "conv" : "classical";
}

WindowIndices window_for(std::size_t t, std::size_t n_frames) {
  WindowIndices w{};
  for (int k = 0; k < kWindowSize; ++k) {
    w[k] = clamp_index(static_cast<std::int64_t>(t) + k - kWindowSize / 2, n_frames);
  }
  return w;
}

WindowPlan schedule_windows(std::size_t n_frames, int cadence) {
  if (n_frames == 0) throw std::invalid_argument("schedule_windows: no frames");
  if (cadence < 2) throw std::invalid_argument("schedule_windows: cadence must be >= 2");
  WindowPlan plan;
  plan.cadence = cadence;
  plan.roles.resize(n_frames);
  plan.windows.resize(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    if (t % static_cast<std::size_t>(cadence) == 0) {
      plan.roles[t] = FrameRole::kKeyframe;
    } else {
      plan.roles[t] = FrameRole::kTemporal;
      plan.windows[t] = window_for(t, n_frames);
    }
  }
  return plan;
}

void BlockParams::validate() const {
  if (!(k_temporal > 0.0)) throw std::invalid_argument("video_denoiser: k_temporal must be > 0");
  spatial.validate();
  if (mode == BlockMode::kConv && !conv_weights) {
    throw std::invalid_argument("video_denoiser: conv mode requires loaded weights");
  }
  if (conv_weights) conv_weights->validate();
}

namespace {

void check_same_dims(const Frame& a, const Frame& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(what) + ": frame dimensions differ");
  }
}

Frame classical_block(const Frame& a, const Frame& b, const Frame& c, double sigma,
                      const BlockParams& params) {
  const double s = params.k_temporal * std::max(sigma, kPassthroughSigma);
  std::array<double, 256> weight{};
  for (int d = 0; d < 256; ++d) {
    weight[d] = std::exp(-(static_cast<double>(d) * d) / (2.0 * s * s));
  }
  const auto pa = a.luma();
  const auto pb = b.luma();
  const auto pc = c.luma();
  std::vector<std::uint8_t> out(pb.size());
  for (std::size_t i = 0; i < pb.size(); ++i) {
    const int vb = pb[i];
    const double wa = weight[std::abs(pa[i] - vb)];
    const double wc = weight[std::abs(pc[i] - vb)];
    out[i] = to_pixel((wa * pa[i] + vb + wc * pc[i]) / (wa + 1.0 + wc));
  }
  Frame temporal = b.with_luma(std::move(out));
  if (params.spatial_enabled && sigma >= kPassthroughSigma) {
    return stage_detail(temporal, sigma, params.spatial);
  }
  return temporal;
}

}  // namespace

Tensor conv_block_residual(const ConvWeightSet& weights, const Frame& a, const Frame& b,
                           const Frame& c, double sigma) {
  Tensor input(b.width(), b.height(), 4);
  const std::size_t n = b.pixel_count();
  const Frame* sources[3] = {&a, &b, &c};
  for (int ch = 0; ch < 3; ++ch) {
    const auto p = sources[ch]->luma();
    std::copy(p.begin(), p.end(), input.plane(ch));
  }
  std::fill(input.plane(3), input.plane(3) + n, sigma);
  return conv_forward(weights, input);
}

Frame denoise_block(const Frame& a, const Frame& b, const Frame& c, double sigma,
                    const BlockParams& params) {
  check_same_dims(a, b, "denoise_block");
  check_same_dims(c, b, "denoise_block");
  if (params.mode == BlockMode::kClassical) return classical_block(a, b, c, sigma, params);

  if (!params.conv_weights) {
    throw std::invalid_argument("denoise_block: conv mode without loaded weights");
  }
  const Tensor residual = conv_block_residual(*params.conv_weights, a, b, c, sigma);
  const auto pb = b.luma();
  std::vector<std::uint8_t> out(pb.size());
  for (std::size_t i = 0; i < pb.size(); ++i) out[i] = to_pixel(pb[i] + residual.data[i]);
  return b.with_luma(std::move(out));
}

Frame denoise_window(const FrameWindow& window, double sigma, const BlockParams& params) {
  for (const Frame* f : window) {
    if (f == nullptr) throw std::invalid_argument("denoise_window: missing frame");
  }
  const Frame d1 = denoise_block(*window[0], *window[1], *window[2], sigma, params);
  const Frame d2 = denoise_block(*window[1], *window[2], *window[3], sigma, params);
  const Frame d3 = denoise_block(*window[2], *window[3], *window[4], sigma, params);
  return denoise_block(d1, d2, d3, sigma, params);
}

Frame denoise_window(std::span<const Frame> window, double sigma, const BlockParams& params) {
  if (window.size() != kWindowSize) {
    throw std::invalid_argument("denoise_window: expected 5 frames, got " +
                                std::to_string(window.size()));
  }
  FrameWindow ptrs{};
  for (int k = 0; k < kWindowSize; ++k) ptrs[k] = &window[k];
  return denoise_window(ptrs, sigma, params);
}

FrameWindow assemble_window(const WindowPlan& plan, std::size_t t,
                            std::span<const Frame> frames,
                            const std::map<std::size_t, Frame>& keyframe_outputs) {
  if (!plan.windows.at(t)) {
    throw std::invalid_argument("assemble_window: frame " + std::to_string(t) +
                                " is not a temporal frame");
  }
  FrameWindow window{};
  const WindowIndices& idx = *plan.windows[t];
  for (int k = 0; k < kWindowSize; ++k) {
    const std::size_t j = idx[k];
    const auto it = plan.is_keyframe(j) ? keyframe_outputs.find(j) : keyframe_outputs.end();
    window[k] = it != keyframe_outputs.end() ? &it->second : &frames[j];
  }
  return window;
}

VideoSequence denoise_stream(const VideoSequence& frames,
                             const std::map<std::size_t, Frame>& keyframe_outputs,
                             const std::map<std::size_t, double>& sigma_per_keyframe,
                             const WindowPlan& plan, const BlockParams& params) {
  if (plan.size() != frames.size()) {
    throw std::invalid_argument("denoise_stream: plan covers " + std::to_string(plan.size()) +
                                " frames, sequence has " + std::to_string(frames.size()));
  }
  VideoSequence out;
  out.frame_rate = frames.frame_rate;
  out.frames.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (plan.is_keyframe(t)) {
      const auto it = keyframe_outputs.find(t);
      if (it == keyframe_outputs.end()) {
        throw std::invalid_argument("denoise_stream: missing output for keyframe " +
                                    std::to_string(t));
      }
      out.frames.push_back(it->second);
      continue;
    }
    const std::size_t key = plan.cohort_keyframe(t);
    const auto sigma = sigma_per_keyframe.find(key);
    if (sigma == sigma_per_keyframe.end()) {
      throw std::invalid_argument("denoise_stream: missing sigma for keyframe " +
                                  std::to_string(key));
    }
    const FrameWindow window = assemble_window(plan, t, frames.frames, keyframe_outputs);
    out.frames.push_back(denoise_window(window, sigma->second, params));
  }
  return out;
}

}  // namespace rtdenoise
