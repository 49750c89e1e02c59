#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rtdenoise/conv_net.hpp"
#include "rtdenoise/frame.hpp"
#include "rtdenoise/keyframe_denoiser.hpp"

namespace rtdenoise {

enum class FrameRole { kKeyframe, kTemporal };

inline constexpr int kWindowSize = 5;
inline constexpr int kDefaultCadence = 5;

using WindowIndices = std::array<std::size_t, kWindowSize>;

// Role of every frame plus the clamped 5-frame window of each temporal frame.
struct WindowPlan {
  int cadence = kDefaultCadence;
  std::vector<FrameRole> roles;
  std::vector<std::optional<WindowIndices>> windows;

  std::size_t size() const { return roles.size(); }
  bool is_keyframe(std::size_t t) const { return roles[t] == FrameRole::kKeyframe; }
  // Index of the keyframe that opens t's cohort.
  std::size_t cohort_keyframe(std::size_t t) const { return t - t % cadence; }
};

WindowPlan schedule_windows(std::size_t n_frames, int cadence = kDefaultCadence);
WindowIndices window_for(std::size_t t, std::size_t n_frames);

enum class BlockMode { kClassical, kConv };
std::string_view to_string(BlockMode m);

struct BlockParams {
  BlockMode mode = BlockMode::kClassical;
  double k_temporal = 1.0;
  bool spatial_enabled = true;
  // Kernel for the post-temporal spatial pass (stage_detail, 3x3 by default).
  CascadeParams spatial{.window_radius = 1};
  std::shared_ptr<const ConvWeightSet> conv_weights;

  void validate() const;
};

// Three frames in, denoised centre frame out.
Frame denoise_block(const Frame& a, const Frame& b, const Frame& c, double sigma,
                    const BlockParams& params);

// Residual of the CONV block before rounding, exposed for verification.
Tensor conv_block_residual(const ConvWeightSet& weights, const Frame& a, const Frame& b,
                           const Frame& c, double sigma);

using FrameWindow = std::array<const Frame*, kWindowSize>;

// Two-step cascade: blocks over (1,2,3), (2,3,4), (3,4,5) sharing one
// parameter set, then a fourth block over their outputs.
Frame denoise_window(const FrameWindow& window, double sigma, const BlockParams& params);
Frame denoise_window(std::span<const Frame> window, double sigma, const BlockParams& params);

// Assembles the window for temporal frame t: keyframe positions take the
// denoised keyframe when one is supplied, other positions the received frame.
FrameWindow assemble_window(const WindowPlan& plan, std::size_t t,
                            std::span<const Frame> frames,
                            const std::map<std::size_t, Frame>& keyframe_outputs);

VideoSequence denoise_stream(const VideoSequence& frames,
                             const std::map<std::size_t, Frame>& keyframe_outputs,
                             const std::map<std::size_t, double>& sigma_per_keyframe,
                             const WindowPlan& plan, const BlockParams& params);

}  // namespace rtdenoise
