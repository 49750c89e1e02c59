#pragma once

#include <optional>

#include "rtdenoise/frame.hpp"
#include "rtdenoise/noise_detector.hpp"

namespace rtdenoise {

// Three-stage keyframe cascade: a detail-preserving bilateral stage and a
// noise-scaled Gaussian stage run on the same input, and a fusion stage
// blends them per pixel by the detail output's local gradient.
struct CascadeParams {
  double bilateral_spatial_sigma = 2.0;
  double bilateral_range_factor = 2.0;
  // sigma_g = clamp(sigma_est / gaussian_divisor, gaussian_min, gaussian_max)
  double gaussian_divisor = 20.0;
  double gaussian_min = 0.5;
  double gaussian_max = 2.5;
  // Gradient softness; unset means "use sigma_est".
  std::optional<double> fusion_tau = std::nullopt;
  int window_radius = 3;

  void validate() const;
  double smooth_sigma(double sigma_est) const;
  double tau(double sigma_est) const;
};

// Below this estimate every stage is a passthrough.
inline constexpr double kPassthroughSigma = 0.5;

Frame stage_detail(const Frame& frame, double sigma_est, const CascadeParams& params);
Frame stage_smooth(const Frame& frame, double sigma_est, const CascadeParams& params);
Frame stage_fuse(const Frame& detail_out, const Frame& smooth_out, double sigma_est,
                 const CascadeParams& params);

struct KeyframeTiming {
  double detail_ms = 0.0;
  double smooth_ms = 0.0;
  double fuse_ms = 0.0;
};

Frame denoise_keyframe(const Frame& frame, const NoiseEstimate& estimate,
                       const CascadeParams& params, KeyframeTiming* timing = nullptr);

}  // namespace rtdenoise
