#include "rtdenoise/keyframe_denoiser.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <vector>

#include "rtdenoise/filters.hpp"

namespace rtdenoise {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

void CascadeParams::validate() const {
  if (!(bilateral_spatial_sigma > 0.0) || !(bilateral_range_factor > 0.0) ||
      !(gaussian_divisor > 0.0) || !(gaussian_min > 0.0) || gaussian_max < gaussian_min) {
    throw std::invalid_argument("image_denoiser: sigmas must be positive");
  }
  if (fusion_tau && *fusion_tau < 0.0) {
    throw std::invalid_argument("image_denoiser: fusion_tau must be >= 0");
  }
  if (window_radius < 1) {
    throw std::invalid_argument("image_denoiser: window_radius must be >= 1");
  }
}

double CascadeParams::smooth_sigma(double sigma_est) const {
  return std::clamp(sigma_est / gaussian_divisor, gaussian_min, gaussian_max);
}

double CascadeParams::tau(double sigma_est) const {
  return fusion_tau.value_or(sigma_est);
}

Frame stage_detail(const Frame& frame, double sigma_est, const CascadeParams& params) {
  if (sigma_est < kPassthroughSigma) return frame;
  const double range_sigma =
      params.bilateral_range_factor * std::max(sigma_est, kPassthroughSigma);
  return bilateral_filter(frame, params.bilateral_spatial_sigma, range_sigma,
                          params.window_radius);
}

Frame stage_smooth(const Frame& frame, double sigma_est, const CascadeParams& params) {
  return gaussian_blur(frame, params.smooth_sigma(sigma_est));
}

Frame stage_fuse(const Frame& detail_out, const Frame& smooth_out, double sigma_est,
                 const CascadeParams& params) {
  if (detail_out.width() != smooth_out.width() ||
      detail_out.height() != smooth_out.height()) {
    throw std::invalid_argument("stage_fuse: input dimensions differ");
  }
  const double tau = params.tau(sigma_est);
  const std::vector<double> grad = gradient_magnitude(detail_out);
  const auto d = detail_out.luma();
  const auto s = smooth_out.luma();
  std::vector<std::uint8_t> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double g = grad[i];
    const double w = g + tau > 0.0 ? g / (g + tau) : 0.0;
    out[i] = to_pixel(w * d[i] + (1.0 - w) * s[i]);
  }
  return detail_out.with_luma(std::move(out));
}

Frame denoise_keyframe(const Frame& frame, const NoiseEstimate& estimate,
                       const CascadeParams& params, KeyframeTiming* timing) {
  KeyframeTiming t;
  if (estimate.sigma < kPassthroughSigma) {
    if (timing) *timing = t;
    return frame;
  }
  auto start = std::chrono::steady_clock::now();
  const Frame detail = stage_detail(frame, estimate.sigma, params);
  t.detail_ms = elapsed_ms(start);
  start = std::chrono::steady_clock::now();
  const Frame smooth = stage_smooth(frame, estimate.sigma, params);
  t.smooth_ms = elapsed_ms(start);
  start = std::chrono::steady_clock::now();
  Frame fused = stage_fuse(detail, smooth, estimate.sigma, params);
  t.fuse_ms = elapsed_ms(start);
  if (timing) *timing = t;
  return fused;
}

}  // namespace rtdenoise
