#pragma once

#include <limits>

#include "rtdenoise/frame.hpp"

namespace rtdenoise {

// Full-reference quality metrics over the luma plane. All throw
// std::invalid_argument on dimension mismatch or frames too small for the
// metric's windows.

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

// 10 log10(255^2 / MSE); kInfinitePsnr when the frames are identical.
double psnr(const Frame& ref, const Frame& test);

// 11x11 Gaussian window (sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2,
// mean over all window positions that fit inside the frame.
double ssim(const Frame& ref, const Frame& test);

// Five dyadic scales with weights (0.0448, 0.2856, 0.3001, 0.2363, 0.1333);
// contrast-structure terms at every scale but the coarsest, full SSIM there.
// Frames too small for five 11x11 scales use as many scales as fit, with the
// leading weights renormalised to sum to one.
double ms_ssim(const Frame& ref, const Frame& test);
int ms_ssim_scales(int width, int height);

// Smallest frame side each metric accepts.
inline constexpr int kSsimMinSize = 11;
inline constexpr int kVifpMinSize = 41;

// Pixel-domain VIF over four scales (Gaussian windows of 17, 9, 5, 3 taps,
// sigma = size/5, noise variance 2).
double vifp(const Frame& ref, const Frame& test);

// Mean over pixels of (2 g_r g_t + c) / (g_r^2 + g_t^2 + c) on central
// difference gradient magnitudes, c = 1e-4 * 255^2.
double detail_retention(const Frame& ref, const Frame& test);

}  // namespace rtdenoise
