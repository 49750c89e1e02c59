#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "rtdenoise/frame.hpp"

namespace rtdenoise {

enum class NoiseCategory {
  kClean,
  kGaussian,
  kSaltPepper,
  kSpeckleSignalDependent,
  kPixelationProcessed,
};

std::string_view to_string(NoiseCategory c);

using Histogram = std::array<std::uint64_t, 256>;

struct NoiseFeatures {
  double impulse_fraction = 0.0;
  double blockiness_ratio = 0.0;
  double mean_var_correlation = 0.0;
};

// Per-frame detector output. sigma is on the 0-255 scale.
struct NoiseEstimate {
  double sigma = 0.0;
  NoiseCategory category = NoiseCategory::kClean;
  double impulse_fraction = 0.0;
  double blockiness_ratio = 0.0;
  double mean_var_correlation = 0.0;
  Histogram histogram{};
};

enum class Route { kBypass, kDenoise };
std::string_view to_string(Route r);

struct ForkDecision {
  Route route = Route::kBypass;
  NoiseEstimate estimate;
  double threshold_used = 0.0;
};

inline constexpr double kDefaultForkThreshold = 20.0;

// Immerkaer's fast estimator: mean absolute response of the 3x3 kernel
// [1 -2 1; -2 4 -2; 1 -2 1] over interior pixels, scaled by sqrt(pi/2)/6.
// Needs at least 3x3 pixels.
double estimate_sigma(const Frame& frame);

NoiseFeatures noise_features(const Frame& frame);

// First match wins: impulses, block seams, mean/variance coupling,
// sigma >= 2, otherwise clean.
NoiseCategory classify_noise(const NoiseFeatures& features, double sigma);
NoiseCategory classify_noise(const Frame& frame, double sigma);

Histogram luma_histogram(const Frame& frame);

// sigma, category, features and histogram in one pass over the frame.
NoiseEstimate analyze_noise(const Frame& frame);

// Routes to DENOISE iff sigma >= threshold (ties denoise).
ForkDecision fork_decision(const NoiseEstimate& estimate,
                           double threshold = kDefaultForkThreshold);

}  // namespace rtdenoise
