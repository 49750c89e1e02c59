#include "rtdenoise/noise_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rtdenoise {

std::string_view to_string(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::kClean: return "CLEAN";
    case NoiseCategory::kGaussian: return "GAUSSIAN";
    case NoiseCategory::kSaltPepper: return "SALT_PEPPER";
    case NoiseCategory::kSpeckleSignalDependent: return "SPECKLE_SIGNAL_DEPENDENT";
    case NoiseCategory::kPixelationProcessed: return "PIXELATION_PROCESSED";
  }
  return "CLEAN";
}

std::string_view to_string(Route r) {
  return r == Route::kDenoise ? "DENOISE" : "BYPASS";
}

double estimate_sigma(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  if (w < 3 || h < 3) {
    throw std::invalid_argument("estimate_sigma: frame smaller than 3x3");
  }
  const auto p = frame.luma();
  std::int64_t total = 0;
  for (int y = 1; y < h - 1; ++y) {
    const std::uint8_t* up = &p[static_cast<std::size_t>(y - 1) * w];
    const std::uint8_t* mid = up + w;
    const std::uint8_t* down = mid + w;
    for (int x = 1; x < w - 1; ++x) {
      const int r = up[x - 1] - 2 * up[x] + up[x + 1]
                  - 2 * mid[x - 1] + 4 * mid[x] - 2 * mid[x + 1]
                  + down[x - 1] - 2 * down[x] + down[x + 1];
      total += std::abs(r);
    }
  }
  const double interior = 6.0 * (w - 2) * static_cast<double>(h - 2);
  return std::sqrt(std::numbers::pi / 2.0) * static_cast<double>(total) / interior;
}

NoiseFeatures noise_features(const Frame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  const auto p = frame.luma();
  NoiseFeatures f;

  std::size_t impulses = 0;
  for (std::uint8_t v : p) impulses += (v == 0 || v == 255);
  f.impulse_fraction = static_cast<double>(impulses) / p.size();

  // |p[x] - p[x-1]| at 8-column block boundaries versus everywhere else.
  double seam_sum = 0.0;
  double other_sum = 0.0;
  std::size_t seam_n = 0;
  std::size_t other_n = 0;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = &p[static_cast<std::size_t>(y) * w];
    for (int x = 1; x < w; ++x) {
      const int d = std::abs(row[x] - row[x - 1]);
      if (x % 8 == 0) {
        seam_sum += d;
        ++seam_n;
      } else {
        other_sum += d;
        ++other_n;
      }
    }
  }
  const double seam_mean = seam_n ? seam_sum / seam_n : 0.0;
  const double other_mean = other_n ? other_sum / other_n : 0.0;
  f.blockiness_ratio = seam_mean / std::max(other_mean, 1e-6);

  // Pearson correlation of tile means against tile variances (8x8 tiles).
  std::vector<double> means;
  std::vector<double> vars;
  for (int ty = 0; ty + 8 <= h; ty += 8) {
    for (int tx = 0; tx + 8 <= w; tx += 8) {
      double s = 0.0;
      double s2 = 0.0;
      for (int y = ty; y < ty + 8; ++y) {
        for (int x = tx; x < tx + 8; ++x) {
          const double v = p[static_cast<std::size_t>(y) * w + x];
          s += v;
          s2 += v * v;
        }
      }
      const double m = s / 64.0;
      means.push_back(m);
      vars.push_back(std::max(0.0, s2 / 64.0 - m * m));
    }
  }
  if (means.size() >= 2) {
    const double n = static_cast<double>(means.size());
    double mm = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      mm += means[i];
      mv += vars[i];
    }
    mm /= n;
    mv /= n;
    double cov = 0.0, sm = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      cov += (means[i] - mm) * (vars[i] - mv);
      sm += (means[i] - mm) * (means[i] - mm);
      sv += (vars[i] - mv) * (vars[i] - mv);
    }
    f.mean_var_correlation = (sm > 0.0 && sv > 0.0) ? cov / std::sqrt(sm * sv) : 0.0;
  }
  return f;
}

NoiseCategory classify_noise(const NoiseFeatures& f, double sigma) {
  if (f.impulse_fraction > 0.005) return NoiseCategory::kSaltPepper;
  if (f.blockiness_ratio > 1.5) return NoiseCategory::kPixelationProcessed;
  if (f.mean_var_correlation > 0.5) return NoiseCategory::kSpeckleSignalDependent;
  if (sigma >= 2.0) return NoiseCategory::kGaussian;
  return NoiseCategory::kClean;
}

NoiseCategory classify_noise(const Frame& frame, double sigma) {
  return classify_noise(noise_features(frame), sigma);
}

Histogram luma_histogram(const Frame& frame) {
  Histogram hist{};
  for (std::uint8_t v : frame.luma()) ++hist[v];
  return hist;
}

NoiseEstimate analyze_noise(const Frame& frame) {
  NoiseEstimate e;
  e.sigma = estimate_sigma(frame);
  const NoiseFeatures f = noise_features(frame);
  e.category = classify_noise(f, e.sigma);
  e.impulse_fraction = f.impulse_fraction;
  e.blockiness_ratio = f.blockiness_ratio;
  e.mean_var_correlation = f.mean_var_correlation;
  e.histogram = luma_histogram(frame);
  return e;
}

ForkDecision fork_decision(const NoiseEstimate& estimate, double threshold) {
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("fork_decision: threshold must be >= 0");
  }
  return ForkDecision{estimate.sigma >= threshold ? Route::kDenoise : Route::kBypass,
                      estimate, threshold};
}

}  // namespace rtdenoise
