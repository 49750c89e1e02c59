#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace rtdenoise {

enum class Recommendation { kNone, kRaiseBitrate, kLowerResolution, kLowerFramerate };

std::string_view to_string(Recommendation r);
std::optional<Recommendation> recommendation_from_string(std::string_view s);

// Analyzer -> sender record summarising one window of frame reports.
struct FeedbackMessage {
  std::size_t window_start = 0;
  std::size_t window_end = 0;
  double mean_delta_psnr = 0.0;
  double mean_delta_ssim = 0.0;
  double mean_runtime_ms = 0.0;
  double mean_sigma = 0.0;
  Recommendation recommendation = Recommendation::kNone;

  friend bool operator==(const FeedbackMessage&,
                         const FeedbackMessage&) = default;
};

}  // namespace rtdenoise
