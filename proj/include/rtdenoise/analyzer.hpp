#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rtdenoise/feedback.hpp"
#include "rtdenoise/frame.hpp"
#include "rtdenoise/noise_detector.hpp"

namespace rtdenoise {

enum class ReferenceMode { kSender, kNone };
std::string_view to_string(ReferenceMode m);

struct ScoreWeights {
  double psnr = 0.4;
  double ssim = 0.4;
  double runtime = 0.2;
};

struct AnalyzerSettings {
  ScoreWeights weights;
  double budget_ms = 40.0;
  // When false only PSNR and SSIM are computed (MS-SSIM and VIFp left empty).
  bool full_metrics = true;

  void validate() const;
};

// Per-frame analyzer output. Metric pairs compare the received ("noisy") and
// pipeline output ("denoised") frames against the sender's frame; they are
// empty when no reference is available.
struct AnalyzerReport {
  std::size_t frame_index = 0;
  ReferenceMode reference_mode = ReferenceMode::kNone;
  Route route = Route::kBypass;
  double sigma = 0.0;
  std::optional<double> psnr_noisy, psnr_denoised;
  std::optional<double> ssim_noisy, ssim_denoised;
  std::optional<double> ms_ssim_noisy, ms_ssim_denoised;
  std::optional<double> vifp_noisy, vifp_denoised;
  std::optional<double> detail_retention;
  std::optional<double> delta_psnr, delta_ssim;
  double sigma_before = 0.0;
  double sigma_after = 0.0;
  double delta_sigma = 0.0;
  double runtime_ms = 0.0;
  double score = 0.0;

  friend bool operator==(const AnalyzerReport&, const AnalyzerReport&) = default;
};

// S = w_p clamp(dPSNR/10, 0, 1) + w_s clamp(dSSIM/0.1, 0, 1) - w_t runtime/budget
double performance_score(double delta_psnr, double delta_ssim, double runtime_ms,
                         double budget_ms, const ScoreWeights& weights = {});

// With a reference, fills every metric pair whose window fits the frame;
// without one only the sigma fields and the score are meaningful.
AnalyzerReport analyze_frame(std::size_t frame_index, const Frame* reference,
                             const Frame& received, const Frame& denoised, Route route,
                             double sigma, double runtime_ms,
                             const AnalyzerSettings& settings);

struct FeedbackPolicy {
  double fork_threshold = kDefaultForkThreshold;
  double budget_ms = 40.0;
  double min_delta_psnr = 0.5;
};

// Means over the window, then: runtime > 2 budget -> LOWER_FRAMERATE;
// runtime > budget -> LOWER_RESOLUTION; dPSNR < 0.5 dB with sigma at or
// above the fork threshold -> RAISE_BITRATE; otherwise NONE.
FeedbackMessage make_feedback(std::span<const AnalyzerReport> reports,
                              const FeedbackPolicy& policy);

// One JSON object per line, field names as in the structs.
std::string to_json_line(const AnalyzerReport& report);
std::string to_json_line(const FeedbackMessage& message);

}  // namespace rtdenoise
