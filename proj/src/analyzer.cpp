#include "rtdenoise/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rtdenoise/metrics.hpp"

namespace rtdenoise {

std::string_view to_string(ReferenceMode m) {
  return m == ReferenceMode::kSender ? "sender" : "none";
}

std::string_view to_string(Recommendation r) {
  switch (r) {
    case Recommendation::kNone: return "NONE";
    case Recommendation::kRaiseBitrate: return "RAISE_BITRATE";
    case Recommendation::kLowerResolution: return "LOWER_RESOLUTION";
    case Recommendation::kLowerFramerate: return "LOWER_FRAMERATE";
  }
  return "NONE";
}

std::optional<Recommendation> recommendation_from_string(std::string_view s) {
  for (auto r : {Recommendation::kNone, Recommendation::kRaiseBitrate,
                 Recommendation::kLowerResolution, Recommendation::kLowerFramerate}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

void AnalyzerSettings::validate() const {
  if (!(budget_ms > 0.0)) throw std::invalid_argument("analyzer: budget_ms must be > 0");
  if (weights.psnr < 0.0 || weights.ssim < 0.0 || weights.runtime < 0.0) {
    throw std::invalid_argument("analyzer: score weights must be >= 0");
  }
}

double performance_score(double delta_psnr, double delta_ssim, double runtime_ms,
                         double budget_ms, const ScoreWeights& weights) {
  if (!(budget_ms > 0.0)) throw std::invalid_argument("performance_score: budget_ms <= 0");
  return weights.psnr * std::clamp(delta_psnr / 10.0, 0.0, 1.0) +
         weights.ssim * std::clamp(delta_ssim / 0.1, 0.0, 1.0) -
         weights.runtime * (runtime_ms / budget_ms);
}

AnalyzerReport analyze_frame(std::size_t frame_index, const Frame* reference,
                             const Frame& received, const Frame& denoised, Route route,
                             double sigma, double runtime_ms,
                             const AnalyzerSettings& settings) {
  AnalyzerReport r;
  r.frame_index = frame_index;
  r.route = route;
  r.sigma = sigma;
  r.runtime_ms = runtime_ms;
  r.sigma_before = estimate_sigma(received);
  const bool unchanged = received == denoised;
  r.sigma_after = unchanged ? r.sigma_before : estimate_sigma(denoised);
  r.delta_sigma = r.sigma_before - r.sigma_after;

  if (reference != nullptr) {
    r.reference_mode = ReferenceMode::kSender;
    auto pair = [&](auto metric, std::optional<double>& noisy, std::optional<double>& out) {
      noisy = metric(*reference, received);
      out = unchanged ? *noisy : metric(*reference, denoised);
    };
    // Metrics whose windows do not fit the frame are left unset.
    const int side = std::min(received.width(), received.height());
    pair(psnr, r.psnr_noisy, r.psnr_denoised);
    if (side >= kSsimMinSize) pair(ssim, r.ssim_noisy, r.ssim_denoised);
    if (settings.full_metrics && side >= kSsimMinSize) pair(ms_ssim, r.ms_ssim_noisy, r.ms_ssim_denoised);
    if (settings.full_metrics && side >= kVifpMinSize) pair(vifp, r.vifp_noisy, r.vifp_denoised);
    r.detail_retention = detail_retention(*reference, denoised);
    if (std::isinf(*r.psnr_noisy) && std::isinf(*r.psnr_denoised)) {
      r.delta_psnr = 0.0;
    } else {
      r.delta_psnr = *r.psnr_denoised - *r.psnr_noisy;
    }
    if (r.ssim_noisy) r.delta_ssim = *r.ssim_denoised - *r.ssim_noisy;
  }
  const double dp = r.delta_psnr && std::isfinite(*r.delta_psnr) ? *r.delta_psnr : 0.0;
  r.score = performance_score(dp, r.delta_ssim.value_or(0.0), runtime_ms, settings.budget_ms,
                              settings.weights);
  return r;
}

FeedbackMessage make_feedback(std::span<const AnalyzerReport> reports,
                              const FeedbackPolicy& policy) {
  if (reports.empty()) throw std::invalid_argument("make_feedback: empty report window");
  FeedbackMessage m;
  m.window_start = reports.front().frame_index;
  m.window_end = reports.back().frame_index;
  double psnr_sum = 0.0;
  std::size_t psnr_n = 0;
  double ssim_sum = 0.0;
  std::size_t ssim_n = 0;
  double runtime_sum = 0.0;
  double sigma_sum = 0.0;
  for (const auto& r : reports) {
    if (r.delta_psnr && std::isfinite(*r.delta_psnr)) {
      psnr_sum += *r.delta_psnr;
      ++psnr_n;
    }
    if (r.delta_ssim) {
      ssim_sum += *r.delta_ssim;
      ++ssim_n;
    }
    runtime_sum += r.runtime_ms;
    sigma_sum += r.sigma;
  }
  const double n = static_cast<double>(reports.size());
  m.mean_delta_psnr = psnr_n ? psnr_sum / psnr_n : 0.0;
  m.mean_delta_ssim = ssim_n ? ssim_sum / ssim_n : 0.0;
  m.mean_runtime_ms = runtime_sum / n;
  m.mean_sigma = sigma_sum / n;

  if (m.mean_runtime_ms > 2.0 * policy.budget_ms) {
    m.recommendation = Recommendation::kLowerFramerate;
  } else if (m.mean_runtime_ms > policy.budget_ms) {
    m.recommendation = Recommendation::kLowerResolution;
  } else if (m.mean_delta_psnr < policy.min_delta_psnr &&
             m.mean_sigma >= policy.fork_threshold) {
    m.recommendation = Recommendation::kRaiseBitrate;
  } else {
    m.recommendation = Recommendation::kNone;
  }
  return m;
}

namespace {

nlohmann::json metric_value(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return *v;
}

}  // namespace

std::string to_json_line(const AnalyzerReport& r) {
  nlohmann::ordered_json j;
  j["frame_index"] = r.frame_index;
  j["reference_mode"] = to_string(r.reference_mode);
  j["route"] = to_string(r.route);
  j["sigma"] = r.sigma;
  j["psnr_noisy"] = metric_value(r.psnr_noisy);
  j["psnr_denoised"] = metric_value(r.psnr_denoised);
  j["ssim_noisy"] = metric_value(r.ssim_noisy);
  j["ssim_denoised"] = metric_value(r.ssim_denoised);
  j["ms_ssim_noisy"] = metric_value(r.ms_ssim_noisy);
  j["ms_ssim_denoised"] = metric_value(r.ms_ssim_denoised);
  j["vifp_noisy"] = metric_value(r.vifp_noisy);
  j["vifp_denoised"] = metric_value(r.vifp_denoised);
  j["detail_retention"] = metric_value(r.detail_retention);
  j["delta_psnr"] = metric_value(r.delta_psnr);
  j["delta_ssim"] = metric_value(r.delta_ssim);
  j["sigma_before"] = r.sigma_before;
  j["sigma_after"] = r.sigma_after;
  j["delta_sigma"] = r.delta_sigma;
  j["runtime_ms"] = r.runtime_ms;
  j["score"] = r.score;
  return j.dump();
}

std::string to_json_line(const FeedbackMessage& m) {
  nlohmann::ordered_json j;
  j["window_start"] = m.window_start;
  j["window_end"] = m.window_end;
  j["mean_delta_psnr"] = m.mean_delta_psnr;
  j["mean_delta_ssim"] = m.mean_delta_ssim;
  j["mean_runtime_ms"] = m.mean_runtime_ms;
  j["mean_sigma"] = m.mean_sigma;
  j["recommendation"] = to_string(m.recommendation);
  return j.dump();
}

}  // namespace rtdenoise
