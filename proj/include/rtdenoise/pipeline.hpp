#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rtdenoise/analyzer.hpp"
#include "rtdenoise/channel.hpp"
#include "rtdenoise/config.hpp"
#include "rtdenoise/feedback.hpp"
#include "rtdenoise/frame.hpp"

namespace rtdenoise {

// Receiver pipeline: detect -> fork -> keyframe denoise -> temporal denoise
// -> analyze, one fork decision per keyframe cohort (keyframe plus the
// following cadence-1 frames).
//
// Two execution modes produce identical frames, reports and feedback:
// sequential drives every stage in one thread; concurrent runs each stage in
// its own thread connected by bounded in-order queues.

struct PipelineStats {
  // Per frame, in frame order; detect time is charged to the frames that
  // needed it (keyframes, plus median pre-filtering in impulse cohorts).
  std::vector<double> detect_ms;
  std::vector<double> image_denoise_ms;
  std::vector<double> video_denoise_ms;
  std::vector<double> analyze_ms;
  std::vector<double> end_to_end_ms;
  std::size_t total_frames = 0;
  std::size_t frames_bypassed = 0;
  std::size_t frames_denoised = 0;
  double latency_mean_ms = 0.0;
  double latency_p95_ms = 0.0;
  double achieved_fps = 0.0;
  double wall_ms = 0.0;

  double mean_of(const std::vector<double>& v) const;
  std::string to_json() const;
};

struct DenoiseResult {
  VideoSequence output;
  std::vector<AnalyzerReport> reports;
  PipelineStats stats;
};

struct SenderTraceEntry {
  std::size_t frame_index = 0;
  int quant_step = 0;
  ResolutionScale resolution_scale = ResolutionScale::kFull;
  int framerate_divisor = 1;

  friend bool operator==(const SenderTraceEntry&, const SenderTraceEntry&) = default;
};

struct SimulateResult {
  VideoSequence received;
  VideoSequence denoised;
  std::vector<AnalyzerReport> reports;
  std::vector<FeedbackMessage> feedback_log;
  std::vector<SenderTraceEntry> sender_trace;
  PipelineStats stats;
};

DenoiseResult run_denoise(const VideoSequence& input, const PipelineConfig& config);

// Sender encode -> lossy channel -> receiver pipeline, with the clean frame
// as analyzer reference. Every feedback_window frames a FeedbackMessage is
// made and applied to the sender from frame window_end + 1 + feedback_delay.
SimulateResult run_simulate(const VideoSequence& clean, const PipelineConfig& config);

std::string to_json_line(const SenderTraceEntry& entry);

}  // namespace rtdenoise
