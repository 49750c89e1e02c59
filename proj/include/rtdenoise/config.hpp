#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rtdenoise/analyzer.hpp"
#include "rtdenoise/channel.hpp"
#include "rtdenoise/keyframe_denoiser.hpp"
#include "rtdenoise/video_denoiser.hpp"

namespace rtdenoise {

enum class ExecutionMode { kSequential, kConcurrent };

struct PipelineConfig {
  // [pipeline] (also the implicit section before any header)
  double threshold = kDefaultForkThreshold;
  std::uint64_t seed = 1;
  ExecutionMode execution = ExecutionMode::kSequential;
  std::size_t queue_capacity = 8;
  // Frames per feedback message; 0 disables feedback.
  std::size_t feedback_window = 25;
  // Feedback covering frames up to e reaches the sender for frame e+1+delay.
  std::size_t feedback_delay = 2;
  // Reports carry runtime_ms = 0 so outputs are reproducible bit for bit.
  bool deterministic_timing = false;

  // [image_denoiser]
  CascadeParams image;
  // [video_denoiser]
  int cadence = kDefaultCadence;
  BlockParams video;
  std::string weights_path;
  // [analyzer]
  AnalyzerSettings analyzer;
  double min_delta_psnr = 0.5;
  // [sender], [loss]
  SenderConfig sender;
  LossModel loss;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
  FeedbackPolicy feedback_policy() const;
};

// `[section]` headers and `key = value` lines; `#` or `;` start comments.
// Unknown sections/keys, malformed values and range violations throw
// ConfigError("<source>:<line>: ..."). A relative weights path is resolved
// against `base_dir` and loaded when the video denoiser runs in conv mode.
PipelineConfig parse_config_text(std::string_view text, const std::string& source = "<config>",
                                 const std::filesystem::path& base_dir = {});
PipelineConfig parse_config(const std::filesystem::path& path);

// Every key with its effective value; parse_config_text(dump_config(c))
// reproduces c.
std::string dump_config(const PipelineConfig& config);

}  // namespace rtdenoise
