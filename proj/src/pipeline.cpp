#include "rtdenoise/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rtdenoise/bounded_queue.hpp"
#include "rtdenoise/filters.hpp"
#include "rtdenoise/keyframe_denoiser.hpp"
#include "rtdenoise/noise_detector.hpp"
#include "rtdenoise/video_denoiser.hpp"

namespace rtdenoise {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

struct FrameTiming {
  double detect_ms = 0.0;
  double image_denoise_ms = 0.0;
  double video_denoise_ms = 0.0;
  double analyze_ms = 0.0;
  double end_to_end_ms = 0.0;
};

// Everything the stages know about one frame.
struct WorkItem {
  std::size_t index = 0;
  Frame received;
  std::optional<Frame> prefiltered;  // median-filtered copy in impulse cohorts
  bool keyframe = false;
  Route route = Route::kBypass;
  double detected_sigma = 0.0;  // what the fork saw
  double denoise_sigma = 0.0;   // what the denoisers are conditioned on
  std::optional<Frame> keyframe_output;
  Frame output;
  FrameTiming timing;
  Clock::time_point entered;

  const Frame& denoiser_input() const { return prefiltered ? *prefiltered : received; }
};

// Analyzer -> sender channel. Messages are consumed in order.
class FeedbackBoard {
 public:
  void post(const FeedbackMessage& m) {
    std::lock_guard lock(mutex_);
    messages_.push_back(m);
    cv_.notify_all();
  }
  // Blocks until at least `count` messages exist; returns false when aborted.
  bool wait_for(std::size_t count, bool may_block) {
    std::unique_lock lock(mutex_);
    if (!may_block) return messages_.size() >= count;
    cv_.wait(lock, [&] { return messages_.size() >= count || aborted_; });
    return !aborted_;
  }
  FeedbackMessage at(std::size_t i) const {
    std::lock_guard lock(mutex_);
    return messages_.at(i);
  }
  std::vector<FeedbackMessage> all() const {
    std::lock_guard lock(mutex_);
    return messages_;
  }
  void abort() {
    std::lock_guard lock(mutex_);
    aborted_ = true;
    cv_.notify_all();
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<FeedbackMessage> messages_;
  bool aborted_ = false;
};

class Source {
 public:
  virtual ~Source() = default;
  virtual std::optional<WorkItem> produce(std::size_t t, bool may_block) = 0;
};

class SequenceSource final : public Source {
 public:
  explicit SequenceSource(const VideoSequence& input) : input_(input) {}
  std::optional<WorkItem> produce(std::size_t t, bool) override {
    WorkItem item;
    item.index = t;
    item.received = input_.frames[t];
    item.entered = Clock::now();
    return item;
  }

 private:
  const VideoSequence& input_;
};

// Sender encoder plus lossy channel. Frames skipped by the framerate divisor
// are never sent; the receiver repeats its last decoded frame for them.
class SenderSource final : public Source {
 public:
  SenderSource(const VideoSequence& clean, const PipelineConfig& config, FeedbackBoard& board)
      : clean_(clean), config_(config), board_(board), sender_(config.sender),
        channel_(config.loss) {
    trace_.push_back({0, sender_.quant_step, sender_.resolution_scale, sender_.framerate_divisor});
  }

  std::optional<WorkItem> produce(std::size_t t, bool may_block) override {
    const std::size_t due = feedback_due(t);
    if (due > applied_) {
      if (!board_.wait_for(due, may_block)) {
        if (!may_block) throw std::logic_error("sender: feedback not available in sequential order");
        return std::nullopt;
      }
      bool changed = false;
      for (; applied_ < due; ++applied_) {
        const SenderConfig next = sender_step(sender_, board_.at(applied_));
        changed |= !(next == sender_);
        sender_ = next;
      }
      if (changed) {
        trace_.push_back({t, sender_.quant_step, sender_.resolution_scale,
                          sender_.framerate_divisor});
      }
    }

    WorkItem item;
    item.index = t;
    const bool send = !last_received_ || t - last_sent_ >= static_cast<std::size_t>(sender_.framerate_divisor);
    if (send) {
      const Frame encoded = encode_decode(clean_.frames[t], sender_);
      TransmitResult tx = transmit(encoded, last_received_ ? &*last_received_ : nullptr, channel_);
      last_received_ = std::move(tx.frame);
      last_sent_ = t;
    }
    item.received = *last_received_;
    item.entered = Clock::now();
    return item;
  }

  const std::vector<SenderTraceEntry>& trace() const { return trace_; }

 private:
  // Number of complete feedback windows whose effect reaches frame t.
  std::size_t feedback_due(std::size_t t) const {
    const std::size_t k = config_.feedback_window;
    const std::size_t d = config_.feedback_delay;
    if (k == 0 || t < d + 1) return 0;
    return std::min((t - d) / k, clean_.size() / k);
  }

  const VideoSequence& clean_;
  const PipelineConfig& config_;
  FeedbackBoard& board_;
  SenderConfig sender_;
  LossChannel channel_;
  std::optional<Frame> last_received_;
  std::size_t last_sent_ = 0;
  std::size_t applied_ = 0;
  std::vector<SenderTraceEntry> trace_;
};

class DetectStage {
 public:
  explicit DetectStage(const PipelineConfig& config) : config_(config) {}

  WorkItem process(WorkItem item) {
    const auto start = Clock::now();
    item.keyframe = item.index % static_cast<std::size_t>(config_.cadence) == 0;
    if (item.keyframe) {
      const NoiseEstimate estimate = analyze_noise(item.received);
      const ForkDecision decision = fork_decision(estimate, config_.threshold);
      route_ = decision.route;
      detected_sigma_ = estimate.sigma;
      denoise_sigma_ = estimate.sigma;
      impulse_cohort_ =
          route_ == Route::kDenoise && estimate.category == NoiseCategory::kSaltPepper;
      if (impulse_cohort_) {
        item.prefiltered = median3x3(item.received);
        denoise_sigma_ = estimate_sigma(*item.prefiltered);
      }
    } else if (impulse_cohort_) {
      item.prefiltered = median3x3(item.received);
    }
    item.route = route_;
    item.detected_sigma = detected_sigma_;
    item.denoise_sigma = denoise_sigma_;
    item.timing.detect_ms = ms_since(start);
    return item;
  }

 private:
  const PipelineConfig& config_;
  Route route_ = Route::kBypass;
  double detected_sigma_ = 0.0;
  double denoise_sigma_ = 0.0;
  bool impulse_cohort_ = false;
};

class KeyframeStage {
 public:
  explicit KeyframeStage(const PipelineConfig& config) : config_(config) {}

  WorkItem process(WorkItem item) {
    if (item.keyframe && item.route == Route::kDenoise) {
      const auto start = Clock::now();
      NoiseEstimate estimate;
      estimate.sigma = item.denoise_sigma;
      item.keyframe_output = denoise_keyframe(item.denoiser_input(), estimate, config_.image);
      item.timing.image_denoise_ms = ms_since(start);
    }
    return item;
  }

 private:
  const PipelineConfig& config_;
};

// Holds a sliding buffer so that temporal frame t can see t-2..t+2; emits
// frames strictly in index order.
class VideoStage {
 public:
  VideoStage(const PipelineConfig& config, std::size_t n_frames)
      : config_(config), plan_(schedule_windows(n_frames, config.cadence)), n_(n_frames) {}

  std::vector<WorkItem> push(WorkItem item) {
    const std::size_t t = item.index;
    buffer_.emplace(t, std::move(item));
    std::vector<WorkItem> ready;
    while (next_ < n_ && buffer_.contains(std::min(next_ + 2, n_ - 1))) {
      ready.push_back(emit(next_));
      ++next_;
    }
    // Frames older than next-2 can no longer appear in any window.
    while (!buffer_.empty() && buffer_.begin()->first + 2 < next_) buffer_.erase(buffer_.begin());
    return ready;
  }

  bool done() const { return next_ == n_; }

 private:
  WorkItem emit(std::size_t t) {
    const WorkItem& src = buffer_.at(t);
    WorkItem out = src;
    if (src.route == Route::kBypass) {
      out.output = src.received;
    } else if (src.keyframe) {
      out.output = *src.keyframe_output;
    } else {
      const auto start = Clock::now();
      FrameWindow window{};
      const WindowIndices& idx = *plan_.windows[t];
      for (int k = 0; k < kWindowSize; ++k) {
        const WorkItem& w = buffer_.at(idx[k]);
        window[k] = w.keyframe_output ? &*w.keyframe_output : &w.denoiser_input();
      }
      out.output = denoise_window(window, src.denoise_sigma, config_.video);
      out.timing.video_denoise_ms = ms_since(start);
    }
    // The emitted copy does not need the intermediate frames any more.
    out.prefiltered.reset();
    out.keyframe_output.reset();
    return out;
  }

  const PipelineConfig& config_;
  WindowPlan plan_;
  std::size_t n_;
  std::size_t next_ = 0;
  std::map<std::size_t, WorkItem> buffer_;
};

class AnalyzeStage {
 public:
  AnalyzeStage(const PipelineConfig& config, const VideoSequence* reference,
               FeedbackBoard* board, std::size_t n_frames)
      : config_(config), reference_(reference), board_(board) {
    reports_.reserve(n_frames);
    received_.reserve(n_frames);
    output_.reserve(n_frames);
    timings_.reserve(n_frames);
  }

  void process(WorkItem item) {
    const auto start = Clock::now();
    const double runtime =
        config_.deterministic_timing
            ? 0.0
            : item.timing.detect_ms + item.timing.image_denoise_ms + item.timing.video_denoise_ms;
    const Frame* ref = reference_ ? &reference_->frames[item.index] : nullptr;
    reports_.push_back(analyze_frame(item.index, ref, item.received, item.output, item.route,
                                     item.detected_sigma, runtime, config_.analyzer));
    const std::size_t k = config_.feedback_window;
    if (board_ && k > 0 && reports_.size() % k == 0) {
      board_->post(make_feedback(std::span(reports_).last(k), config_.feedback_policy()));
    }
    item.timing.analyze_ms = ms_since(start);
    item.timing.end_to_end_ms = ms_since(item.entered);
    (item.route == Route::kBypass ? bypassed_ : denoised_)++;
    timings_.push_back(item.timing);
    received_.push_back(std::move(item.received));
    output_.push_back(std::move(item.output));
  }

  std::vector<AnalyzerReport>& reports() { return reports_; }
  std::vector<Frame>& received() { return received_; }
  std::vector<Frame>& output() { return output_; }

  PipelineStats stats(double wall_ms) const {
    PipelineStats s;
    for (const auto& t : timings_) {
      s.detect_ms.push_back(t.detect_ms);
      s.image_denoise_ms.push_back(t.image_denoise_ms);
      s.video_denoise_ms.push_back(t.video_denoise_ms);
      s.analyze_ms.push_back(t.analyze_ms);
      s.end_to_end_ms.push_back(t.end_to_end_ms);
    }
    s.total_frames = timings_.size();
    s.frames_bypassed = bypassed_;
    s.frames_denoised = denoised_;
    s.latency_mean_ms = s.mean_of(s.end_to_end_ms);
    if (!s.end_to_end_ms.empty()) {
      std::vector<double> sorted = s.end_to_end_ms;
      std::sort(sorted.begin(), sorted.end());
      const auto rank = static_cast<std::size_t>(std::ceil(0.95 * sorted.size()));
      s.latency_p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
    }
    s.wall_ms = wall_ms;
    s.achieved_fps = wall_ms > 0.0 ? 1000.0 * s.total_frames / wall_ms : 0.0;
    return s;
  }

 private:
  const PipelineConfig& config_;
  const VideoSequence* reference_;
  FeedbackBoard* board_;
  std::vector<AnalyzerReport> reports_;
  std::vector<Frame> received_;
  std::vector<Frame> output_;
  std::vector<FrameTiming> timings_;
  std::size_t bypassed_ = 0;
  std::size_t denoised_ = 0;
};

void run_sequential(std::size_t n, Source& source, DetectStage& detect, KeyframeStage& keyframe,
                    VideoStage& video, AnalyzeStage& analyze) {
  for (std::size_t t = 0; t < n; ++t) {
    std::optional<WorkItem> item = source.produce(t, false);
    WorkItem prepared = keyframe.process(detect.process(std::move(*item)));
    for (WorkItem& out : video.push(std::move(prepared))) analyze.process(std::move(out));
  }
}

void run_concurrent(std::size_t n, std::size_t capacity, Source& source, DetectStage& detect,
                    KeyframeStage& keyframe, VideoStage& video, AnalyzeStage& analyze,
                    FeedbackBoard& board) {
  BoundedQueue<WorkItem> to_detect(capacity);
  BoundedQueue<WorkItem> to_keyframe(capacity);
  BoundedQueue<WorkItem> to_video(capacity);
  BoundedQueue<WorkItem> to_analyze(capacity);

  std::mutex error_mutex;
  std::exception_ptr error;
  auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mutex);
      if (!error) error = e;
    }
    to_detect.abort();
    to_keyframe.abort();
    to_video.abort();
    to_analyze.abort();
    board.abort();
  };
  auto guarded = [&](auto body) {
    return [&, body] {
      try {
        body();
      } catch (...) {
        fail(std::current_exception());
      }
    };
  };

  std::vector<std::jthread> workers;
  workers.emplace_back(guarded([&] {
    for (std::size_t t = 0; t < n; ++t) {
      std::optional<WorkItem> item = source.produce(t, true);
      if (!item || !to_detect.push(std::move(*item))) return;
    }
    to_detect.close();
  }));
  workers.emplace_back(guarded([&] {
    while (auto item = to_detect.pop()) {
      if (!to_keyframe.push(detect.process(std::move(*item)))) return;
    }
    to_keyframe.close();
  }));
  workers.emplace_back(guarded([&] {
    while (auto item = to_keyframe.pop()) {
      if (!to_video.push(keyframe.process(std::move(*item)))) return;
    }
    to_video.close();
  }));
  workers.emplace_back(guarded([&] {
    while (auto item = to_video.pop()) {
      for (WorkItem& out : video.push(std::move(*item))) {
        if (!to_analyze.push(std::move(out))) return;
      }
    }
    to_analyze.close();
  }));

  try {
    while (auto item = to_analyze.pop()) analyze.process(std::move(*item));
  } catch (...) {
    fail(std::current_exception());
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

struct RunOutput {
  std::vector<AnalyzerReport> reports;
  std::vector<Frame> received;
  std::vector<Frame> output;
  PipelineStats stats;
};

RunOutput run_pipeline(std::size_t n, const PipelineConfig& config, Source& source,
                       const VideoSequence* reference, FeedbackBoard& board) {
  config.validate();
  DetectStage detect(config);
  KeyframeStage keyframe(config);
  VideoStage video(config, n);
  AnalyzeStage analyze(config, reference, reference ? &board : nullptr, n);

  const auto start = Clock::now();
  if (config.execution == ExecutionMode::kSequential) {
    run_sequential(n, source, detect, keyframe, video, analyze);
  } else {
    run_concurrent(n, config.queue_capacity, source, detect, keyframe, video, analyze, board);
  }
  const double wall = ms_since(start);
  if (!video.done()) throw std::logic_error("pipeline finished with frames still buffered");
  return RunOutput{std::move(analyze.reports()), std::move(analyze.received()),
                   std::move(analyze.output()), analyze.stats(wall)};
}

}  // namespace

double PipelineStats::mean_of(const std::vector<double>& v) const {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string PipelineStats::to_json() const {
  nlohmann::ordered_json j;
  j["detect_ms"] = detect_ms;
  j["image_denoise_ms"] = image_denoise_ms;
  j["video_denoise_ms"] = video_denoise_ms;
  j["analyze_ms"] = analyze_ms;
  j["end_to_end_ms"] = end_to_end_ms;
  j["total_frames"] = total_frames;
  j["frames_bypassed"] = frames_bypassed;
  j["frames_denoised"] = frames_denoised;
  j["latency_mean_ms"] = latency_mean_ms;
  j["latency_p95_ms"] = latency_p95_ms;
  j["achieved_fps"] = achieved_fps;
  j["wall_ms"] = wall_ms;
  return j.dump(2);
}

DenoiseResult run_denoise(const VideoSequence& input, const PipelineConfig& config) {
  if (input.empty()) throw std::invalid_argument("run_denoise: empty input");
  input.validate();
  SequenceSource source(input);
  FeedbackBoard board;
  RunOutput run = run_pipeline(input.size(), config, source, nullptr, board);
  DenoiseResult result;
  result.output.frame_rate = input.frame_rate;
  result.output.frames = std::move(run.output);
  result.reports = std::move(run.reports);
  result.stats = std::move(run.stats);
  return result;
}

SimulateResult run_simulate(const VideoSequence& clean, const PipelineConfig& config) {
  if (clean.empty()) throw std::invalid_argument("run_simulate: empty input");
  clean.validate();
  config.validate();
  FeedbackBoard board;
  SenderSource source(clean, config, board);
  RunOutput run = run_pipeline(clean.size(), config, source, &clean, board);
  SimulateResult result;
  result.received.frame_rate = clean.frame_rate;
  result.received.frames = std::move(run.received);
  result.denoised.frame_rate = clean.frame_rate;
  result.denoised.frames = std::move(run.output);
  result.reports = std::move(run.reports);
  result.feedback_log = board.all();
  result.sender_trace = source.trace();
  result.stats = std::move(run.stats);
  return result;
}

std::string to_json_line(const SenderTraceEntry& e) {
  nlohmann::ordered_json j;
  j["frame_index"] = e.frame_index;
  j["quant_step"] = e.quant_step;
  j["resolution_scale"] = to_string(e.resolution_scale);
  j["framerate_divisor"] = e.framerate_divisor;
  return j.dump();
}

}  // namespace rtdenoise
