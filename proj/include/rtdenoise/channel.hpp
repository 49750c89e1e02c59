#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "rtdenoise/feedback.hpp"
#include "rtdenoise/frame.hpp"

namespace rtdenoise {

// Simulated sender side: noise injectors used as test stimuli, a block-DCT
// codec surrogate, a slice-based lossy channel with copy-previous
// concealment, and the sender's reaction to analyzer feedback.

enum class ResolutionScale { kHalf, kThreeQuarters, kFull };

double scale_factor(ResolutionScale s);
std::string_view to_string(ResolutionScale s);
std::optional<ResolutionScale> resolution_scale_from_string(std::string_view s);

struct SenderConfig {
  int quant_step = 16;
  ResolutionScale resolution_scale = ResolutionScale::kFull;
  int framerate_divisor = 1;
  int q_min = 4;
  int q_max = 48;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
  friend bool operator==(const SenderConfig&, const SenderConfig&) = default;
};

enum class LossKind { kBernoulli, kGilbertElliott };

struct LossModel {
  LossKind kind = LossKind::kBernoulli;
  double p_loss = 0.0;        // bernoulli
  double p_good_bad = 0.05;   // gilbert-elliott transitions
  double p_bad_good = 0.5;
  double p_loss_bad = 0.8;    // loss probability while in the bad state
  int slice_height = 16;
  std::uint64_t seed = 1;

  void validate() const;
};

// Mutable per-stream channel state: the generator and the Gilbert-Elliott
// good/bad state. Advances once per slice.
class LossChannel {
 public:
  explicit LossChannel(const LossModel& model);

  const LossModel& model() const { return model_; }
  bool in_bad_state() const { return bad_; }
  // Draws the fate of the next slice; true means lost.
  bool next_slice_lost();

 private:
  LossModel model_;
  std::mt19937_64 engine_;
  bool bad_ = false;
};

struct TransmitResult {
  Frame frame;
  std::vector<int> lost_slices;
};

Frame add_gaussian_noise(const Frame& frame, double sigma, std::uint64_t seed);
Frame add_salt_pepper(const Frame& frame, double density, std::uint64_t seed);
Frame add_speckle(const Frame& frame, double sigma_mult, std::uint64_t seed);

// Optional bilinear down/up scale, then 8x8 orthonormal DCT with uniform
// quantization of every coefficient to round(c / q) * q. Luma only.
Frame encode_decode(const Frame& frame, const SenderConfig& config);

// Splits the frame into horizontal slices; each lost slice is replaced by the
// co-located rows of `prev_decoded`, or mid-grey when there is none.
TransmitResult transmit(const Frame& frame, const Frame* prev_decoded,
                        LossChannel& channel);

SenderConfig sender_step(const SenderConfig& config,
                         const FeedbackMessage& feedback);

}  // namespace rtdenoise
