#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "rtdenoise/channel.hpp"
#include "rtdenoise/filters.hpp"
#include "rtdenoise/keyframe_denoiser.hpp"
#include "rtdenoise/metrics.hpp"
#include "rtdenoise/noise_detector.hpp"

using namespace rtdenoise;
using namespace rtdenoise::testing;

namespace {

NoiseEstimate estimate_of(double sigma) {
  NoiseEstimate e;
  e.sigma = sigma;
  return e;
}

Frame step_image() {
  Frame f(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) f.at(x, y) = x < 32 ? 70 : 180;
  return f;
}

int strongest_edge(const Frame& f, int y) {
  int best = 0, where = 0;
  for (int x = 1; x < f.width(); ++x) {
    const int g = std::abs(int(f.at(x, y)) - int(f.at(x - 1, y)));
    if (g > best) {
      best = g;
      where = x;
    }
  }
  return where;
}

double mean_abs_diff(const Frame& a, const Frame& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.luma().size(); ++i) s += std::abs(int(a.luma()[i]) - int(b.luma()[i]));
  return s / a.luma().size();
}

}  // namespace

TEST(StageDetail, PassthroughBelowGuard) {
  const Frame f = random_frame(40, 30, 1);
  EXPECT_EQ(stage_detail(f, 0.0, {}), f);
  EXPECT_EQ(stage_detail(f, 0.49, {}), f);
}

TEST(StageDetail, ConstantUnchanged) {
  const Frame f(32, 32, ChromaFormat::kMono, 93);
  for (double s : {0.5, 10.0, 80.0}) EXPECT_EQ(stage_detail(f, s, {}), f);
}

TEST(StageDetail, KeepsStepEdgePosition) {
  const Frame noisy = add_gaussian_noise(step_image(), 25.0, 6);
  const Frame out = stage_detail(noisy, 25.0, {});
  std::vector<double> profile(64, 0.0);
  for (int y = 0; y < 64; ++y) {
    EXPECT_LE(std::abs(strongest_edge(out, y) - 32), 1) << "row " << y;
    for (int x = 1; x < 64; ++x) profile[x] += std::abs(int(out.at(x, y)) - int(out.at(x - 1, y)));
  }
  EXPECT_EQ(std::max_element(profile.begin(), profile.end()) - profile.begin(), 32);
}

TEST(StageDetail, MatchesBruteForceBilateral) {
  const Frame f = random_frame(17, 13, 4);
  const CascadeParams p;
  const double sigma = 12.0;
  const Frame out = stage_detail(f, sigma, p);
  const double sr = p.bilateral_range_factor * sigma;
  const double ss = p.bilateral_spatial_sigma;
  for (int y = 0; y < 13; ++y)
    for (int x = 0; x < 17; ++x) {
      double num = 0, den = 0;
      for (int dy = -3; dy <= 3; ++dy)
        for (int dx = -3; dx <= 3; ++dx) {
          const double v = f.clamped(x + dx, y + dy);
          const double dv = v - f.at(x, y);
          const double w = std::exp(-(dx * dx + dy * dy) / (2 * ss * ss)) * std::exp(-dv * dv / (2 * sr * sr));
          num += w * v;
          den += w;
        }
      EXPECT_NEAR(out.at(x, y), num / den, 0.5 + 1e-6) << x << "," << y;
    }
}

TEST(StageSmooth, KernelNormalised) {
  for (double s = 0.5; s <= 2.5; s += 0.1) {
    const auto k = gaussian_kernel(s, static_cast<int>(std::ceil(3 * s)));
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(StageSmooth, SigmaMapping) {
  const CascadeParams p;
  EXPECT_DOUBLE_EQ(p.smooth_sigma(5.0), 0.5);
  EXPECT_DOUBLE_EQ(p.smooth_sigma(30.0), 1.5);
  EXPECT_DOUBLE_EQ(p.smooth_sigma(90.0), 2.5);
}

TEST(StageSmooth, ConstantUnchangedAndNoisyImproved) {
  const Frame flat(32, 32, ChromaFormat::kMono, 201);
  EXPECT_EQ(stage_smooth(flat, 30.0, {}), flat);
  const Frame clean = make_scene(Scene::kLandscape, 256, 256);
  const Frame noisy = add_gaussian_noise(clean, 25.0, 2);
  EXPECT_GT(psnr(clean, stage_smooth(noisy, 25.0, {})), psnr(clean, noisy));
}

TEST(StageFuse, Rules) {
  const Frame a = random_frame(24, 24, 3);
  EXPECT_EQ(stage_fuse(a, a, 20.0, {}), a);

  const Frame flat(24, 24, ChromaFormat::kMono, 50);
  EXPECT_EQ(stage_fuse(flat, a, 20.0, {}), a);

  CascadeParams sharp;
  sharp.fusion_tau = 1e-12;
  Frame stripes(24, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) stripes.at(x, y) = static_cast<std::uint8_t>(x * 10);
  EXPECT_EQ(stage_fuse(stripes, a, 20.0, sharp), stripes);

  EXPECT_THROW(stage_fuse(a, Frame(23, 24), 20.0, {}), std::invalid_argument);
}

TEST(DenoiseKeyframe, PassthroughGuard) {
  const Frame f = make_scene(Scene::kInterior, 64, 48, 0, 0, ChromaFormat::k420);
  EXPECT_EQ(denoise_keyframe(f, estimate_of(0.0), {}), f);
  EXPECT_EQ(denoise_keyframe(f, estimate_of(0.4), {}), f);
}

TEST(DenoiseKeyframe, GainOnNaturalFixture) {
  for (Scene scene : kNaturalScenes) {
    const Frame clean = make_scene(scene, 256, 256);
    const Frame noisy = add_gaussian_noise(clean, 25.0, 9);
    const Frame out = denoise_keyframe(noisy, analyze_noise(noisy), {});
    EXPECT_GE(psnr(clean, out) - psnr(clean, noisy), 2.0);
  }
}

TEST(DenoiseKeyframe, FusionNotWorseThanWeakerStage) {
  for (Scene scene : kNaturalScenes) {
    const Frame clean = make_scene(scene, 200, 150);
    const Frame noisy = add_gaussian_noise(clean, 25.0, 4);
    const double sigma = estimate_sigma(noisy);
    const Frame d = stage_detail(noisy, sigma, {});
    const Frame s = stage_smooth(noisy, sigma, {});
    const Frame fused = stage_fuse(d, s, sigma, {});
    EXPECT_GE(ssim(clean, fused), std::min(ssim(clean, d), ssim(clean, s)));
  }
}

TEST(DenoiseKeyframe, Contractive) {
  for (Scene scene : kNaturalScenes) {
    const Frame noisy = add_gaussian_noise(make_scene(scene, 128, 96), 30.0, 5);
    const NoiseEstimate e = analyze_noise(noisy);
    const Frame once = denoise_keyframe(noisy, e, {});
    const Frame twice = denoise_keyframe(once, e, {});
    EXPECT_LT(mean_abs_diff(once, twice), mean_abs_diff(noisy, once));
  }
}

TEST(DenoiseKeyframe, DeterministicShapePreservingAndTimed) {
  const Frame noisy = add_gaussian_noise(make_scene(Scene::kPortrait, 90, 70, 0, 0, ChromaFormat::k420), 30.0, 5);
  KeyframeTiming timing;
  const Frame a = denoise_keyframe(noisy, estimate_of(30.0), {}, &timing);
  EXPECT_EQ(a, denoise_keyframe(noisy, estimate_of(30.0), {}));
  EXPECT_TRUE(a.same_shape(noisy));
  EXPECT_TRUE(std::equal(a.cb().begin(), a.cb().end(), noisy.cb().begin()));
  EXPECT_GE(timing.detail_ms, 0.0);
  EXPECT_GE(timing.smooth_ms, 0.0);
  EXPECT_GE(timing.fuse_ms, 0.0);
}

TEST(CascadeParams, Validation) {
  CascadeParams p;
  p.window_radius = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.bilateral_spatial_sigma = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.gaussian_min = 3.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
