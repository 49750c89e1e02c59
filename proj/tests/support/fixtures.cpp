#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtdenoise/channel.hpp"
#include "rtdenoise/random.hpp"

namespace rtdenoise::testing {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Sum of a few fixed sinusoids; smooth "value noise" substitute.
double texture(double x, double y, double scale) {
  return 0.5 * std::sin(x / scale * 1.3 + 0.4) * std::cos(y / scale * 0.9 - 1.1) +
         0.3 * std::sin((x + 2.0 * y) / scale * 2.1 + 2.0) +
         0.2 * std::cos((3.0 * x - y) / scale * 1.7);
}

double landscape(double x, double y, double w, double h) {
  const double sky = 175.0 - 40.0 * (y / h);
  const double ridge = h * (0.45 + 0.08 * std::sin(x / w * 2.0 * kPi * 1.5) +
                            0.04 * std::sin(x / w * 2.0 * kPi * 4.3 + 1.0));
  const double hill = 95.0 + 12.0 * texture(x, y, 18.0) + 15.0 * (y / h);
  double v = sky + (hill - sky) * smoothstep(ridge - 1.0, ridge + 1.0, y);
  // A lake with a soft shoreline.
  const double lx = (x - 0.7 * w) / (0.18 * w), ly = (y - 0.8 * h) / (0.07 * h);
  v += (140.0 - v) * (1.0 - smoothstep(0.9, 1.1, std::hypot(lx, ly)));
  return v;
}

double portrait(double x, double y, double w, double h) {
  double v = 80.0 + 30.0 * (x / w) + 6.0 * texture(x, y, 30.0);
  const double fx = (x - 0.5 * w) / (0.2 * w), fy = (y - 0.45 * h) / (0.3 * h);
  const double r = std::hypot(fx, fy);
  const double face = 165.0 - 35.0 * fx * 0.5 - 25.0 * r * r;
  v += (face - v) * (1.0 - smoothstep(0.97, 1.03, r));
  const double bx = (x - 0.5 * w) / (0.35 * w), by = (y - 1.05 * h) / (0.3 * h);
  v += (70.0 + 4.0 * texture(x, y, 9.0) - v) * (1.0 - smoothstep(0.97, 1.02, std::hypot(bx, by)));
  return v;
}

double interior(double x, double y, double w, double h) {
  double v = 150.0 - 30.0 * (y / h) + 5.0 * texture(x, y, 40.0);
  struct Box { double x0, y0, x1, y1, level; };
  const Box boxes[] = {{0.08, 0.15, 0.35, 0.55, 100.0},
                       {0.55, 0.1, 0.9, 0.4, 185.0},
                       {0.0, 0.72, 1.0, 1.0, 85.0},
                       {0.4, 0.5, 0.62, 0.85, 120.0}};
  for (const Box& b : boxes) {
    const double inside =
        smoothstep(b.x0 * w - 0.8, b.x0 * w + 0.8, x) * (1.0 - smoothstep(b.x1 * w - 0.8, b.x1 * w + 0.8, x)) *
        smoothstep(b.y0 * h - 0.8, b.y0 * h + 0.8, y) * (1.0 - smoothstep(b.y1 * h - 0.8, b.y1 * h + 0.8, y));
    v += (b.level + 6.0 * (x - b.x0 * w) / w - v) * inside;
  }
  return v;
}

double textured(double x, double y, double w, double h) {
  // Busy content that block quantization visibly damages.
  return 128.0 + 30.0 * std::sin(x * 0.9) * std::cos(y * 0.7) + 20.0 * texture(x, y, 3.0) +
         10.0 * std::sin((x + y) * 0.35) - 10.0 * (y / h) + 5.0 * (x / w);
}

// Fine surface detail shared by the natural scenes.
double grain(double x, double y) {
  return 12.0 * texture(x, y, 2.5);
}

double sample(Scene scene, double x, double y, double w, double h) {
  switch (scene) {
    case Scene::kLandscape: return landscape(x, y, w, h) + grain(x, y);
    case Scene::kPortrait: return portrait(x, y, w, h) + grain(x, y);
    case Scene::kInterior: return interior(x, y, w, h) + grain(x, y);
    case Scene::kTextured: return textured(x, y, w, h);
  }
  return 128.0;
}

}  // namespace

Frame make_scene(Scene scene, int width, int height, double dx, double dy, ChromaFormat format) {
  Frame f(width, height, format, 128);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double v = sample(scene, x + dx, y + dy, width, height);
      f.at(x, y) = to_pixel(std::clamp(v, 60.0, 195.0));
    }
  }
  if (f.has_chroma()) {
    for (int y = 0; y < f.chroma_height(); ++y) {
      for (int x = 0; x < f.chroma_width(); ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * f.chroma_width() + x;
        f.cb()[i] = to_pixel(128.0 + 20.0 * std::sin((x + dx / 2) * 0.05));
        f.cr()[i] = to_pixel(128.0 + 20.0 * std::cos((y + dy / 2) * 0.04));
      }
    }
  }
  return f;
}

VideoSequence static_video(Scene scene, int width, int height, std::size_t frames) {
  VideoSequence v;
  v.frames.assign(frames, make_scene(scene, width, height));
  return v;
}

VideoSequence panning_video(Scene scene, int width, int height, std::size_t frames,
                            double speed) {
  VideoSequence v;
  for (std::size_t t = 0; t < frames; ++t) {
    v.frames.push_back(make_scene(scene, width, height, speed * static_cast<double>(t)));
  }
  return v;
}

VideoSequence with_gaussian_noise(const VideoSequence& clean, double sigma, std::uint64_t seed) {
  VideoSequence v = clean;
  for (std::size_t t = 0; t < v.size(); ++t) {
    v.frames[t] = add_gaussian_noise(clean.frames[t], sigma, seed + t);
  }
  return v;
}

Frame random_frame(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  Frame f(width, height);
  for (auto& p : f.luma()) p = static_cast<std::uint8_t>(rng.next_u64() >> 56);
  return f;
}

Frame perturbed(const Frame& base, double strength, std::uint64_t seed) {
  Rng rng(seed);
  Frame f = base;
  for (auto& p : f.luma()) p = to_pixel(p + strength * rng.normal());
  return f;
}

}  // namespace rtdenoise::testing
