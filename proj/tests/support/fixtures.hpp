#pragma once

#include <cstdint>
#include <vector>

#include "rtdenoise/frame.hpp"

namespace rtdenoise::testing {

// Procedural stand-ins for natural photographs: smooth shading, a few hard
// edges and mild texture, with luma kept in [60, 195].
enum class Scene { kLandscape, kPortrait, kInterior, kTextured };

inline constexpr Scene kNaturalScenes[] = {Scene::kLandscape, Scene::kPortrait,
                                           Scene::kInterior};

// Scene sampled with its origin shifted by (dx, dy) pixels; fractional shifts
// resample the underlying continuous image.
Frame make_scene(Scene scene, int width, int height, double dx = 0.0, double dy = 0.0,
                 ChromaFormat format = ChromaFormat::kMono);

VideoSequence static_video(Scene scene, int width, int height, std::size_t frames);
// Horizontal pan of `speed` pixels per frame.
VideoSequence panning_video(Scene scene, int width, int height, std::size_t frames,
                            double speed);

// Per-frame gaussian noise with seed + t.
VideoSequence with_gaussian_noise(const VideoSequence& clean, double sigma, std::uint64_t seed);

// Uniform random frame, for property tests.
Frame random_frame(int width, int height, std::uint64_t seed);
// Random frame plus a correlated perturbation of the given strength.
Frame perturbed(const Frame& base, double strength, std::uint64_t seed);

}  // namespace rtdenoise::testing
