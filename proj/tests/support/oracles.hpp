#pragma once

#include "rtdenoise/frame.hpp"

// Deliberately naive reference implementations: direct 2D windows,
// two-pass moments, no shared code with the library's metric kernels.
namespace rtdenoise::oracle {

double psnr(const Frame& a, const Frame& b);
double ssim(const Frame& a, const Frame& b);
double ms_ssim(const Frame& a, const Frame& b);
double vifp(const Frame& a, const Frame& b);

}  // namespace rtdenoise::oracle
