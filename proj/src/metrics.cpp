#include "rtdenoise/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtdenoise/filters.hpp"

namespace rtdenoise {

namespace {

constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr std::array<double, 5> kMsSsimWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

void require_same_dims(const Frame& a, const Frame& b, const char* metric) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument(std::string(metric) + ": frame dimensions differ");
  }
}

// Separable correlation keeping only positions where the window fits.
RealPlane filter_valid(const RealPlane& in, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = in.width - n + 1;
  const int oh = in.height - n + 1;
  RealPlane tmp(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double* src = &in.data[static_cast<std::size_t>(y) * in.width];
    double* dst = &tmp.data[static_cast<std::size_t>(y) * ow];
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * src[x + i];
      dst[x] = acc;
    }
  }
  RealPlane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    double* dst = &out.data[static_cast<std::size_t>(y) * ow];
    for (int i = 0; i < n; ++i) {
      const double* src = &tmp.data[static_cast<std::size_t>(y + i) * ow];
      for (int x = 0; x < ow; ++x) dst[x] += k[i] * src[x];
    }
  }
  return out;
}

RealPlane product(const RealPlane& a, const RealPlane& b) {
  RealPlane out(a.width, a.height);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

struct SsimMeans {
  double ssim = 0.0;  // mean of l * cs
  double cs = 0.0;    // mean of contrast-structure term
};

SsimMeans ssim_means(const RealPlane& x, const RealPlane& y) {
  static const std::vector<double> window = gaussian_kernel(kSsimSigma, kSsimWindow / 2);
  const RealPlane mu_x = filter_valid(x, window);
  const RealPlane mu_y = filter_valid(y, window);
  const RealPlane xx = filter_valid(product(x, x), window);
  const RealPlane yy = filter_valid(product(y, y), window);
  const RealPlane xy = filter_valid(product(x, y), window);
  double ssim_sum = 0.0;
  double cs_sum = 0.0;
  for (std::size_t i = 0; i < mu_x.data.size(); ++i) {
    const double mx = mu_x.data[i];
    const double my = mu_y.data[i];
    const double vx = xx.data[i] - mx * mx;
    const double vy = yy.data[i] - my * my;
    const double cov = xy.data[i] - mx * my;
    const double cs = (2.0 * cov + kC2) / (vx + vy + kC2);
    const double l = (2.0 * mx * my + kC1) / (mx * mx + my * my + kC1);
    ssim_sum += l * cs;
    cs_sum += cs;
  }
  const double n = static_cast<double>(mu_x.data.size());
  return {ssim_sum / n, cs_sum / n};
}

RealPlane downsample2(const RealPlane& in) {
  RealPlane out(in.width / 2, in.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = 0.25 * (in.at(2 * x, 2 * y) + in.at(2 * x + 1, 2 * y) +
                             in.at(2 * x, 2 * y + 1) + in.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

}  // namespace

double psnr(const Frame& ref, const Frame& test) {
  require_same_dims(ref, test, "psnr");
  const auto a = ref.luma();
  const auto b = test.luma();
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = a[i] - b[i];
    sse += static_cast<std::uint64_t>(d * d);
  }
  if (sse == 0) return kInfinitePsnr;
  const double mse = static_cast<double>(sse) / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Frame& ref, const Frame& test) {
  require_same_dims(ref, test, "ssim");
  if (std::min(ref.width(), ref.height()) < kSsimWindow) {
    throw std::invalid_argument("ssim: frame smaller than the 11x11 window");
  }
  return ssim_means(to_real(ref), to_real(test)).ssim;
}

int ms_ssim_scales(int width, int height) {
  int scales = 0;
  int w = width;
  int h = height;
  while (scales < 5 && std::min(w, h) >= kSsimWindow) {
    ++scales;
    w /= 2;
    h /= 2;
  }
  return scales;
}

double ms_ssim(const Frame& ref, const Frame& test) {
  require_same_dims(ref, test, "ms_ssim");
  const int scales = ms_ssim_scales(ref.width(), ref.height());
  if (scales == 0) throw std::invalid_argument("ms_ssim: frame smaller than the 11x11 window");
  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += kMsSsimWeights[s];

  RealPlane x = to_real(ref);
  RealPlane y = to_real(test);
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    const SsimMeans m = ssim_means(x, y);
    const bool coarsest = s == scales - 1;
    // Negative terms cannot be raised to fractional powers; they count as 0.
    const double term = std::max(coarsest ? m.ssim : m.cs, 0.0);
    result *= std::pow(term, kMsSsimWeights[s] / weight_sum);
    if (!coarsest) {
      x = downsample2(x);
      y = downsample2(y);
    }
  }
  return result;
}

double vifp(const Frame& ref, const Frame& test) {
  require_same_dims(ref, test, "vifp");
  constexpr double kNoiseVar = 2.0;
  constexpr double kEps = 1e-10;
  RealPlane r = to_real(ref);
  RealPlane d = to_real(test);
  double num = 0.0;
  double den = 0.0;
  for (int scale = 1; scale <= 4; ++scale) {
    const int n = (1 << (5 - scale)) + 1;
    auto require_fit = [&](const RealPlane& p) {
      if (std::min(p.width, p.height) < n) {
        throw std::invalid_argument("vifp: frame too small for scale " + std::to_string(scale));
      }
    };
    require_fit(r);
    const auto win = gaussian_kernel(n / 5.0, n / 2);
    if (scale > 1) {
      auto decimate = [](const RealPlane& p) {
        RealPlane out((p.width + 1) / 2, (p.height + 1) / 2);
        for (int y = 0; y < out.height; ++y) {
          for (int x = 0; x < out.width; ++x) out.at(x, y) = p.at(2 * x, 2 * y);
        }
        return out;
      };
      r = decimate(filter_valid(r, win));
      d = decimate(filter_valid(d, win));
      require_fit(r);
    }
    const RealPlane mu1 = filter_valid(r, win);
    const RealPlane mu2 = filter_valid(d, win);
    const RealPlane rr = filter_valid(product(r, r), win);
    const RealPlane dd = filter_valid(product(d, d), win);
    const RealPlane rd = filter_valid(product(r, d), win);
    for (std::size_t i = 0; i < mu1.data.size(); ++i) {
      const double m1 = mu1.data[i];
      const double m2 = mu2.data[i];
      double s1 = std::max(rr.data[i] - m1 * m1, 0.0);
      const double s2 = std::max(dd.data[i] - m2 * m2, 0.0);
      const double s12 = rd.data[i] - m1 * m2;

      double g = s12 / (s1 + kEps);
      double sv = s2 - g * s12;
      if (s1 < kEps) {
        g = 0.0;
        sv = s2;
        s1 = 0.0;
      }
      if (s2 < kEps) {
        g = 0.0;
        sv = 0.0;
      }
      if (g < 0.0) {
        sv = s2;
        g = 0.0;
      }
      sv = std::max(sv, kEps);
      num += std::log10(1.0 + g * g * s1 / (sv + kNoiseVar));
      den += std::log10(1.0 + s1 / kNoiseVar);
    }
  }
  if (den < kEps) {
    // A flat reference carries no information; fidelity is all or nothing.
    return ref.luma().size() == test.luma().size() &&
                   std::equal(ref.luma().begin(), ref.luma().end(), test.luma().begin())
               ? 1.0
               : 0.0;
  }
  return num / den;
}

double detail_retention(const Frame& ref, const Frame& test) {
  require_same_dims(ref, test, "detail_retention");
  constexpr double kC = 1e-4 * 255.0 * 255.0;
  const auto gr = gradient_magnitude(ref);
  const auto gt = gradient_magnitude(test);
  double sum = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    sum += (2.0 * gr[i] * gt[i] + kC) / (gr[i] * gr[i] + gt[i] * gt[i] + kC);
  }
  return sum / static_cast<double>(gr.size());
}

}  // namespace rtdenoise
