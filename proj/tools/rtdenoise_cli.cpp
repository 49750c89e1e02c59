// rtdenoise command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data/format error.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtdenoise/analyzer.hpp"
#include "rtdenoise/channel.hpp"
#include "rtdenoise/config.hpp"
#include "rtdenoise/errors.hpp"
#include "rtdenoise/image_io.hpp"
#include "rtdenoise/metrics.hpp"
#include "rtdenoise/noise_detector.hpp"
#include "rtdenoise/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rtdenoise;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

PipelineConfig load_config(const std::string& path) {
  return path.empty() ? PipelineConfig{} : parse_config(path);
}

template <typename Range>
void write_lines(const std::string& path, const Range& items) {
  if (path.empty()) return;
  std::ofstream out = open_out(path);
  for (const auto& item : items) out << to_json_line(item) << '\n';
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct NoiseSpec {
  std::string kind;
  double strength = 0.0;
};

NoiseSpec parse_noise(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--noise must be kind:strength");
  NoiseSpec spec{text.substr(0, colon), 0.0};
  const std::string value = text.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.strength);
  if (ec != std::errc() || ptr != value.data() + value.size() || spec.strength < 0.0)
    throw UsageError("bad noise strength '" + value + "'");
  if (spec.kind != "gaussian" && spec.kind != "saltpepper" && spec.kind != "speckle")
    throw UsageError("unknown noise kind '" + spec.kind + "'");
  if (spec.kind == "saltpepper" && spec.strength > 1.0)
    throw UsageError("saltpepper density must be in [0, 1]");
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time video denoising pipeline and network simulator"};
  app.require_subcommand(1);

  // simulate
  struct {
    std::string in, config, out_received, out_denoised, report, feedback, stats, trace;
    std::optional<std::uint64_t> seed;
    bool dump = false;
  } sim;
  auto* simulate = app.add_subcommand("simulate", "Sender, lossy channel and receiver loop");
  simulate->add_option("--in", sim.in, "Clean source (.y4m)")->required();
  simulate->add_option("--config", sim.config, "Configuration file");
  simulate->add_option("--out-received", sim.out_received, "Received video (.y4m)");
  simulate->add_option("--out-denoised", sim.out_denoised, "Denoised video (.y4m)");
  simulate->add_option("--report", sim.report, "Per-frame reports (JSONL)");
  simulate->add_option("--feedback", sim.feedback, "Feedback messages (JSONL)");
  simulate->add_option("--stats", sim.stats, "Pipeline statistics (JSON)");
  simulate->add_option("--trace", sim.trace, "Sender parameter trace (JSONL)");
  simulate->add_option("--seed", sim.seed, "Seed for the pipeline and loss channel");
  simulate->add_flag("--dump-config", sim.dump, "Print the effective configuration");

  // denoise
  struct {
    std::string in, config, out, report, stats;
    bool dump = false;
  } den;
  auto* denoise = app.add_subcommand("denoise", "Run the receiver pipeline on a video");
  denoise->add_option("--in", den.in, "Noisy input (.y4m)")->required();
  denoise->add_option("--config", den.config, "Configuration file");
  denoise->add_option("--out", den.out, "Denoised output (.y4m)");
  denoise->add_option("--report", den.report, "Per-frame reports (JSONL)");
  denoise->add_option("--stats", den.stats, "Pipeline statistics (JSON)");
  denoise->add_flag("--dump-config", den.dump, "Print the effective configuration");

  // inject
  struct {
    std::string in, noise, out;
    std::uint64_t seed = 1;
  } inj;
  auto* inject = app.add_subcommand("inject", "Add synthetic noise to a video");
  inject->add_option("--in", inj.in, "Clean input (.y4m)")->required();
  inject->add_option("--noise", inj.noise, "gaussian:<sigma> | saltpepper:<density> | speckle:<mult>")
      ->required();
  inject->add_option("--seed", inj.seed, "Base seed; frame t uses seed + t");
  inject->add_option("--out", inj.out, "Noisy output (.y4m)")->required();

  // detect
  struct {
    std::string in, histogram;
  } det;
  auto* detect = app.add_subcommand("detect", "Estimate and classify noise per frame");
  detect->add_option("--in", det.in, "Input (.y4m)")->required();
  detect->add_option("--histogram", det.histogram, "Directory for per-frame luma histograms");

  // metrics
  struct {
    std::string ref, test, json;
  } met;
  auto* metrics = app.add_subcommand("metrics", "Full-reference quality metrics");
  metrics->add_option("--ref", met.ref, "Reference (.y4m)")->required();
  metrics->add_option("--test", met.test, "Test (.y4m)")->required();
  metrics->add_option("--json", met.json, "Per-frame metrics (JSONL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      PipelineConfig config = load_config(sim.config);
      if (sim.seed) {
        config.seed = *sim.seed;
        config.loss.seed = *sim.seed;
      }
      if (sim.dump) std::cout << dump_config(config);
      const VideoSequence clean = read_y4m_file(sim.in);
      const SimulateResult result = run_simulate(clean, config);
      if (!sim.out_received.empty()) write_y4m_file(result.received, sim.out_received);
      if (!sim.out_denoised.empty()) write_y4m_file(result.denoised, sim.out_denoised);
      write_lines(sim.report, result.reports);
      write_lines(sim.feedback, result.feedback_log);
      write_lines(sim.trace, result.sender_trace);
      if (!sim.stats.empty()) open_out(sim.stats) << result.stats.to_json() << '\n';
      std::cerr << "simulate: " << result.stats.total_frames << " frames, "
                << result.stats.frames_denoised << " denoised, " << result.feedback_log.size()
                << " feedback messages, " << fmt_double(result.stats.achieved_fps) << " fps\n";
    } else if (*denoise) {
      const PipelineConfig config = load_config(den.config);
      if (den.dump) std::cout << dump_config(config);
      const VideoSequence input = read_y4m_file(den.in);
      const DenoiseResult result = run_denoise(input, config);
      if (!den.out.empty()) write_y4m_file(result.output, den.out);
      write_lines(den.report, result.reports);
      if (!den.stats.empty()) open_out(den.stats) << result.stats.to_json() << '\n';
      std::cerr << "denoise: " << result.stats.total_frames << " frames, "
                << result.stats.frames_bypassed << " bypassed, " << result.stats.frames_denoised
                << " denoised, " << fmt_double(result.stats.achieved_fps) << " fps\n";
    } else if (*inject) {
      const NoiseSpec spec = parse_noise(inj.noise);
      VideoSequence video = read_y4m_file(inj.in);
      for (std::size_t t = 0; t < video.size(); ++t) {
        const std::uint64_t seed = inj.seed + t;
        Frame& f = video.frames[t];
        if (spec.kind == "gaussian") f = add_gaussian_noise(f, spec.strength, seed);
        else if (spec.kind == "saltpepper") f = add_salt_pepper(f, spec.strength, seed);
        else f = add_speckle(f, spec.strength, seed);
      }
      write_y4m_file(video, inj.out);
    } else if (*detect) {
      const VideoSequence video = read_y4m_file(det.in);
      if (!det.histogram.empty()) fs::create_directories(det.histogram);
      for (std::size_t t = 0; t < video.size(); ++t) {
        const NoiseEstimate e = analyze_noise(video.frames[t]);
        std::cout << "frame=" << t << " sigma=" << fmt_double(e.sigma)
                  << " category=" << to_string(e.category)
                  << " impulse=" << fmt_double(e.impulse_fraction)
                  << " blockiness=" << fmt_double(e.blockiness_ratio)
                  << " corr=" << fmt_double(e.mean_var_correlation) << '\n';
        if (!det.histogram.empty()) {
          char name[32];
          std::snprintf(name, sizeof name, "frame_%05zu.txt", t);
          std::ofstream out = open_out((fs::path(det.histogram) / name).string());
          for (const auto count : luma_histogram(video.frames[t])) out << count << '\n';
        }
      }
    } else if (*metrics) {
      const VideoSequence ref = read_y4m_file(met.ref);
      const VideoSequence test = read_y4m_file(met.test);
      if (ref.size() != test.size())
        throw std::invalid_argument("frame count mismatch: " + std::to_string(ref.size()) +
                                    " vs " + std::to_string(test.size()));
      std::optional<std::ofstream> json;
      if (!met.json.empty()) json = open_out(met.json);
      std::cout << "frame        psnr      ssim   ms_ssim      vifp\n";
      double sum_psnr = 0.0, sum_ssim = 0.0, sum_ms = 0.0, sum_vif = 0.0;
      for (std::size_t t = 0; t < ref.size(); ++t) {
        const Frame& a = ref.frames[t];
        const Frame& b = test.frames[t];
        const double p = psnr(a, b), s = ssim(a, b), m = ms_ssim(a, b), v = vifp(a, b);
        sum_psnr += p;
        sum_ssim += s;
        sum_ms += m;
        sum_vif += v;
        char line[128];
        std::snprintf(line, sizeof line, "%5zu %11.4f %9.6f %9.6f %9.6f\n", t, p, s, m, v);
        std::cout << line;
        if (json) {
          nlohmann::ordered_json j;
          j["frame_index"] = t;
          j["psnr"] = std::isinf(p) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(p);
          j["ssim"] = s;
          j["ms_ssim"] = m;
          j["vifp"] = v;
          *json << j.dump() << '\n';
        }
      }
      const double n = static_cast<double>(ref.size());
      char line[128];
      std::snprintf(line, sizeof line, "mean  %11.4f %9.6f %9.6f %9.6f\n", sum_psnr / n,
                    sum_ssim / n, sum_ms / n, sum_vif / n);
      std::cout << line;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
