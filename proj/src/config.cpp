#include "rtdenoise/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rtdenoise/errors.hpp"
#include "rtdenoise/image_io.hpp"

namespace rtdenoise {

void PipelineConfig::validate() const {
  if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
  if (queue_capacity < 1) throw std::invalid_argument("queue_capacity must be >= 1");
  if (feedback_delay < 2) throw std::invalid_argument("feedback_delay must be >= 2");
  if (cadence < 2) throw std::invalid_argument("cadence must be >= 2");
  image.validate();
  video.validate();
  analyzer.validate();
  sender.validate();
  loss.validate();
}

FeedbackPolicy PipelineConfig::feedback_policy() const {
  return FeedbackPolicy{threshold, analyzer.budget_ms, min_delta_psnr};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Thrown by value parsers; rethrown with file:line by the caller.
struct ValueError {
  std::string message;
};

double parse_double(const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ValueError{"expected a number"};
  return out;
}

long long parse_integer(const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ValueError{"expected an integer"};
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ValueError{"expected true or false"};
}

double at_least(double v, double lo) {
  if (!(v >= lo)) throw ValueError{"value must be >= " + format_double(lo)};
  return v;
}

double positive(double v) {
  if (!(v > 0.0)) throw ValueError{"value must be > 0"};
  return v;
}

double probability(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValueError{"value must be in [0, 1]"};
  return v;
}

long long int_range(long long v, long long lo, long long hi) {
  if (v < lo || v > hi) {
    throw ValueError{"value must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
  }
  return v;
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

struct Key {
  Setter set;
  Getter get;
};

// Ordered so dump_config emits sections in a stable, readable order.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>>& schema() {
  using C = PipelineConfig;
  static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Key>>>> s{
      {"pipeline",
       {
           {"threshold", {[](C& c, const std::string& v) { c.threshold = at_least(parse_double(v), 0.0); },
                          [](const C& c) { return format_double(c.threshold); }}},
           {"seed", {[](C& c, const std::string& v) {
                       std::uint64_t out = 0;
                       auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
                       if (ec != std::errc() || p != v.data() + v.size()) {
                         throw ValueError{"expected a non-negative integer"};
                       }
                       c.seed = out;
                     },
                     [](const C& c) { return std::to_string(c.seed); }}},
           {"execution", {[](C& c, const std::string& v) {
                            if (v == "sequential") c.execution = ExecutionMode::kSequential;
                            else if (v == "concurrent") c.execution = ExecutionMode::kConcurrent;
                            else throw ValueError{"expected sequential or concurrent"};
                          },
                          [](const C& c) {
                            return std::string(c.execution == ExecutionMode::kConcurrent
                                                   ? "concurrent" : "sequential");
                          }}},
           {"queue_capacity", {[](C& c, const std::string& v) {
                                 c.queue_capacity = int_range(parse_integer(v), 1, 1 << 20);
                               },
                               [](const C& c) { return std::to_string(c.queue_capacity); }}},
           {"feedback_window", {[](C& c, const std::string& v) {
                                  c.feedback_window = int_range(parse_integer(v), 0, 1 << 30);
                                },
                                [](const C& c) { return std::to_string(c.feedback_window); }}},
           {"feedback_delay", {[](C& c, const std::string& v) {
                                 c.feedback_delay = int_range(parse_integer(v), 2, 1 << 20);
                               },
                               [](const C& c) { return std::to_string(c.feedback_delay); }}},
           {"deterministic_timing", {[](C& c, const std::string& v) { c.deterministic_timing = parse_bool(v); },
                                     [](const C& c) { return std::string(c.deterministic_timing ? "true" : "false"); }}},
       }},
      {"image_denoiser",
       {
           {"bilateral_spatial_sigma", {[](C& c, const std::string& v) { c.image.bilateral_spatial_sigma = positive(parse_double(v)); },
                                        [](const C& c) { return format_double(c.image.bilateral_spatial_sigma); }}},
           {"bilateral_range_factor", {[](C& c, const std::string& v) { c.image.bilateral_range_factor = positive(parse_double(v)); },
                                       [](const C& c) { return format_double(c.image.bilateral_range_factor); }}},
           {"gaussian_divisor", {[](C& c, const std::string& v) { c.image.gaussian_divisor = positive(parse_double(v)); },
                                 [](const C& c) { return format_double(c.image.gaussian_divisor); }}},
           {"gaussian_min", {[](C& c, const std::string& v) { c.image.gaussian_min = positive(parse_double(v)); },
                             [](const C& c) { return format_double(c.image.gaussian_min); }}},
           {"gaussian_max", {[](C& c, const std::string& v) { c.image.gaussian_max = positive(parse_double(v)); },
                             [](const C& c) { return format_double(c.image.gaussian_max); }}},
           {"fusion_tau", {[](C& c, const std::string& v) {
                             if (v == "auto") c.image.fusion_tau.reset();
                             else c.image.fusion_tau = at_least(parse_double(v), 0.0);
                           },
                           [](const C& c) {
                             return c.image.fusion_tau ? format_double(*c.image.fusion_tau) : std::string("auto");
                           }}},
           {"window_radius", {[](C& c, const std::string& v) { c.image.window_radius = int_range(parse_integer(v), 1, 32); },
                              [](const C& c) { return std::to_string(c.image.window_radius); }}},
       }},
      {"video_denoiser",
       {
           {"mode", {[](C& c, const std::string& v) {
                       if (v == "classical") c.video.mode = BlockMode::kClassical;
                       else if (v == "conv") c.video.mode = BlockMode::kConv;
                       else throw ValueError{"expected classical or conv"};
                     },
                     [](const C& c) { return std::string(to_string(c.video.mode)); }}},
           {"k_temporal", {[](C& c, const std::string& v) { c.video.k_temporal = positive(parse_double(v)); },
                           [](const C& c) { return format_double(c.video.k_temporal); }}},
           {"spatial_enabled", {[](C& c, const std::string& v) { c.video.spatial_enabled = parse_bool(v); },
                                [](const C& c) { return std::string(c.video.spatial_enabled ? "true" : "false"); }}},
           {"cadence", {[](C& c, const std::string& v) { c.cadence = int_range(parse_integer(v), 2, 1000); },
                        [](const C& c) { return std::to_string(c.cadence); }}},
           {"weights", {[](C& c, const std::string& v) { c.weights_path = v; },
                        [](const C& c) { return c.weights_path; }}},
       }},
      {"analyzer",
       {
           {"w_psnr", {[](C& c, const std::string& v) { c.analyzer.weights.psnr = at_least(parse_double(v), 0.0); },
                       [](const C& c) { return format_double(c.analyzer.weights.psnr); }}},
           {"w_ssim", {[](C& c, const std::string& v) { c.analyzer.weights.ssim = at_least(parse_double(v), 0.0); },
                       [](const C& c) { return format_double(c.analyzer.weights.ssim); }}},
           {"w_runtime", {[](C& c, const std::string& v) { c.analyzer.weights.runtime = at_least(parse_double(v), 0.0); },
                          [](const C& c) { return format_double(c.analyzer.weights.runtime); }}},
           {"budget_ms", {[](C& c, const std::string& v) { c.analyzer.budget_ms = positive(parse_double(v)); },
                          [](const C& c) { return format_double(c.analyzer.budget_ms); }}},
           {"full_metrics", {[](C& c, const std::string& v) { c.analyzer.full_metrics = parse_bool(v); },
                             [](const C& c) { return std::string(c.analyzer.full_metrics ? "true" : "false"); }}},
           {"min_delta_psnr", {[](C& c, const std::string& v) { c.min_delta_psnr = parse_double(v); },
                               [](const C& c) { return format_double(c.min_delta_psnr); }}},
       }},
      {"sender",
       {
           {"quant_step", {[](C& c, const std::string& v) { c.sender.quant_step = int_range(parse_integer(v), 1, 64); },
                           [](const C& c) { return std::to_string(c.sender.quant_step); }}},
           {"resolution_scale", {[](C& c, const std::string& v) {
                                   auto s = resolution_scale_from_string(v);
                                   if (!s) throw ValueError{"expected 1, 3/4 or 1/2"};
                                   c.sender.resolution_scale = *s;
                                 },
                                 [](const C& c) { return std::string(to_string(c.sender.resolution_scale)); }}},
           {"framerate_divisor", {[](C& c, const std::string& v) { c.sender.framerate_divisor = int_range(parse_integer(v), 1, 1000); },
                                  [](const C& c) { return std::to_string(c.sender.framerate_divisor); }}},
           {"q_min", {[](C& c, const std::string& v) { c.sender.q_min = int_range(parse_integer(v), 1, 64); },
                      [](const C& c) { return std::to_string(c.sender.q_min); }}},
           {"q_max", {[](C& c, const std::string& v) { c.sender.q_max = int_range(parse_integer(v), 1, 64); },
                      [](const C& c) { return std::to_string(c.sender.q_max); }}},
       }},
      {"loss",
       {
           {"kind", {[](C& c, const std::string& v) {
                       if (v == "bernoulli") c.loss.kind = LossKind::kBernoulli;
                       else if (v == "gilbert-elliott") c.loss.kind = LossKind::kGilbertElliott;
                       else throw ValueError{"expected bernoulli or gilbert-elliott"};
                     },
                     [](const C& c) {
                       return std::string(c.loss.kind == LossKind::kBernoulli ? "bernoulli" : "gilbert-elliott");
                     }}},
           {"p_loss", {[](C& c, const std::string& v) { c.loss.p_loss = probability(parse_double(v)); },
                       [](const C& c) { return format_double(c.loss.p_loss); }}},
           {"p_good_bad", {[](C& c, const std::string& v) { c.loss.p_good_bad = probability(parse_double(v)); },
                           [](const C& c) { return format_double(c.loss.p_good_bad); }}},
           {"p_bad_good", {[](C& c, const std::string& v) { c.loss.p_bad_good = probability(parse_double(v)); },
                           [](const C& c) { return format_double(c.loss.p_bad_good); }}},
           {"p_loss_bad", {[](C& c, const std::string& v) { c.loss.p_loss_bad = probability(parse_double(v)); },
                           [](const C& c) { return format_double(c.loss.p_loss_bad); }}},
           {"slice_height", {[](C& c, const std::string& v) { c.loss.slice_height = int_range(parse_integer(v), 1, 1 << 16); },
                             [](const C& c) { return std::to_string(c.loss.slice_height); }}},
           {"seed", {[](C& c, const std::string& v) {
                       std::uint64_t out = 0;
                       auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
                       if (ec != std::errc() || p != v.data() + v.size()) {
                         throw ValueError{"expected a non-negative integer"};
                       }
                       c.loss.seed = out;
                     },
                     [](const C& c) { return std::to_string(c.loss.seed); }}},
       }},
  };
  return s;
}

const Key* find_key(const std::string& section, const std::string& key) {
  for (const auto& [name, keys] : schema()) {
    if (name != section) continue;
    for (const auto& [k, entry] : keys) {
      if (k == key) return &entry;
    }
  }
  return nullptr;
}

bool known_section(const std::string& section) {
  for (const auto& [name, keys] : schema()) {
    if (name == section) return true;
  }
  return false;
}

}  // namespace

PipelineConfig parse_config_text(std::string_view text, const std::string& source,
                                 const std::filesystem::path& base_dir) {
  PipelineConfig config;
  std::string section = "pipeline";
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  int weights_line = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_section(section)) throw fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Key* entry = find_key(section, key);
    if (entry == nullptr) throw fail("unknown key '" + key + "' in [" + section + "]");
    try {
      entry->set(config, value);
    } catch (const ValueError& e) {
      throw fail(key + " = " + value + ": " + e.message);
    }
    if (section == "video_denoiser" && key == "weights") weights_line = line_no;
  }

  if (!config.weights_path.empty()) {
    std::filesystem::path p(config.weights_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (config.video.mode == BlockMode::kConv) {
      config.video.conv_weights = std::make_shared<const ConvWeightSet>(load_weights(p));
    }
  }
  if (config.video.mode == BlockMode::kConv && !config.video.conv_weights) {
    line_no = weights_line;
    throw fail("[video_denoiser] mode = conv requires a weights file");
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_config_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                           path.string(), path.parent_path());
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& [section, keys] : schema()) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& [key, entry] : keys) {
      const std::string value = entry.get(config);
      if (key == "weights" && value.empty()) continue;
      out += key + " = " + value + "\n";
    }
  }
  return out;
}

}  // namespace rtdenoise
