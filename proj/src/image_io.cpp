#include "rtdenoise/image_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

#include "rtdenoise/errors.hpp"

namespace rtdenoise {

namespace {

constexpr std::string_view kY4mMagic = "YUV4MPEG2";
constexpr std::string_view kFrameTag = "FRAME";

// Returns the line starting at `pos` (without the newline) and advances
// `pos` past the newline.
std::string_view take_line(std::span<const std::uint8_t> bytes,
                           std::size_t& pos, std::string_view what) {
  const std::size_t start = pos;
  while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
  if (pos >= bytes.size()) {
    throw FormatError("unterminated " + std::string(what) + " line", start);
  }
  std::string_view line(reinterpret_cast<const char*>(bytes.data()) + start,
                        pos - start);
  ++pos;
  return line;
}

bool parse_int(std::string_view text, int& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

void expect_ok(std::ostream& out) {
  if (!out) throw std::runtime_error("write to output stream failed");
}

}  // namespace

VideoSequence read_y4m(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string_view header = take_line(bytes, pos, "stream header");
  if (header.substr(0, kY4mMagic.size()) != kY4mMagic ||
      (header.size() > kY4mMagic.size() && header[kY4mMagic.size()] != ' ')) {
    throw FormatError("missing YUV4MPEG2 magic", 0);
  }

  int width = 0;
  int height = 0;
  FrameRate rate;
  ChromaFormat format = ChromaFormat::k420;
  std::size_t token_start = kY4mMagic.size();
  while (token_start < header.size()) {
    while (token_start < header.size() && header[token_start] == ' ') {
      ++token_start;
    }
    std::size_t token_end = header.find(' ', token_start);
    if (token_end == std::string_view::npos) token_end = header.size();
    const std::string_view token =
        header.substr(token_start, token_end - token_start);
    if (!token.empty()) {
      const std::string_view value = token.substr(1);
      switch (token[0]) {
        case 'W':
          if (!parse_int(value, width) || width <= 0) {
            throw FormatError("bad width parameter", token_start);
          }
          break;
        case 'H':
          if (!parse_int(value, height) || height <= 0) {
            throw FormatError("bad height parameter", token_start);
          }
          break;
        case 'F': {
          const std::size_t colon = value.find(':');
          if (colon == std::string_view::npos ||
              !parse_int(value.substr(0, colon), rate.num) ||
              !parse_int(value.substr(colon + 1), rate.den) || rate.num <= 0 ||
              rate.den <= 0) {
            throw FormatError("bad frame rate parameter", token_start);
          }
          break;
        }
        case 'C':
          if (value == "mono") {
            format = ChromaFormat::kMono;
          } else if (value == "420" || value == "420jpeg" ||
                     value == "420mpeg2" || value == "420paldv") {
            format = ChromaFormat::k420;
          } else {
            throw FormatError("unsupported colorspace C" + std::string(value),
                              token_start);
          }
          break;
        default:
          // I (interlacing), A (aspect), X (extensions) carry no plane data.
          break;
      }
    }
    token_start = token_end;
  }
  if (width == 0 || height == 0) {
    throw FormatError("stream header lacks W or H", 0);
  }

  const std::size_t luma_size = static_cast<std::size_t>(width) * height;
  const std::size_t chroma_size =
      format == ChromaFormat::k420
          ? static_cast<std::size_t>((width + 1) / 2) * ((height + 1) / 2)
          : 0;

  VideoSequence sequence;
  sequence.frame_rate = rate;
  while (pos < bytes.size()) {
    const std::size_t frame_start = pos;
    const std::string_view line = take_line(bytes, pos, "frame header");
    if (line.substr(0, kFrameTag.size()) != kFrameTag ||
        (line.size() > kFrameTag.size() && line[kFrameTag.size()] != ' ')) {
      throw FormatError("expected FRAME marker", frame_start);
    }
    const std::size_t needed = luma_size + 2 * chroma_size;
    if (bytes.size() - pos < needed) {
      throw FormatError("truncated frame payload: need " +
                            std::to_string(needed) + " bytes, have " +
                            std::to_string(bytes.size() - pos),
                        pos);
    }
    auto plane = [&](std::size_t n) {
      std::vector<std::uint8_t> out(bytes.begin() + pos,
                                    bytes.begin() + pos + n);
      pos += n;
      return out;
    };
    auto luma = plane(luma_size);
    if (format == ChromaFormat::k420) {
      auto cb = plane(chroma_size);
      auto cr = plane(chroma_size);
      sequence.frames.emplace_back(width, height, std::move(luma),
                                   std::move(cb), std::move(cr));
    } else {
      sequence.frames.emplace_back(width, height, std::move(luma));
    }
  }
  return sequence;
}

std::size_t write_y4m(const VideoSequence& sequence, std::ostream& out) {
  if (sequence.empty()) {
    throw std::invalid_argument("write_y4m: empty sequence");
  }
  sequence.validate();
  const Frame& first = sequence.frames.front();
  const std::string header =
      std::string(kY4mMagic) + " W" + std::to_string(first.width()) + " H" +
      std::to_string(first.height()) + " F" +
      std::to_string(sequence.frame_rate.num) + ":" +
      std::to_string(sequence.frame_rate.den) +
      (first.has_chroma() ? " C420" : " Cmono") + "\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::size_t total = header.size();
  auto put = [&](std::span<const std::uint8_t> plane) {
    out.write(reinterpret_cast<const char*>(plane.data()),
              static_cast<std::streamsize>(plane.size()));
    total += plane.size();
  };
  for (const Frame& frame : sequence.frames) {
    out.write("FRAME\n", 6);
    total += 6;
    put(frame.luma());
    if (frame.has_chroma()) {
      put(frame.cb());
      put(frame.cr());
    }
  }
  out.flush();
  expect_ok(out);
  return total;
}

Frame read_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_number = [&](const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos;
    int value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      if (value > 100000000) throw FormatError(std::string(what) + " too large", start);
      value = value * 10 + (bytes[pos] - '0');
      ++pos;
    }
    if (pos == start) {
      throw FormatError(std::string("expected ") + what, start);
    }
    return value;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) file", 0);
  }
  pos = 2;
  const int width = read_number("width");
  const int height = read_number("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_number("maxval");
  if (maxval != 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval),
                      maxval_at);
  }
  if (width <= 0 || height <= 0) {
    throw FormatError("PGM dimensions must be positive", 2);
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("missing whitespace after PGM header", pos);
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < n) {
    throw FormatError("truncated PGM raster", pos);
  }
  return Frame(width, height,
               std::vector<std::uint8_t>(bytes.begin() + pos,
                                         bytes.begin() + pos + n));
}

std::size_t write_pgm(const Frame& frame, std::ostream& out) {
  const std::string header = "P5\n" + std::to_string(frame.width()) + " " +
                             std::to_string(frame.height()) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(frame.luma().data()),
            static_cast<std::streamsize>(frame.pixel_count()));
  out.flush();
  expect_ok(out);
  return header.size() + frame.pixel_count();
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

VideoSequence read_y4m_file(const std::filesystem::path& path) {
  return read_y4m(read_file_bytes(path));
}

Frame read_pgm_file(const std::filesystem::path& path) {
  return read_pgm(read_file_bytes(path));
}

void write_y4m_file(const VideoSequence& sequence,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  write_y4m(sequence, out);
}

void write_pgm_file(const Frame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  write_pgm(frame, out);
}

}  // namespace rtdenoise
