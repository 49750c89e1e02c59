#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rtdenoise/frame.hpp"

namespace rtdenoise {

// YUV4MPEG2. Accepted colour spaces: C420 (and its jpeg/mpeg2/paldv siting
// variants), Cmono, or no C tag (treated as 4:2:0). Errors throw FormatError
// carrying the byte offset where parsing stopped.
VideoSequence read_y4m(std::span<const std::uint8_t> bytes);
VideoSequence read_y4m_file(const std::filesystem::path& path);

// Writes `YUV4MPEG2 W.. H.. F..:.. C420|Cmono` followed by the frames.
// Returns the number of bytes written.
std::size_t write_y4m(const VideoSequence& sequence, std::ostream& out);
void write_y4m_file(const VideoSequence& sequence,
                    const std::filesystem::path& path);

// Binary PGM (P5) with maxval 255; header comments are skipped.
Frame read_pgm(std::span<const std::uint8_t> bytes);
Frame read_pgm_file(const std::filesystem::path& path);
std::size_t write_pgm(const Frame& frame, std::ostream& out);
void write_pgm_file(const Frame& frame, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace rtdenoise
