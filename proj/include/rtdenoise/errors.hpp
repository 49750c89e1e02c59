#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtdenoise {

// Malformed input data: bad file headers, truncated payloads, checksum
// mismatches. The CLI maps these to exit code 2.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
  FormatError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (at byte offset " +
                           std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Invalid configuration file or value; message carries file:line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rtdenoise
