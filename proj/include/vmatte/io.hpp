#pragma once

// File interchange: PNG rasters and Middlebury .flo flow files.
//
// Frames are 8-bit RGB PNG. Alpha, probability and consistency maps are
// 16-bit grayscale PNG where code k stands for k / 65535. Validity masks and
// trimaps are 8-bit grayscale PNG. Flows use the Middlebury layout:
// little-endian float32 tag 202021.25, int32 width, int32 height, then
// row-major interleaved float32 (dx, dy).

#include "vmatte/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmatte::io {

inline constexpr float kFloTag = 202021.25f;

// Malformed or unreadable input. offset() is the byte position of the fault
// when the format makes one meaningful.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::filesystem::path& file, const std::string& what,
              std::optional<std::uint64_t> offset = std::nullopt);

  const std::filesystem::path& file() const { return file_; }
  std::optional<std::uint64_t> offset() const { return offset_; }

 private:
  std::filesystem::path file_;
  std::optional<std::uint64_t> offset_;
};

std::uint8_t quantize8(Real v);
std::uint16_t quantize16(Real v);

ImageRGB read_rgb(const std::filesystem::path& file);
void write_rgb8(const std::filesystem::path& file, const ImageRGB& img);

// Reads any grayscale PNG into [0, 1]; 8-bit codes map to k / 255 and 16-bit
// codes to k / 65535.
GrayMap read_gray(const std::filesystem::path& file);
void write_gray16(const std::filesystem::path& file, const GrayMap& map);

Plane<std::uint8_t> read_gray8(const std::filesystem::path& file);
void write_gray8(const std::filesystem::path& file, const Plane<std::uint8_t>& plane);

FlowField read_flo(const std::filesystem::path& file);
void write_flo(const std::filesystem::path& file, const FlowField& flow);

// Encodes/decodes .flo bytes without touching the filesystem. `name` only
// labels errors.
std::vector<std::uint8_t> encode_flo(const FlowField& flow);
FlowField decode_flo(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& name);

// JPEG round trip of an 8-bit quantised image (libjpeg, islow DCT).
ImageRGB jpeg_roundtrip(const ImageRGB& img, int quality);

// "<prefix>_0007.png" style name, 1-based index.
std::string indexed_name(const std::string& prefix, int index, const std::string& ext);

// Regular files with the given extension, sorted by file name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& ext);

}  // namespace vmatte::io
