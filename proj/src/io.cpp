#include "vmatte/io.hpp"

#include <png.h>

#include <jpeglib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <memory>

namespace vmatte::io {

namespace fs = std::filesystem;

FormatError::FormatError(const fs::path& file, const std::string& what,
                         std::optional<std::uint64_t> offset)
    : std::runtime_error(file.string() + ": " + what +
                         (offset ? " (byte offset " + std::to_string(*offset) + ")" : std::string())),
      file_(file),
      offset_(offset) {}

std::uint8_t quantize8(Real v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

std::uint16_t quantize16(Real v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(c * 65535.0));
}

namespace {

// RAII holder for the libpng simplified-API control structure.
struct PngImage {
  png_image img{};
  PngImage() {
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

[[noreturn]] void png_fail(const fs::path& file, const png_image& img, const char* stage) {
  throw FormatError(file, std::string(stage) + ": " + img.message);
}

void begin_png(PngImage& png, const fs::path& file) {
  if (!fs::exists(file)) throw FormatError(file, "no such file");
  if (!png_image_begin_read_from_file(&png.img, file.c_str())) png_fail(file, png.img, "png header");
}

void write_png(const fs::path& file, png_uint_32 format, Index height, Index width, const void* data) {
  PngImage png;
  png.img.format = format;
  png.img.width = static_cast<png_uint_32>(width);
  png.img.height = static_cast<png_uint_32>(height);
  if (!png_image_write_to_file(&png.img, file.c_str(), 0, data, 0, nullptr))
    throw FormatError(file, std::string("png write: ") + png.img.message);
}

}  // namespace

ImageRGB read_rgb(const fs::path& file) {
  PngImage png;
  begin_png(png, file);
  png.img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.img));
  if (!png_image_finish_read(&png.img, nullptr, buf.data(), 0, nullptr)) png_fail(file, png.img, "png read");
  const Index h = png.img.height;
  const Index w = png.img.width;
  ImageRGB out(h, w);
  std::size_t k = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out[c](y, x) = static_cast<Real>(buf[k++]) / Real(255);
  return out;
}

void write_rgb8(const fs::path& file, const ImageRGB& img) {
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(img.rows() * img.cols() * 3));
  std::size_t k = 0;
  for (Index y = 0; y < img.rows(); ++y)
    for (Index x = 0; x < img.cols(); ++x)
      for (int c = 0; c < 3; ++c) buf[k++] = quantize8(img[c](y, x));
  write_png(file, PNG_FORMAT_RGB, img.rows(), img.cols(), buf.data());
}

GrayMap read_gray(const fs::path& file) {
  PngImage png;
  begin_png(png, file);
  // 16-bit files carry the linear flag in their natural format; read them
  // unconverted so codes survive exactly.
  const bool sixteen = (png.img.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const Index h = png.img.height;
  const Index w = png.img.width;
  GrayMap out(h, w);
  if (sixteen) {
    png.img.format = PNG_FORMAT_LINEAR_Y;
    std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(png.img) / 2);
    if (!png_image_finish_read(&png.img, nullptr, buf.data(), 0, nullptr)) png_fail(file, png.img, "png read");
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        out[0](y, x) = static_cast<Real>(static_cast<double>(buf[static_cast<std::size_t>(y * w + x)]) / 65535.0);
  } else {
    png.img.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.img));
    if (!png_image_finish_read(&png.img, nullptr, buf.data(), 0, nullptr)) png_fail(file, png.img, "png read");
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        out[0](y, x) = static_cast<Real>(buf[static_cast<std::size_t>(y * w + x)]) / Real(255);
  }
  return out;
}

void write_gray16(const fs::path& file, const GrayMap& map) {
  std::vector<std::uint16_t> buf(static_cast<std::size_t>(map.rows() * map.cols()));
  std::size_t k = 0;
  for (Index y = 0; y < map.rows(); ++y)
    for (Index x = 0; x < map.cols(); ++x) buf[k++] = quantize16(map[0](y, x));
  write_png(file, PNG_FORMAT_LINEAR_Y, map.rows(), map.cols(), buf.data());
}

Plane<std::uint8_t> read_gray8(const fs::path& file) {
  PngImage png;
  begin_png(png, file);
  if (png.img.format & PNG_FORMAT_FLAG_LINEAR) throw FormatError(file, "expected an 8-bit grayscale image");
  png.img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.img));
  if (!png_image_finish_read(&png.img, nullptr, buf.data(), 0, nullptr)) png_fail(file, png.img, "png read");
  Plane<std::uint8_t> out(static_cast<Index>(png.img.height), static_cast<Index>(png.img.width));
  std::copy(buf.begin(), buf.end(), out.data());
  return out;
}

void write_gray8(const fs::path& file, const Plane<std::uint8_t>& plane) {
  write_png(file, PNG_FORMAT_GRAY, plane.rows(), plane.cols(), plane.data());
}

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  static_assert(sizeof(T) == 4);
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t at) {
  static_assert(sizeof(T) == 4);
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_flo(const FlowField& flow) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + static_cast<std::size_t>(flow.rows() * flow.cols() * 8));
  put_le(out, kFloTag);
  put_le(out, static_cast<std::int32_t>(flow.cols()));
  put_le(out, static_cast<std::int32_t>(flow.rows()));
  for (Index y = 0; y < flow.rows(); ++y)
    for (Index x = 0; x < flow.cols(); ++x) {
      put_le(out, static_cast<float>(flow[0](y, x)));
      put_le(out, static_cast<float>(flow[1](y, x)));
    }
  return out;
}

FlowField decode_flo(const std::vector<std::uint8_t>& bytes, const fs::path& name) {
  if (bytes.size() < 12) throw FormatError(name, "truncated .flo header", bytes.size());
  if (get_le<float>(bytes, 0) != kFloTag) throw FormatError(name, "bad .flo tag", 0);
  const auto w = get_le<std::int32_t>(bytes, 4);
  const auto h = get_le<std::int32_t>(bytes, 8);
  if (w < 1) throw FormatError(name, "invalid width " + std::to_string(w), 4);
  if (h < 1) throw FormatError(name, "invalid height " + std::to_string(h), 8);
  const std::uint64_t need = 12 + static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h) * 8;
  if (bytes.size() < need)
    throw FormatError(name, "truncated .flo payload, expected " + std::to_string(need) + " bytes",
                      bytes.size());
  if (bytes.size() > need) throw FormatError(name, "trailing bytes after .flo payload", need);
  FlowField flow(h, w);
  std::size_t at = 12;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      for (int c = 0; c < 2; ++c) {
        const float v = get_le<float>(bytes, at);
        if (!std::isfinite(v)) throw FormatError(name, "non-finite flow component", at);
        flow[c](y, x) = v;
        at += 4;
      }
    }
  return flow;
}

FlowField read_flo(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(file, "cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_flo(bytes, file);
}

void write_flo(const fs::path& file, const FlowField& flow) {
  const auto bytes = encode_flo(flow);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError(file, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(file, "write failed");
}

namespace {

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Both helpers keep every C++ object with a destructor outside the setjmp
// scope; only plain buffers owned by the caller are touched in between.
bool encode_jpeg(const std::uint8_t* rgb, int width, int height, int quality, unsigned char** out,
                 unsigned long* out_size, char* message) {
  jpeg_compress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::memcpy(message, err.message, JMSG_LENGTH_MAX);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, out, out_size);
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(rgb + static_cast<std::size_t>(cinfo.next_scanline) * 3 *
                                               static_cast<std::size_t>(width));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

bool decode_jpeg(const unsigned char* data, unsigned long size, std::uint8_t* rgb, int width, int height,
                 char* message) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    std::memcpy(message, err.message, JMSG_LENGTH_MAX);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, size);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&cinfo);
  if (static_cast<int>(cinfo.output_width) != width || static_cast<int>(cinfo.output_height) != height ||
      cinfo.output_components != 3) {
    std::snprintf(message, JMSG_LENGTH_MAX, "decoded jpeg has unexpected geometry");
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb + static_cast<std::size_t>(cinfo.output_scanline) * 3 * static_cast<std::size_t>(width);
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace

ImageRGB jpeg_roundtrip(const ImageRGB& img, int quality) {
  const int w = static_cast<int>(img.cols());
  const int h = static_cast<int>(img.rows());
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  std::size_t k = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) rgb[k++] = quantize8(img[c](y, x));

  unsigned char* encoded = nullptr;
  unsigned long encoded_size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_jpeg(rgb.data(), w, h, quality, &encoded, &encoded_size, message);
  std::unique_ptr<unsigned char, decltype(&std::free)> owned(encoded, &std::free);
  if (!ok) throw std::runtime_error(std::string("jpeg encode: ") + message);
  if (!decode_jpeg(encoded, encoded_size, rgb.data(), w, h, message))
    throw std::runtime_error(std::string("jpeg decode: ") + message);

  ImageRGB out(h, w);
  k = 0;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) out[c](y, x) = static_cast<Real>(rgb[k++]) / Real(255);
  return out;
}

std::string indexed_name(const std::string& prefix, int index, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d", index);
  return prefix + "_" + buf + ext;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw FormatError(dir, "not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

}  // namespace vmatte::io
