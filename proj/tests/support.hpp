#pragma once

// Test-only helpers: synthetic inputs and brute-force reference
// implementations that share no code with the library paths they check.

#include "vmatte/raster.hpp"
#include "vmatte/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace vmatte::test {

// Random source that always returns zero from both primitives.
class ZeroRandom final : public RandomSource {
 public:
  double uniform01() override { return 0.0; }
  double standard_normal() override { return 0.0; }
};

// Counts primitive draws and forwards to a seeded engine.
class CountingRandom final : public RandomSource {
 public:
  explicit CountingRandom(std::uint64_t seed) : inner_(seed) {}
  double uniform01() override {
    ++uniform_draws;
    return inner_.uniform01();
  }
  double standard_normal() override {
    ++normal_draws;
    return inner_.standard_normal();
  }
  int uniform_draws = 0;
  int normal_draws = 0;

 private:
  SeededRandom inner_;
};

inline std::mt19937_64& test_engine() {
  static std::mt19937_64 e(0x5eed);
  return e;
}

inline double urand(std::mt19937_64& e, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(e);
}

template <int C>
Raster<Real, C> random_raster(Index h, Index w, std::mt19937_64& e) {
  Raster<Real, C> r(h, w);
  for (int c = 0; c < C; ++c)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) r[c](y, x) = static_cast<Real>(urand(e));
  return r;
}

inline FlowField random_flow(Index h, Index w, double amplitude, std::mt19937_64& e) {
  FlowField f(h, w);
  for (int c = 0; c < 2; ++c)
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) f[c](y, x) = static_cast<Real>(urand(e, -amplitude, amplitude));
  return f;
}

// Deterministic value-noise texture with blocky 8-bit-friendly detail.
inline ImageRGB textured_image(Index h, Index w, std::uint64_t seed) {
  std::mt19937_64 e(seed);
  ImageRGB img(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img[c](y, x) = static_cast<Real>(std::uniform_int_distribution<int>(0, 255)(e)) / 255.0f;
  return img;
}

inline GrayMap disk_alpha(Index h, Index w, double cx, double cy, double radius) {
  GrayMap a(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const double d = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
      a[0](y, x) = static_cast<Real>(std::clamp(radius + 0.5 - d, 0.0, 1.0));
    }
  return a;
}

// Scalar bilinear sample with clamped coordinates, written directly from the
// definition.
inline double ref_sample(const Plane<Real>& p, double sx, double sy) {
  const double W = static_cast<double>(p.cols());
  const double H = static_cast<double>(p.rows());
  sx = std::min(std::max(sx, 0.0), W - 1.0);
  sy = std::min(std::max(sy, 0.0), H - 1.0);
  const double fx0 = std::floor(sx), fy0 = std::floor(sy);
  const double ax = sx - fx0, ay = sy - fy0;
  auto at = [&](double yy, double xx) {
    const auto iy = static_cast<Index>(std::min(yy, H - 1.0));
    const auto ix = static_cast<Index>(std::min(xx, W - 1.0));
    return static_cast<double>(p(iy, ix));
  };
  return (1 - ax) * (1 - ay) * at(fy0, fx0) + ax * (1 - ay) * at(fy0, fx0 + 1) + (1 - ax) * ay * at(fy0 + 1, fx0) +
         ax * ay * at(fy0 + 1, fx0 + 1);
}

inline double ref_warp_at(const Plane<Real>& src, const FlowField& flow, Index y, Index x) {
  return ref_sample(src, static_cast<double>(x) + flow[0](y, x), static_cast<double>(y) + flow[1](y, x));
}

// Morphology by direct window scan: dilation/erosion with a (2k+1)^2 window,
// pixels outside the frame counted as background.
inline Plane<std::uint8_t> ref_window_morph(const Plane<std::uint8_t>& m, int k, bool dilate) {
  Plane<std::uint8_t> out(m.rows(), m.cols());
  for (Index y = 0; y < m.rows(); ++y)
    for (Index x = 0; x < m.cols(); ++x) {
      bool any = false, all = true;
      for (Index dy = -k; dy <= k; ++dy)
        for (Index dx = -k; dx <= k; ++dx) {
          const Index yy = y + dy, xx = x + dx;
          const bool v = yy >= 0 && yy < m.rows() && xx >= 0 && xx < m.cols() && m(yy, xx) != 0;
          any = any || v;
          all = all && v;
        }
      out(y, x) = (dilate ? any : all) ? 1 : 0;
    }
  return out;
}

inline double psnr(const ImageRGB& a, const ImageRGB& b) {
  double se = 0.0;
  for (int c = 0; c < 3; ++c) se += (a[c].cast<double>() - b[c].cast<double>()).square().sum();
  const double mse = se / static_cast<double>(3 * a.rows() * a.cols());
  if (mse == 0.0) return 1e9;
  return 10.0 * std::log10(1.0 / mse);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("vmatte_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// Writes a small asset library: `n_fg` textured portraits with disk alphas
// and `n_bg` background clips of `bg_frames` frames.
void write_assets(const std::filesystem::path& root, Index h, Index w, int n_fg, int n_bg, int bg_frames);

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p);

}  // namespace vmatte::test
