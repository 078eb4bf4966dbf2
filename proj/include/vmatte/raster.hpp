#pragma once

// Dense planar rasters built on Eigen arrays.
//
// A Raster<Scalar, Channels> stores one row-major Eigen array per channel so
// per-channel work reads as ordinary Eigen expressions. Coordinates follow the
// image convention: x is the column index, y is the row index, origin at the
// top-left pixel.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vmatte {

using Index = Eigen::Index;

template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar, int Channels>
class Raster {
 public:
  static_assert(Channels >= 1, "a raster needs at least one channel");
  using scalar_type = Scalar;
  static constexpr int channels = Channels;

  Raster() = default;

  Raster(Index height, Index width) {
    for (auto& p : planes_) p.resize(height, width);
  }

  Raster(Index height, Index width, Scalar fill) {
    for (auto& p : planes_) p.setConstant(height, width, fill);
  }

  static Raster Zero(Index height, Index width) { return Raster(height, width, Scalar(0)); }

  Index rows() const { return planes_[0].rows(); }
  Index cols() const { return planes_[0].cols(); }
  Index height() const { return rows(); }
  Index width() const { return cols(); }
  bool empty() const { return rows() == 0 || cols() == 0; }

  Plane<Scalar>& operator[](int c) { return planes_[static_cast<std::size_t>(c)]; }
  const Plane<Scalar>& operator[](int c) const { return planes_[static_cast<std::size_t>(c)]; }

  Scalar& operator()(Index y, Index x, int c = 0) { return (*this)[c](y, x); }
  Scalar operator()(Index y, Index x, int c = 0) const { return (*this)[c](y, x); }

  auto begin() { return planes_.begin(); }
  auto end() { return planes_.end(); }
  auto begin() const { return planes_.begin(); }
  auto end() const { return planes_.end(); }

  template <typename Other>
  Raster<Other, Channels> cast() const {
    Raster<Other, Channels> out;
    for (int c = 0; c < Channels; ++c) out[c] = (*this)[c].template cast<Other>();
    return out;
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int c = 0; c < Channels; ++c)
      if (!(a[c] == b[c]).all()) return false;
    return true;
  }

 private:
  std::array<Plane<Scalar>, Channels> planes_;
};

template <typename Scalar> using Image3 = Raster<Scalar, 3>;
template <typename Scalar> using Image1 = Raster<Scalar, 1>;
template <typename Scalar> using Flow = Raster<Scalar, 2>;

// Working precision of the toolkit.
using Real = float;
using ImageRGB = Image3<Real>;
using GrayMap = Image1<Real>;
using FlowField = Flow<Real>;
using ConsistencyMap = Image1<Real>;
using ValidityMask = Plane<std::uint8_t>;

template <typename A, typename B>
bool same_shape(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (!same_shape(a, b))
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

template <typename Scalar>
Flow<Scalar> constant_flow(Index height, Index width, Scalar dx, Scalar dy) {
  Flow<Scalar> f(height, width);
  f[0].setConstant(dx);
  f[1].setConstant(dy);
  return f;
}

template <typename Scalar, int C>
Scalar min_value(const Raster<Scalar, C>& r) {
  Scalar m = r[0].minCoeff();
  for (int c = 1; c < C; ++c) m = std::min(m, r[c].minCoeff());
  return m;
}

template <typename Scalar, int C>
Scalar max_value(const Raster<Scalar, C>& r) {
  Scalar m = r[0].maxCoeff();
  for (int c = 1; c < C; ++c) m = std::max(m, r[c].maxCoeff());
  return m;
}

template <typename Scalar, int C>
Raster<Scalar, C> clamp01(Raster<Scalar, C> r) {
  for (auto& p : r) p = p.max(Scalar(0)).min(Scalar(1));
  return r;
}

}  // namespace vmatte
