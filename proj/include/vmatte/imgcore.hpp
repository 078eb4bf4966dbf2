#pragma once

// Resampling, warping and compositing on planar rasters.
//
// Flows use the backward-sampling convention: a flow attached to the output
// raster says where to read in the source, output(x, y) = src(x + dx, y + dy).
// All sampling is bilinear with border replication (clamped coordinates).

#include "vmatte/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace vmatte {

namespace detail {

struct LerpTap {
  Index i0;
  Index i1;
  double frac;
};

// Clamps a continuous sample coordinate into [0, size - 1] and splits it into
// two neighbouring taps plus the fractional weight of the second one.
inline LerpTap clamped_tap(double s, Index size) {
  const double hi = static_cast<double>(size - 1);
  s = std::clamp(s, 0.0, hi);
  const auto i0 = static_cast<Index>(std::floor(s));
  const Index i1 = std::min<Index>(i0 + 1, size - 1);
  return {i0, i1, s - static_cast<double>(i0)};
}

template <typename Scalar>
inline Scalar lerp(Scalar a, Scalar b, Scalar t) {
  return a + t * (b - a);
}

template <typename Scalar>
inline Scalar bilinear(const Plane<Scalar>& p, const LerpTap& tx, const LerpTap& ty) {
  const auto fx = static_cast<Scalar>(tx.frac);
  const auto fy = static_cast<Scalar>(ty.frac);
  const Scalar top = lerp(p(ty.i0, tx.i0), p(ty.i0, tx.i1), fx);
  const Scalar bot = lerp(p(ty.i1, tx.i0), p(ty.i1, tx.i1), fx);
  return lerp(top, bot, fy);
}

}  // namespace detail

// Bilinear backward warp with border replication.
template <typename Scalar, int C, typename FlowScalar>
Raster<Scalar, C> warp_backward(const Raster<Scalar, C>& src, const Flow<FlowScalar>& flow) {
  require_same_shape(src, flow, "warp_backward");
  const Index h = src.rows();
  const Index w = src.cols();
  Raster<Scalar, C> out(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const auto tx = detail::clamped_tap(static_cast<double>(x) + static_cast<double>(flow[0](y, x)), w);
      const auto ty = detail::clamped_tap(static_cast<double>(y) + static_cast<double>(flow[1](y, x)), h);
      for (int c = 0; c < C; ++c) out[c](y, x) = detail::bilinear(src[c], tx, ty);
    }
  }
  return out;
}

// 1 where the flow lands inside a src_height x src_width source, else 0.
template <typename FlowScalar>
ValidityMask validity_mask(const Flow<FlowScalar>& flow, Index src_height, Index src_width) {
  ValidityMask mask(flow.rows(), flow.cols());
  const double xmax = static_cast<double>(src_width - 1);
  const double ymax = static_cast<double>(src_height - 1);
  for (Index y = 0; y < flow.rows(); ++y) {
    for (Index x = 0; x < flow.cols(); ++x) {
      const double sx = static_cast<double>(x) + static_cast<double>(flow[0](y, x));
      const double sy = static_cast<double>(y) + static_cast<double>(flow[1](y, x));
      mask(y, x) = (sx >= 0.0 && sx <= xmax && sy >= 0.0 && sy <= ymax) ? 1 : 0;
    }
  }
  return mask;
}

template <typename FlowScalar>
ValidityMask validity_mask(const Flow<FlowScalar>& flow) {
  return validity_mask(flow, flow.rows(), flow.cols());
}

// out = alpha * fg + (1 - alpha) * bg, per channel.
template <typename Scalar, int C>
Raster<Scalar, C> composite_over(const Raster<Scalar, C>& fg, const Image1<Scalar>& alpha,
                                 const Raster<Scalar, C>& bg) {
  require_same_shape(fg, alpha, "composite_over");
  require_same_shape(fg, bg, "composite_over");
  Raster<Scalar, C> out;
  for (int c = 0; c < C; ++c) out[c] = alpha[0] * fg[c] + (Scalar(1) - alpha[0]) * bg[c];
  return out;
}

// Bilinear resampling of the rectangle [x0, x0 + w) x [y0, y0 + h) of src onto
// an out_height x out_width grid, using half-pixel-centre coordinate mapping.
template <typename Scalar, int C>
Raster<Scalar, C> resample_region(const Raster<Scalar, C>& src, double x0, double y0, double w,
                                  double h, Index out_height, Index out_width) {
  if (out_height < 1 || out_width < 1)
    throw std::invalid_argument("resample_region: output dimensions must be >= 1");
  if (src.empty()) throw std::invalid_argument("resample_region: empty source");

  std::vector<detail::LerpTap> xs(static_cast<std::size_t>(out_width));
  std::vector<detail::LerpTap> ys(static_cast<std::size_t>(out_height));
  const double sx = w / static_cast<double>(out_width);
  const double sy = h / static_cast<double>(out_height);
  for (Index x = 0; x < out_width; ++x)
    xs[static_cast<std::size_t>(x)] =
        detail::clamped_tap(x0 + (static_cast<double>(x) + 0.5) * sx - 0.5, src.cols());
  for (Index y = 0; y < out_height; ++y)
    ys[static_cast<std::size_t>(y)] =
        detail::clamped_tap(y0 + (static_cast<double>(y) + 0.5) * sy - 0.5, src.rows());

  Raster<Scalar, C> out(out_height, out_width);
  Plane<Scalar> rows_pass(src.rows(), out_width);
  for (int c = 0; c < C; ++c) {
    const Plane<Scalar>& p = src[c];
    for (Index x = 0; x < out_width; ++x) {
      const auto& t = xs[static_cast<std::size_t>(x)];
      const auto f = static_cast<Scalar>(t.frac);
      rows_pass.col(x) = p.col(t.i0) + f * (p.col(t.i1) - p.col(t.i0));
    }
    for (Index y = 0; y < out_height; ++y) {
      const auto& t = ys[static_cast<std::size_t>(y)];
      const auto f = static_cast<Scalar>(t.frac);
      out[c].row(y) = rows_pass.row(t.i0) + f * (rows_pass.row(t.i1) - rows_pass.row(t.i0));
    }
  }
  return out;
}

template <typename Scalar, int C>
Raster<Scalar, C> resize_bilinear(const Raster<Scalar, C>& src, Index new_height, Index new_width) {
  return resample_region(src, 0.0, 0.0, static_cast<double>(src.cols()),
                         static_cast<double>(src.rows()), new_height, new_width);
}

// BT.601 luma.
template <typename Scalar>
Image1<Scalar> luma(const Image3<Scalar>& img) {
  Image1<Scalar> out;
  out[0] = (Scalar(0.299) * img[0] + Scalar(0.587) * img[1] + Scalar(0.114) * img[2])
               .max(Scalar(0))
               .min(Scalar(1));
  return out;
}

template <typename Scalar, int C>
Raster<Scalar, C> flip_horizontal(const Raster<Scalar, C>& src) {
  Raster<Scalar, C> out;
  for (int c = 0; c < C; ++c) out[c] = src[c].rowwise().reverse();
  return out;
}

// Backward flow that rotates content by angle_deg about the raster centre.
template <typename Scalar>
Flow<Scalar> rotation_flow(Index height, Index width, double angle_deg) {
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = 0.5 * static_cast<double>(width - 1);
  const double cy = 0.5 * static_cast<double>(height - 1);
  Flow<Scalar> f(height, width);
  for (Index y = 0; y < height; ++y) {
    for (Index x = 0; x < width; ++x) {
      const double px = static_cast<double>(x) - cx;
      const double py = static_cast<double>(y) - cy;
      const double sx = cs * px + sn * py + cx;
      const double sy = -sn * px + cs * py + cy;
      f[0](y, x) = static_cast<Scalar>(sx - static_cast<double>(x));
      f[1](y, x) = static_cast<Scalar>(sy - static_cast<double>(y));
    }
  }
  return f;
}

template <typename Scalar, int C>
Raster<Scalar, C> rotate_about_center(const Raster<Scalar, C>& src, double angle_deg) {
  if (angle_deg == 0.0) return src;
  return warp_backward(src, rotation_flow<Scalar>(src.rows(), src.cols(), angle_deg));
}

}  // namespace vmatte
