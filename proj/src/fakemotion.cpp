#include "vmatte/fakemotion.hpp"

#include <stdexcept>
#include <string>

namespace vmatte {

void MotionSpec::validate() const {
  if (clip_length < 2) throw std::invalid_argument("MotionSpec: clip length must be >= 2");
  for (const auto& s : scales) {
    if (s.grid_divisor < 0) throw std::invalid_argument("MotionSpec: grid divisor must be >= 0");
    if (!(s.sigma > 0.0)) throw std::invalid_argument("MotionSpec: sigma must be > 0");
  }
  if (exit_shift_probability < 0.0 || exit_shift_probability > 1.0)
    throw std::invalid_argument("MotionSpec: exit shift probability outside [0, 1]");
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::up: return "up";
    case Side::down: return "down";
  }
  return "?";
}

FlowField synth_total_flow(Index height, Index width, const MotionSpec& spec, RandomSource& rng) {
  spec.validate();
  FlowField total = FlowField::Zero(height, width);
  for (const auto& scale : spec.scales) {
    const Index gh = scale.grid_divisor == 0 ? 1 : height / scale.grid_divisor;
    const Index gw = scale.grid_divisor == 0 ? 1 : width / scale.grid_divisor;
    if (gh < 1 || gw < 1)
      throw std::invalid_argument("synth_total_flow: " + std::to_string(height) + "x" + std::to_string(width) +
                                  " frame is smaller than grid cell " + std::to_string(scale.grid_divisor));
    FlowField grid(gh, gw);
    // x grid first, then y grid, each row-major.
    for (int c = 0; c < 2; ++c)
      for (Index y = 0; y < gh; ++y)
        for (Index x = 0; x < gw; ++x) grid[c](y, x) = static_cast<Real>(rng.normal(scale.sigma));
    if (gh == 1 && gw == 1) {
      total[0] += grid[0](0, 0);
      total[1] += grid[1](0, 0);
    } else {
      const FlowField up = resize_bilinear(grid, height, width);
      total[0] += up[0];
      total[1] += up[1];
    }
  }
  return total;
}

FlowField cumulative_flow(const FlowField& total, int frame_index, int clip_length) {
  if (clip_length < 1 || frame_index < 1 || frame_index > clip_length)
    throw std::invalid_argument("cumulative_flow: frame index " + std::to_string(frame_index) +
                                " outside [1, " + std::to_string(clip_length) + "]");
  FlowField out;
  for (int c = 0; c < 2; ++c)
    out[c] = (total[c].cast<double>() * static_cast<double>(frame_index - 1) / static_cast<double>(clip_length))
                 .cast<Real>();
  return out;
}

double triangle(double t) { return t <= 0.5 ? 2.0 * t : 2.0 * (1.0 - t); }

Vec2 side_offset(Side side, Index height, Index width) {
  const double hx = 0.5 * static_cast<double>(width);
  const double hy = 0.5 * static_cast<double>(height);
  switch (side) {
    case Side::left: return {hx, 0.0};
    case Side::right: return {-hx, 0.0};
    case Side::up: return {0.0, hy};
    case Side::down: return {0.0, -hy};
  }
  return Vec2::Zero();
}

std::vector<Side> admissible_exit_sides(const GrayMap& alpha, double opacity_threshold) {
  const auto& a = alpha[0];
  const auto thr = static_cast<Real>(opacity_threshold);
  const bool left_clear = !(a.col(0) > thr).any();
  const bool right_clear = !(a.col(a.cols() - 1) > thr).any();
  const bool top_clear = !(a.row(0) > thr).any();
  const bool bottom_clear = !(a.row(a.rows() - 1) > thr).any();
  std::vector<Side> sides;
  if (right_clear) sides.push_back(Side::left);
  if (left_clear) sides.push_back(Side::right);
  if (bottom_clear) sides.push_back(Side::up);
  if (top_clear) sides.push_back(Side::down);
  return sides;
}

std::vector<Vec2> exit_schedule(Side side, Index height, Index width, int clip_length) {
  if (clip_length < 2) throw std::invalid_argument("exit_schedule: clip length must be >= 2");
  const Vec2 full = side_offset(side, height, width);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(clip_length));
  for (int i = 1; i <= clip_length; ++i)
    out.push_back(full * triangle(static_cast<double>(i - 1) / static_cast<double>(clip_length - 1)));
  return out;
}

ExitShift exit_return_shift(const GrayMap& alpha, int clip_length, RandomSource& rng, const MotionSpec& spec) {
  ExitShift out;
  out.shifts.assign(static_cast<std::size_t>(clip_length), Vec2::Zero());
  if (!rng.bernoulli(spec.exit_shift_probability)) return out;
  const auto sides = admissible_exit_sides(alpha, spec.opacity_threshold);
  if (sides.empty()) return out;
  const Side side = sides[rng.index(sides.size())];
  out.side = side;
  out.shifts = exit_schedule(side, alpha.rows(), alpha.cols(), clip_length);
  return out;
}

Vec2 random_initial_shift(Index height, Index width, RandomSource& rng) {
  static constexpr Side kDirections[] = {Side::left, Side::right, Side::up, Side::down};
  return side_offset(kDirections[rng.index(4)], height, width);
}

ForegroundClip render_foreground_clip(const ImageRGB& fg, const GrayMap& alpha, const FlowField& total,
                                      const std::vector<Vec2>& shifts, const Vec2& initial_shift) {
  require_same_shape(fg, alpha, "render_foreground_clip");
  require_same_shape(fg, total, "render_foreground_clip");
  const int n = static_cast<int>(shifts.size());
  if (n < 1) throw std::invalid_argument("render_foreground_clip: empty shift schedule");

  ForegroundClip clip;
  clip.source = fg;
  clip.source_alpha = alpha;
  clip.total_flow = total;
  for (int i = 1; i <= n; ++i) {
    FlowField effective = cumulative_flow(total, i, n);
    const Vec2 offset = shifts[static_cast<std::size_t>(i - 1)] + initial_shift;
    effective[0] += static_cast<Real>(offset.x());
    effective[1] += static_cast<Real>(offset.y());
    clip.frames.push_back(warp_backward(fg, effective));
    clip.alphas.push_back(warp_backward(alpha, effective));
    clip.cumulative_flows.push_back(std::move(effective));
  }
  return clip;
}

ForegroundClip render_foreground_clip(const ImageRGB& fg, const GrayMap& alpha, const MotionSpec& spec,
                                      RandomSource& rng, const Vec2& initial_shift, ExitShift* exit_out) {
  spec.validate();
  require_same_shape(fg, alpha, "render_foreground_clip");
  const FlowField total = synth_total_flow(fg.rows(), fg.cols(), spec, rng);
  ExitShift exit = exit_return_shift(alpha, spec.clip_length, rng, spec);
  auto clip = render_foreground_clip(fg, alpha, total, exit.shifts, initial_shift);
  if (exit_out) *exit_out = std::move(exit);
  return clip;
}

PairwiseFlow pairwise_flow(const ForegroundClip& clip, int l, int i) {
  const int n = clip.length();
  if (l < 1 || i > n || l >= i)
    throw std::invalid_argument("pairwise_flow: need 1 <= l < i <= " + std::to_string(n) + ", got l=" +
                                std::to_string(l) + " i=" + std::to_string(i));
  const auto& ci = clip.cumulative_flows[static_cast<std::size_t>(i - 1)];
  const auto& cl = clip.cumulative_flows[static_cast<std::size_t>(l - 1)];
  PairwiseFlow out;
  out.flow[0] = ci[0] - cl[0];
  out.flow[1] = ci[1] - cl[1];
  out.valid = validity_mask(out.flow, clip.source.rows(), clip.source.cols());
  return out;
}

}  // namespace vmatte
