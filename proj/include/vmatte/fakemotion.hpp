#pragma once

// Fake motion: animate a still foreground portrait with synthetic multi-scale
// flow so that every generated frame comes with exact ground-truth motion.

#include "vmatte/imgcore.hpp"
#include "vmatte/random.hpp"

#include <Eigen/Core>

#include <optional>
#include <string_view>
#include <vector>

namespace vmatte {

using Vec2 = Eigen::Vector2d;

struct FlowScale {
  // Grid cell size in pixels; 0 draws a single vector for the whole frame.
  int grid_divisor;
  // Standard deviation of each drawn component, in pixels.
  double sigma;
};

struct MotionSpec {
  int clip_length = 6;
  std::vector<FlowScale> scales{{0, 32.0}, {128, 16.0}, {32, 4.0}};
  double exit_shift_probability = 1.0 / 3.0;
  // Alpha above this counts as opaque when checking frame boundaries.
  double opacity_threshold = 0.05;

  void validate() const;
};

struct ForegroundClip {
  ImageRGB source;
  GrayMap source_alpha;
  std::vector<ImageRGB> frames;
  std::vector<GrayMap> alphas;
  // Effective backward flow from frame i to the source (cumulative motion
  // plus shift components). Frame i is warp_backward(source, flows[i]).
  std::vector<FlowField> cumulative_flows;
  FlowField total_flow;

  int length() const { return static_cast<int>(frames.size()); }
};

// Direction a foreground leaves the frame during an exit-and-return shift.
enum class Side { left, right, up, down };

std::string_view to_string(Side side);

struct ExitShift {
  std::optional<Side> side;
  // One backward-flow offset per frame (pixels).
  std::vector<Vec2> shifts;

  bool active() const { return side.has_value(); }
};

struct PairwiseFlow {
  FlowField flow;
  ValidityMask valid;
};

// Sum of the upscaled random grids: the total displacement over the clip.
FlowField synth_total_flow(Index height, Index width, const MotionSpec& spec, RandomSource& rng);

// c_i = ((i - 1) / N) * total for 1-based frame index i.
FlowField cumulative_flow(const FlowField& total, int frame_index, int clip_length);

// tri(t) = 2t on [0, 1/2], 2(1 - t) on (1/2, 1].
double triangle(double t);

// Backward-flow offset that moves content fully toward `side` by half the
// frame dimension along that axis.
Vec2 side_offset(Side side, Index height, Index width);

// Sides whose opposite boundary row/column holds no opaque alpha.
std::vector<Side> admissible_exit_sides(const GrayMap& alpha, double opacity_threshold);

// Triangular out-and-back schedule for a chosen side.
std::vector<Vec2> exit_schedule(Side side, Index height, Index width, int clip_length);

// With probability spec.exit_shift_probability picks an admissible side
// uniformly and returns its schedule; otherwise (or with no admissible side)
// all shifts are zero.
ExitShift exit_return_shift(const GrayMap& alpha, int clip_length, RandomSource& rng,
                            const MotionSpec& spec = {});

// Half-frame offset in one of the four axis directions, chosen uniformly.
Vec2 random_initial_shift(Index height, Index width, RandomSource& rng);

// Renders each frame with a single warp from the source.
ForegroundClip render_foreground_clip(const ImageRGB& fg, const GrayMap& alpha, const FlowField& total,
                                      const std::vector<Vec2>& shifts, const Vec2& initial_shift);

// Draws the total flow and exit shift from rng, then renders.
ForegroundClip render_foreground_clip(const ImageRGB& fg, const GrayMap& alpha, const MotionSpec& spec,
                                      RandomSource& rng, const Vec2& initial_shift,
                                      ExitShift* exit_out = nullptr);

// Backward flow from frame i to frame l (1 <= l < i <= N), approximated as
// c_i - c_l, and its validity mask.
PairwiseFlow pairwise_flow(const ForegroundClip& clip, int l, int i);

}  // namespace vmatte
