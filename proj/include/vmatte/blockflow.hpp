#pragma once

// Exhaustive-search block matching and forward/backward consistency maps.

#include "vmatte/imgcore.hpp"

#include <vector>

namespace vmatte {

struct BlockMEParams {
  int block_size = 16;
  int search_radius = 16;

  void validate() const;
};

// Dense flow for `target` sampling `reference`: target(x) ~ reference(x + v).
// Each block_size tile (edge tiles truncated) gets the integer displacement in
// [-r, r]^2 with the smallest luma SAD against the border-replicated
// reference. Ties go to the smaller |v|, then to the smaller dy, then dx.
FlowField estimate_flow(const ImageRGB& target, const ImageRGB& reference, const BlockMEParams& params = {});

// C = exp(-|F + warp_backward(B, F)| / 100). F lives on frame i and samples
// frame i-1; B lives on frame i-1 and samples frame i. With both flows in
// backward-sampling form, consistent motion makes the warped B cancel F.
ConsistencyMap consistency_map(const FlowField& forward, const FlowField& backward);

// exp(-|residual| / 100) for a single residual vector.
double consistency_value(double rx, double ry);

struct VideoFlows {
  std::vector<FlowField> forward;         // F_2 .. F_N
  std::vector<FlowField> backward;        // B_1 .. B_{N-1}
  std::vector<ConsistencyMap> consistency;  // C_2 .. C_N
};

VideoFlows flow_pyramid_for_video(const std::vector<ImageRGB>& frames, const BlockMEParams& params = {});

}  // namespace vmatte
