#pragma once

// Temporal smoothing of person-probability maps and trimap generation.

#include "vmatte/imgcore.hpp"

#include <cstdint>
#include <vector>

namespace vmatte {

// Per-pixel confidence s = 4 (p - 1/2)^2: 1 at p in {0, 1}, 0 at p = 1/2.
GrayMap confidence(const GrayMap& prob);

// A_1 = p_1;  A_i = s_i p_i + (1 - s_i) C_i warp_backward(A_{i-1}, F_i).
// flows[k] and consistencies[k] belong to frame k + 2 (1-based).
std::vector<GrayMap> smooth_sequence(const std::vector<GrayMap>& probs, const std::vector<FlowField>& flows,
                                     const std::vector<ConsistencyMap>& consistencies);

enum TrimapLabel : std::uint8_t { kBackground = 0, kUnknown = 128, kForeground = 255 };

using Trimap = Plane<std::uint8_t>;
using BinaryMap = Plane<std::uint8_t>;

// k iterations of 3x3 (8-connected) dilation/erosion; pixels outside the
// frame count as background.
BinaryMap dilate3x3(const BinaryMap& m, int iterations);
BinaryMap erode3x3(const BinaryMap& m, int iterations);

// Binarises seg at 0.5 (seg >= 0.5 is person), then with
// k = round(iterations_fraction * width): foreground where erode(k) is set,
// background where dilate(k) is clear, unknown elsewhere.
Trimap make_trimap(const GrayMap& seg, double iterations_fraction = 0.01);

int trimap_iterations(Index width, double iterations_fraction);

}  // namespace vmatte
