#include "vmatte/probsmooth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vmatte {

GrayMap confidence(const GrayMap& prob) {
  GrayMap s;
  s[0] = (Real(2) * prob[0] - Real(1)).square().min(Real(1));
  return s;
}

std::vector<GrayMap> smooth_sequence(const std::vector<GrayMap>& probs, const std::vector<FlowField>& flows,
                                     const std::vector<ConsistencyMap>& consistencies) {
  if (probs.empty()) throw std::invalid_argument("smooth_sequence: empty sequence");
  const std::size_t n = probs.size();
  if (flows.size() != n - 1 || consistencies.size() != n - 1)
    throw std::invalid_argument("smooth_sequence: expected " + std::to_string(n - 1) +
                                " flows and consistency maps, got " + std::to_string(flows.size()) + " and " +
                                std::to_string(consistencies.size()));
  for (std::size_t i = 1; i < n; ++i) {
    require_same_shape(probs[0], probs[i], "smooth_sequence");
    require_same_shape(probs[0], flows[i - 1], "smooth_sequence");
    require_same_shape(probs[0], consistencies[i - 1], "smooth_sequence");
  }

  std::vector<GrayMap> out;
  out.reserve(n);
  out.push_back(probs[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const GrayMap s = confidence(probs[i]);
    const GrayMap history = warp_backward(out.back(), flows[i - 1]);
    GrayMap a;
    a[0] = s[0] * probs[i][0] + (Real(1) - s[0]) * (consistencies[i - 1][0] * history[0]);
    out.push_back(clamp01(std::move(a)));
  }
  return out;
}

namespace {

template <bool Dilate>
BinaryMap morph_step(const BinaryMap& m) {
  const Index h = m.rows();
  const Index w = m.cols();
  BinaryMap out(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      bool acc = !Dilate;
      for (Index dy = -1; dy <= 1; ++dy)
        for (Index dx = -1; dx <= 1; ++dx) {
          const Index yy = y + dy;
          const Index xx = x + dx;
          const bool inside = yy >= 0 && yy < h && xx >= 0 && xx < w;
          const bool v = inside && m(yy, xx) != 0;
          if constexpr (Dilate) acc = acc || v;
          else acc = acc && v;
        }
      out(y, x) = acc ? 1 : 0;
    }
  return out;
}

}  // namespace

BinaryMap dilate3x3(const BinaryMap& m, int iterations) {
  BinaryMap out = m;
  for (int k = 0; k < iterations; ++k) out = morph_step<true>(out);
  return out;
}

BinaryMap erode3x3(const BinaryMap& m, int iterations) {
  BinaryMap out = m;
  for (int k = 0; k < iterations; ++k) out = morph_step<false>(out);
  return out;
}

int trimap_iterations(Index width, double iterations_fraction) {
  return static_cast<int>(std::lround(iterations_fraction * static_cast<double>(width)));
}

Trimap make_trimap(const GrayMap& seg, double iterations_fraction) {
  if (iterations_fraction < 0.0) throw std::invalid_argument("make_trimap: negative iterations fraction");
  const BinaryMap bin = (seg[0] >= Real(0.5)).cast<std::uint8_t>();
  const int k = trimap_iterations(seg.cols(), iterations_fraction);
  const BinaryMap dilated = dilate3x3(bin, k);
  const BinaryMap eroded = erode3x3(bin, k);
  Trimap t(seg.rows(), seg.cols());
  for (Index y = 0; y < t.rows(); ++y)
    for (Index x = 0; x < t.cols(); ++x) {
      if (eroded(y, x)) t(y, x) = kForeground;
      else if (!dilated(y, x)) t(y, x) = kBackground;
      else t(y, x) = kUnknown;
    }
  return t;
}

}  // namespace vmatte
