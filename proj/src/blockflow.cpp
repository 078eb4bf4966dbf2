#include "vmatte/blockflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace vmatte {

void BlockMEParams::validate() const {
  if (block_size < 4) throw std::invalid_argument("BlockMEParams: block_size must be >= 4");
  if (search_radius < 1) throw std::invalid_argument("BlockMEParams: search_radius must be >= 1");
}

namespace {

using Luma8 = Plane<std::uint8_t>;

Luma8 luma8(const ImageRGB& img) {
  const GrayMap y = luma(img);
  return (y[0] * Real(255) + Real(0.5)).floor().cast<std::uint8_t>();
}

// Reference luma with `pad` replicated pixels on every side.
Luma8 pad_replicate(const Luma8& src, int pad) {
  const Index h = src.rows();
  const Index w = src.cols();
  Luma8 out(h + 2 * pad, w + 2 * pad);
  for (Index y = 0; y < out.rows(); ++y) {
    const Index sy = std::clamp<Index>(y - pad, 0, h - 1);
    for (Index x = 0; x < out.cols(); ++x) out(y, x) = src(sy, std::clamp<Index>(x - pad, 0, w - 1));
  }
  return out;
}

struct Candidate {
  int dx;
  int dy;
};

// Search order: |v|^2 ascending, then dy, then dx. Scanning in this order and
// keeping only strictly better costs realises the tie-break rule.
std::vector<Candidate> candidate_order(int radius) {
  std::vector<Candidate> c;
  c.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) c.push_back({dx, dy});
  std::stable_sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    const int na = a.dx * a.dx + a.dy * a.dy;
    const int nb = b.dx * b.dx + b.dy * b.dy;
    if (na != nb) return na < nb;
    if (a.dy != b.dy) return a.dy < b.dy;
    return a.dx < b.dx;
  });
  return c;
}

class BlockSearch {
 public:
  BlockSearch(const Luma8& target, const Luma8& padded_ref, int radius)
      : target_(target), ref_(padded_ref), radius_(radius) {}

  // SAD of the tile at (x0, y0) of size bw x bh against the reference shifted
  // by (dx, dy). Returns early with a value above `bound` once the partial sum
  // exceeds it.
  std::int64_t sad(Index x0, Index y0, Index bw, Index bh, int dx, int dy, std::int64_t bound) const {
    std::int64_t total = 0;
    for (Index r = 0; r < bh; ++r) {
      const std::uint8_t* t = target_.data() + (y0 + r) * target_.cols() + x0;
      const std::uint8_t* p = ref_.data() + (y0 + r + dy + radius_) * ref_.cols() + (x0 + dx + radius_);
      int row = 0;
      for (Index k = 0; k < bw; ++k) row += std::abs(static_cast<int>(t[k]) - static_cast<int>(p[k]));
      total += row;
      if (total > bound) return total;
    }
    return total;
  }

 private:
  const Luma8& target_;
  const Luma8& ref_;
  int radius_;
};

}  // namespace

FlowField estimate_flow(const ImageRGB& target, const ImageRGB& reference, const BlockMEParams& params) {
  params.validate();
  require_same_shape(target, reference, "estimate_flow");
  const Index h = target.rows();
  const Index w = target.cols();
  if (h < params.block_size || w < params.block_size)
    throw std::invalid_argument("estimate_flow: frame " + std::to_string(h) + "x" + std::to_string(w) +
                                " smaller than block size " + std::to_string(params.block_size));

  const int r = params.search_radius;
  const Luma8 tgt = luma8(target);
  const Luma8 ref = pad_replicate(luma8(reference), r);
  const BlockSearch search(tgt, ref, r);
  const auto order = candidate_order(r);
  const auto none = std::numeric_limits<std::int64_t>::max();

  FlowField flow(h, w);
  std::size_t predictor = 0;  // index into `order` of the previous block's winner
  for (Index y0 = 0; y0 < h; y0 += params.block_size) {
    const Index bh = std::min<Index>(params.block_size, h - y0);
    for (Index x0 = 0; x0 < w; x0 += params.block_size) {
      const Index bw = std::min<Index>(params.block_size, w - x0);
      // Seed the bound with the neighbour's vector; the full ordered scan
      // below still decides the winner, so the result is that of a plain
      // exhaustive search.
      std::size_t best = predictor;
      std::int64_t best_cost = search.sad(x0, y0, bw, bh, order[best].dx, order[best].dy, none);
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == best) continue;
        const std::int64_t cost = search.sad(x0, y0, bw, bh, order[k].dx, order[k].dy, best_cost);
        if (cost < best_cost || (cost == best_cost && k < best)) {
          best = k;
          best_cost = cost;
        }
      }
      predictor = best;
      flow[0].block(y0, x0, bh, bw).setConstant(static_cast<Real>(order[best].dx));
      flow[1].block(y0, x0, bh, bw).setConstant(static_cast<Real>(order[best].dy));
    }
  }
  return flow;
}

double consistency_value(double rx, double ry) { return std::exp(-std::hypot(rx, ry) / 100.0); }

ConsistencyMap consistency_map(const FlowField& forward, const FlowField& backward) {
  require_same_shape(forward, backward, "consistency_map");
  const FlowField warped = warp_backward(backward, forward);
  ConsistencyMap c(forward.rows(), forward.cols());
  for (Index y = 0; y < forward.rows(); ++y)
    for (Index x = 0; x < forward.cols(); ++x) {
      const double rx = static_cast<double>(forward[0](y, x)) + static_cast<double>(warped[0](y, x));
      const double ry = static_cast<double>(forward[1](y, x)) + static_cast<double>(warped[1](y, x));
      c[0](y, x) = static_cast<Real>(consistency_value(rx, ry));
    }
  return c;
}

VideoFlows flow_pyramid_for_video(const std::vector<ImageRGB>& frames, const BlockMEParams& params) {
  if (frames.size() < 2) throw std::invalid_argument("flow_pyramid_for_video: need at least 2 frames");
  VideoFlows out;
  const std::size_t n = frames.size();
  for (std::size_t i = 1; i < n; ++i) out.forward.push_back(estimate_flow(frames[i], frames[i - 1], params));
  for (std::size_t i = 0; i + 1 < n; ++i) out.backward.push_back(estimate_flow(frames[i], frames[i + 1], params));
  for (std::size_t i = 1; i < n; ++i) out.consistency.push_back(consistency_map(out.forward[i - 1], out.backward[i - 1]));
  return out;
}

}  // namespace vmatte
