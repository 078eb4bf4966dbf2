#include "vmatte/matteval.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vmatte {

namespace {

void require_frames(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) + " frames, got " +
                                std::to_string(got));
}

template <typename A, typename B>
void require_sequence_shape(const std::vector<A>& a, const std::vector<B>& b, const char* what) {
  require_frames(b.size(), a.size(), what);
  if (a.empty()) throw std::invalid_argument(std::string(what) + ": empty sequence");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require_same_shape(a[0], a[i], what);
    require_same_shape(a[0], b[i], what);
  }
}

Plane<double> as_double(const GrayMap& m) { return m[0].cast<double>(); }

double masked_warp_loss(const std::vector<GrayMap>& pred, const std::vector<PairwiseFlow>& pairs, bool from_first,
                        const char* what) {
  if (pred.size() < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 frames");
  require_frames(pairs.size(), pred.size() - 1, what);
  const double pixels = static_cast<double>(pred[0].rows() * pred[0].cols());
  double sum = 0.0;
  for (std::size_t i = 1; i < pred.size(); ++i) {
    const auto& pair = pairs[i - 1];
    require_same_shape(pred[0], pred[i], what);
    require_same_shape(pred[0], pair.flow, what);
    require_same_shape(pred[0], pair.valid, what);
    const GrayMap& ref = from_first ? pred[0] : pred[i - 1];
    const Raster<double, 1> warped = warp_backward(ref.cast<double>(), pair.flow.cast<double>());
    sum += ((as_double(pred[i]) - warped[0]).abs() * pair.valid.cast<double>()).sum();
  }
  return sum / (static_cast<double>(pred.size() - 1) * pixels);
}

}  // namespace

double loss_alpha(const std::vector<GrayMap>& pred, const std::vector<GrayMap>& gt) {
  require_sequence_shape(pred, gt, "loss_alpha");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (as_double(pred[i]) - as_double(gt[i])).abs().sum();
  return sum / (static_cast<double>(pred.size()) * static_cast<double>(pred[0].rows() * pred[0].cols()));
}

double loss_global(const std::vector<GrayMap>& pred, const std::vector<PairwiseFlow>& pairs_from_first) {
  return masked_warp_loss(pred, pairs_from_first, true, "loss_global");
}

double loss_local(const std::vector<GrayMap>& pred, const std::vector<PairwiseFlow>& consecutive_pairs) {
  return masked_warp_loss(pred, consecutive_pairs, false, "loss_local");
}

double loss_foreground(const std::vector<ImageRGB>& pred_fg, const std::vector<ImageRGB>& gt_fg,
                       const std::vector<GrayMap>& pred_alpha) {
  require_sequence_shape(pred_fg, gt_fg, "loss_foreground");
  require_sequence_shape(pred_fg, pred_alpha, "loss_foreground");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_fg.size(); ++i) {
    Plane<double> diff = Plane<double>::Zero(pred_fg[0].rows(), pred_fg[0].cols());
    for (int c = 0; c < 3; ++c) diff += (pred_fg[i][c].cast<double>() - gt_fg[i][c].cast<double>()).abs();
    sum += (as_double(pred_alpha[i]) * diff).sum();
  }
  return sum / (static_cast<double>(pred_fg.size()) * static_cast<double>(pred_fg[0].rows() * pred_fg[0].cols()) *
                3.0);
}

double total_loss(double l_alpha, double l_global, double l_local, double l_foreground) {
  return l_alpha + l_global + l_local + 0.25 * l_foreground;
}

double total_loss(const LossReport& r) { return total_loss(r.l_alpha, r.l_global, r.l_local, r.l_foreground); }

LossReport loss_report(const std::vector<GrayMap>& pred_alpha, const std::vector<ImageRGB>& pred_fg,
                       const std::vector<GrayMap>& gt_alpha, const std::vector<ImageRGB>& gt_fg,
                       const std::vector<PairwiseFlow>& pairs_from_first,
                       const std::vector<PairwiseFlow>& consecutive_pairs) {
  LossReport r;
  r.l_alpha = loss_alpha(pred_alpha, gt_alpha);
  r.l_global = loss_global(pred_alpha, pairs_from_first);
  r.l_local = loss_local(pred_alpha, consecutive_pairs);
  r.l_foreground = loss_foreground(pred_fg, gt_fg, pred_alpha);
  r.total = total_loss(r);
  return r;
}

MetricReport temporal_metrics(const std::vector<GrayMap>& pred, const std::vector<GrayMap>& gt,
                              const std::vector<FlowField>& flows) {
  require_sequence_shape(pred, gt, "temporal_metrics");
  require_frames(flows.size(), pred.size() - 1, "temporal_metrics (flows)");
  const std::size_t n = pred.size();
  const double pixels = static_cast<double>(pred[0].rows() * pred[0].cols());
  auto scaled = [](const GrayMap& m) -> Plane<double> { return m[0].cast<double>() * 255.0; };

  MetricReport r;
  for (std::size_t i = 0; i < n; ++i) r.ssda += std::sqrt((scaled(pred[i]) - scaled(gt[i])).square().sum());
  r.ssda /= static_cast<double>(n);

  if (n < 2) return r;
  for (std::size_t i = 1; i < n; ++i) {
    require_same_shape(pred[0], flows[i - 1], "temporal_metrics");
    const Plane<double> dp = scaled(pred[i]) - scaled(pred[i - 1]);
    const Plane<double> dg = scaled(gt[i]) - scaled(gt[i - 1]);
    r.dtssd += std::sqrt((dp - dg).square().sum());

    const Plane<double> err_now = (scaled(pred[i]) - scaled(gt[i])).square();
    const Raster<double, 2> flow = flows[i - 1].cast<double>();
    const Plane<double> err_prev =
        (255.0 * (warp_backward(pred[i - 1].cast<double>(), flow)[0] - warp_backward(gt[i - 1].cast<double>(), flow)[0]))
            .square();
    r.messddt += (err_now - err_prev).abs().sum() / pixels;
  }
  r.dtssd /= static_cast<double>(n - 1);
  r.messddt /= static_cast<double>(n - 1);
  return r;
}

}  // namespace vmatte
