#pragma once

// Training losses and temporal quality metrics for alpha-matte sequences.
//
// Losses work on alphas in [0, 1]. Metrics rescale alphas to the 0-255 range
// first. All sums accumulate in double.

#include "vmatte/fakemotion.hpp"
#include "vmatte/imgcore.hpp"

#include <vector>

namespace vmatte {

struct LossReport {
  double l_alpha = 0.0;
  double l_global = 0.0;
  double l_local = 0.0;
  double l_foreground = 0.0;
  double total = 0.0;
};

struct MetricReport {
  double ssda = 0.0;
  double dtssd = 0.0;
  double messddt = 0.0;
};

// Mean absolute alpha error over N*H*W.
double loss_alpha(const std::vector<GrayMap>& pred, const std::vector<GrayMap>& gt);

// sum_{i>=2} sum |a'_i - warp(a'_1, flow_{1->i})| V / ((N-1) H W).
// pairs[k] is the (flow, mask) for frame k + 2 against frame 1.
double loss_global(const std::vector<GrayMap>& pred, const std::vector<PairwiseFlow>& pairs_from_first);

// As loss_global with consecutive (i-1 -> i) pairs.
double loss_local(const std::vector<GrayMap>& pred, const std::vector<PairwiseFlow>& consecutive_pairs);

// sum a' sum_c |FG' - FG| / (N H W 3).
double loss_foreground(const std::vector<ImageRGB>& pred_fg, const std::vector<ImageRGB>& gt_fg,
                       const std::vector<GrayMap>& pred_alpha);

double total_loss(double l_alpha, double l_global, double l_local, double l_foreground);
double total_loss(const LossReport& r);

// Computes every component against a generated clip's ground truth.
LossReport loss_report(const std::vector<GrayMap>& pred_alpha, const std::vector<ImageRGB>& pred_fg,
                       const std::vector<GrayMap>& gt_alpha, const std::vector<ImageRGB>& gt_fg,
                       const std::vector<PairwiseFlow>& pairs_from_first,
                       const std::vector<PairwiseFlow>& consecutive_pairs);

// SSDA, dtSSD and MESSDdt on the 0-255 scale. flows[k] is the backward flow
// of frame k + 2 sampling frame k + 1.
MetricReport temporal_metrics(const std::vector<GrayMap>& pred, const std::vector<GrayMap>& gt,
                              const std::vector<FlowField>& flows);

}  // namespace vmatte
