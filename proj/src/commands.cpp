#include "vmatte/commands.hpp"

#include "vmatte/clipforge.hpp"
#include "vmatte/io.hpp"
#include "vmatte/probsmooth.hpp"
#include "vmatte/random.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace vmatte::cli {

std::string clip_dir_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%06d", k);
  return buf;
}

std::uint64_t clip_seed(std::uint64_t master_seed, int k) { return mix64(master_seed, static_cast<std::uint64_t>(k)); }

void cmd_gen(const GenOptions& opt) {
  if (opt.clips < 0) throw std::invalid_argument("gen: --clips must be >= 0");
  if (opt.frames < 2) throw std::invalid_argument("gen: --frames must be >= 2");
  if (opt.clips == 0) return;
  const AssetLibrary assets = AssetLibrary::load(opt.fg_dir, opt.bg_dir);
  fs::create_directories(opt.out);

  ClipConfig config;
  config.frames = opt.frames;
  config.height = opt.height;
  config.width = opt.width;

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string first_error;

  auto worker = [&] {
    for (int k = next++; k < opt.clips && !failed; k = next++) {
      const fs::path dir = opt.out / clip_dir_name(k);
      try {
        write_clip(dir, generate_clip(assets, config, clip_seed(opt.seed, k)));
      } catch (const std::exception& e) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) first_error = dir.string() + ": " + e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min(opt.jobs, opt.clips));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed) throw std::runtime_error(first_error);
}

void cmd_flow(const FlowOptions& opt) {
  const auto files = io::list_files(opt.in, ".png");
  if (files.size() < 2) throw io::FormatError(opt.in, "need at least 2 PNG frames");
  std::vector<ImageRGB> frames;
  for (const auto& f : files) frames.push_back(io::read_rgb(f));
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (!same_shape(frames[0], frames[i])) throw io::FormatError(files[i], "frame size differs from the first frame");

  const VideoFlows flows = flow_pyramid_for_video(frames, opt.params);
  fs::create_directories(opt.out);
  const int n = static_cast<int>(frames.size());
  for (int i = 2; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i - 2);
    io::write_flo(opt.out / io::indexed_name("fwd", i, ".flo"), flows.forward[k]);
    io::write_gray16(opt.out / io::indexed_name("cons", i, ".png"), flows.consistency[k]);
  }
  for (int i = 1; i < n; ++i)
    io::write_flo(opt.out / io::indexed_name("bwd", i, ".flo"), flows.backward[static_cast<std::size_t>(i - 1)]);
}

void cmd_smooth(const SmoothOptions& opt) {
  const auto files = io::list_files(opt.probs, ".png");
  if (files.empty()) throw io::FormatError(opt.probs, "no probability maps");
  std::vector<GrayMap> probs;
  for (const auto& f : files) probs.push_back(io::read_gray(f));
  std::vector<FlowField> flows;
  std::vector<ConsistencyMap> cons;
  const int n = static_cast<int>(probs.size());
  for (int i = 2; i <= n; ++i) {
    const fs::path ff = opt.flows / io::indexed_name("fwd", i, ".flo");
    const fs::path cf = opt.flows / io::indexed_name("cons", i, ".png");
    flows.push_back(io::read_flo(ff));
    cons.push_back(io::read_gray(cf));
    if (!same_shape(flows.back(), probs[0])) throw io::FormatError(ff, "flow size differs from the probability maps");
    if (!same_shape(cons.back(), probs[0])) throw io::FormatError(cf, "consistency size differs from the probability maps");
  }
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (!same_shape(probs[0], probs[i])) throw io::FormatError(files[i], "map size differs from the first map");

  const auto smoothed = smooth_sequence(probs, flows, cons);
  fs::create_directories(opt.out);
  for (std::size_t i = 0; i < files.size(); ++i) io::write_gray16(opt.out / files[i].filename(), smoothed[i]);
}

void cmd_trimap(const TrimapOptions& opt) {
  const auto files = io::list_files(opt.in, ".png");
  if (files.empty()) throw io::FormatError(opt.in, "no segmentation maps");
  fs::create_directories(opt.out);
  for (const auto& f : files) io::write_gray8(opt.out / f.filename(), make_trimap(io::read_gray(f), opt.fraction));
}

int clip_length(const fs::path& clip_dir) {
  if (!fs::is_directory(clip_dir)) throw io::FormatError(clip_dir, "clip directory not found");
  int n = 0;
  while (fs::exists(clip_dir / io::indexed_name("alpha", n + 1, ".png"))) ++n;
  if (n == 0) throw io::FormatError(clip_dir / io::indexed_name("alpha", 1, ".png"), "no such file");
  return n;
}

std::vector<PairwiseFlow> read_pairs_from_first(const fs::path& clip_dir, int n) {
  std::vector<PairwiseFlow> out;
  for (int i = 2; i <= n; ++i) {
    const fs::path vf = clip_dir / io::indexed_name("valid_0001_to", i, ".png");
    PairwiseFlow p;
    p.flow = io::read_flo(clip_dir / io::indexed_name("flow_0001_to", i, ".flo"));
    p.valid = (io::read_gray8(vf) > std::uint8_t(127)).cast<std::uint8_t>();
    if (!same_shape(p.flow, p.valid)) throw io::FormatError(vf, "mask size differs from its flow");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PairwiseFlow> consecutive_pairs(const std::vector<PairwiseFlow>& from_first) {
  std::vector<PairwiseFlow> out;
  for (std::size_t k = 0; k < from_first.size(); ++k) {
    PairwiseFlow p;
    p.flow = from_first[k].flow;
    if (k > 0) {
      p.flow[0] -= from_first[k - 1].flow[0];
      p.flow[1] -= from_first[k - 1].flow[1];
    }
    p.valid = validity_mask(p.flow);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

template <typename Raster, typename Reader>
std::vector<Raster> read_sequence(const fs::path& dir, const std::string& prefix, int n, Reader read,
                                  const Raster* like) {
  std::vector<Raster> out;
  for (int i = 1; i <= n; ++i) {
    const fs::path f = dir / io::indexed_name(prefix, i, ".png");
    out.push_back(read(f));
    if (like && !same_shape(out.back(), *like)) throw io::FormatError(f, "size differs from the ground truth");
  }
  return out;
}

void emit(const fs::path& report, const std::string& text) {
  if (report.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(report, std::ios::binary);
  out << text;
  if (!out) throw io::FormatError(report, "write failed");
}

}  // namespace

LossReport cmd_losses(const ReportOptions& opt) {
  const int n = clip_length(opt.clip);
  if (n < 2) throw io::FormatError(opt.clip, "losses need at least 2 frames");
  const auto gt_alpha = read_sequence<GrayMap>(opt.clip, "alpha", n, io::read_gray, nullptr);
  const auto gt_fg = read_sequence<ImageRGB>(opt.clip, "fg", n, io::read_rgb, nullptr);
  const auto pred_alpha = read_sequence<GrayMap>(opt.pred, "alpha", n, io::read_gray, &gt_alpha[0]);
  const auto pred_fg = read_sequence<ImageRGB>(opt.pred, "fg", n, io::read_rgb, &gt_fg[0]);
  const auto from_first = read_pairs_from_first(opt.clip, n);
  const LossReport r = loss_report(pred_alpha, pred_fg, gt_alpha, gt_fg, from_first, consecutive_pairs(from_first));
  emit(opt.report, to_json(r));
  return r;
}

MetricReport cmd_metrics(const ReportOptions& opt) {
  const int n = clip_length(opt.clip);
  const auto gt = read_sequence<GrayMap>(opt.clip, "alpha", n, io::read_gray, nullptr);
  const auto pred = read_sequence<GrayMap>(opt.pred, "alpha", n, io::read_gray, &gt[0]);
  std::vector<FlowField> flows;
  for (auto& p : consecutive_pairs(read_pairs_from_first(opt.clip, n))) flows.push_back(std::move(p.flow));
  const MetricReport r = temporal_metrics(pred, gt, flows);
  emit(opt.report, to_json(r));
  return r;
}

std::string to_json(const LossReport& r) {
  nlohmann::ordered_json j{{"l_alpha", r.l_alpha},
                           {"l_global", r.l_global},
                           {"l_local", r.l_local},
                           {"l_foreground", r.l_foreground},
                           {"total", r.total}};
  return j.dump(2) + "\n";
}

std::string to_json(const MetricReport& r) {
  nlohmann::ordered_json j{{"ssda", r.ssda}, {"dtssd", r.dtssd}, {"messddt", r.messddt}};
  return j.dump(2) + "\n";
}

}  // namespace vmatte::cli
