// vmatte: training-clip generation, block flow, probability smoothing,
// trimaps and loss/metric reports.

#include "vmatte/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vmatte;

json load_config(const std::string& file) {
  if (file.empty()) return json::object();
  std::ifstream in(file);
  if (!in) throw std::runtime_error(file + ": cannot open config");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(file + ": invalid JSON at byte " + std::to_string(e.byte));
  }
}

std::pair<Index, Index> parse_size(const std::string& s) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw std::invalid_argument("size must look like WxH, got '" + s + "'");
  return {std::stoll(m[2]), std::stoll(m[1])};  // (height, width)
}

// A flag given on the command line wins over the config file.
template <typename T>
void take(const json& cfg, const char* key, const CLI::Option* flag, T& target) {
  if (flag->count() == 0 && cfg.contains(key)) target = cfg.at(key).get<T>();
}

void take_path(const json& cfg, const char* key, const CLI::Option* flag, fs::path& target) {
  if (flag->count() == 0 && cfg.contains(key)) target = cfg.at(key).get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vmatte: fake-motion clip generation and temporal matte tooling"};
  app.require_subcommand(1);

  // gen
  cli::GenOptions gen;
  std::string gen_config, gen_size;
  std::string gen_fg, gen_bg, gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "generate training clips");
  gen_cmd->add_option("--config", gen_config, "JSON config file");
  auto* o_fg = gen_cmd->add_option("--fg", gen_fg, "foreground asset directory (NAME.png + NAME.alpha.png)");
  auto* o_bg = gen_cmd->add_option("--bg", gen_bg, "background directory (one subdirectory of frames per clip)");
  auto* o_out = gen_cmd->add_option("--out", gen_out, "output directory");
  auto* o_seed = gen_cmd->add_option("--seed", gen.seed, "master seed");
  auto* o_clips = gen_cmd->add_option("--clips", gen.clips, "number of clips");
  auto* o_frames = gen_cmd->add_option("--frames", gen.frames, "frames per clip");
  auto* o_size = gen_cmd->add_option("--size", gen_size, "frame size WxH");
  auto* o_jobs = gen_cmd->add_option("--jobs", gen.jobs, "worker threads");

  // flow
  cli::FlowOptions flow;
  std::string flow_config, flow_in, flow_out;
  auto* flow_cmd = app.add_subcommand("flow", "block-matching flows and consistency maps for a frame directory");
  flow_cmd->add_option("--config", flow_config, "JSON config file");
  auto* f_in = flow_cmd->add_option("--in", flow_in, "directory of PNG frames");
  auto* f_out = flow_cmd->add_option("--out", flow_out, "output directory");
  auto* f_block = flow_cmd->add_option("--block", flow.params.block_size, "block size in pixels");
  auto* f_radius = flow_cmd->add_option("--radius", flow.params.search_radius, "search radius in pixels");

  // smooth
  cli::SmoothOptions smooth;
  std::string smooth_config, smooth_probs, smooth_flows, smooth_out;
  auto* smooth_cmd = app.add_subcommand("smooth", "temporally smooth 16-bit probability maps");
  smooth_cmd->add_option("--config", smooth_config, "JSON config file");
  auto* s_probs = smooth_cmd->add_option("--probs", smooth_probs, "directory of 16-bit probability maps");
  auto* s_flows = smooth_cmd->add_option("--flows", smooth_flows, "output directory of the flow command");
  auto* s_out = smooth_cmd->add_option("--out", smooth_out, "output directory");

  // trimap
  cli::TrimapOptions trimap;
  std::string trimap_config, trimap_in, trimap_out;
  auto* trimap_cmd = app.add_subcommand("trimap", "3-level trimaps from segmentation maps");
  trimap_cmd->add_option("--config", trimap_config, "JSON config file");
  auto* t_in = trimap_cmd->add_option("--in", trimap_in, "directory of segmentation maps");
  auto* t_out = trimap_cmd->add_option("--out", trimap_out, "output directory");
  auto* t_frac = trimap_cmd->add_option("--fraction", trimap.fraction, "iterations as a fraction of width");

  // losses / metrics
  cli::ReportOptions report;
  std::string report_config, report_clip, report_pred, report_file;
  auto* losses_cmd = app.add_subcommand("losses", "loss report for predictions against a clip");
  auto* metrics_cmd = app.add_subcommand("metrics", "SSDA / dtSSD / MESSDdt report");
  for (auto* cmd : {losses_cmd, metrics_cmd}) {
    cmd->add_option("--config", report_config, "JSON config file");
    cmd->add_option("--clip", report_clip, "clip directory");
    cmd->add_option("--pred", report_pred, "prediction directory (alpha_%04d.png, fg_%04d.png)");
    cmd->add_option("--report", report_file, "write JSON here instead of stdout");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      const json cfg = load_config(gen_config);
      gen.fg_dir = gen_fg;
      gen.bg_dir = gen_bg;
      gen.out = gen_out;
      take_path(cfg, "fg", o_fg, gen.fg_dir);
      take_path(cfg, "bg", o_bg, gen.bg_dir);
      take_path(cfg, "out", o_out, gen.out);
      take(cfg, "seed", o_seed, gen.seed);
      take(cfg, "clips", o_clips, gen.clips);
      take(cfg, "frames", o_frames, gen.frames);
      take(cfg, "jobs", o_jobs, gen.jobs);
      take(cfg, "size", o_size, gen_size);
      if (!gen_size.empty()) std::tie(gen.height, gen.width) = parse_size(gen_size);
      if (gen.out.empty()) throw std::invalid_argument("gen: --out is required");
      cli::cmd_gen(gen);
    } else if (flow_cmd->parsed()) {
      const json cfg = load_config(flow_config);
      flow.in = flow_in;
      flow.out = flow_out;
      take_path(cfg, "in", f_in, flow.in);
      take_path(cfg, "out", f_out, flow.out);
      take(cfg, "block", f_block, flow.params.block_size);
      take(cfg, "radius", f_radius, flow.params.search_radius);
      cli::cmd_flow(flow);
    } else if (smooth_cmd->parsed()) {
      const json cfg = load_config(smooth_config);
      smooth.probs = smooth_probs;
      smooth.flows = smooth_flows;
      smooth.out = smooth_out;
      take_path(cfg, "probs", s_probs, smooth.probs);
      take_path(cfg, "flows", s_flows, smooth.flows);
      take_path(cfg, "out", s_out, smooth.out);
      cli::cmd_smooth(smooth);
    } else if (trimap_cmd->parsed()) {
      const json cfg = load_config(trimap_config);
      trimap.in = trimap_in;
      trimap.out = trimap_out;
      take_path(cfg, "in", t_in, trimap.in);
      take_path(cfg, "out", t_out, trimap.out);
      take(cfg, "fraction", t_frac, trimap.fraction);
      cli::cmd_trimap(trimap);
    } else {
      const json cfg = load_config(report_config);
      auto* cmd = losses_cmd->parsed() ? losses_cmd : metrics_cmd;
      const CLI::Option* r_clip = cmd->get_option("--clip");
      const CLI::Option* r_pred = cmd->get_option("--pred");
      const CLI::Option* r_report = cmd->get_option("--report");
      report.clip = report_clip;
      report.pred = report_pred;
      report.report = report_file;
      take_path(cfg, "clip", r_clip, report.clip);
      take_path(cfg, "pred", r_pred, report.pred);
      take_path(cfg, "report", r_report, report.report);
      if (losses_cmd->parsed()) cli::cmd_losses(report);
      else cli::cmd_metrics(report);
    }
  } catch (const std::exception& e) {
    std::cerr << "vmatte: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
