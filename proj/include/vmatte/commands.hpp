#pragma once

// Command implementations behind the vmatte executable. Each throws on
// failure; the executable turns exceptions into a diagnostic and exit code 1.

#include "vmatte/blockflow.hpp"
#include "vmatte/matteval.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace vmatte::cli {

namespace fs = std::filesystem;

struct GenOptions {
  fs::path fg_dir;
  fs::path bg_dir;
  fs::path out;
  std::uint64_t seed = 0;
  int clips = 1;
  int frames = 6;
  Index height = 520;
  Index width = 520;
  // Worker threads; output does not depend on it.
  int jobs = 1;
};

struct FlowOptions {
  fs::path in;
  fs::path out;
  BlockMEParams params;
};

struct SmoothOptions {
  fs::path probs;
  fs::path flows;
  fs::path out;
};

struct TrimapOptions {
  fs::path in;
  fs::path out;
  double fraction = 0.01;
};

struct ReportOptions {
  fs::path clip;
  fs::path pred;
  // Empty: the report goes to stdout.
  fs::path report;
};

// Directory name and seed of clip k.
std::string clip_dir_name(int k);
std::uint64_t clip_seed(std::uint64_t master_seed, int k);

void cmd_gen(const GenOptions& opt);
void cmd_flow(const FlowOptions& opt);
void cmd_smooth(const SmoothOptions& opt);
void cmd_trimap(const TrimapOptions& opt);
LossReport cmd_losses(const ReportOptions& opt);
MetricReport cmd_metrics(const ReportOptions& opt);

std::string to_json(const LossReport& r);
std::string to_json(const MetricReport& r);

// Clip directory readers shared by the report commands.
int clip_length(const fs::path& clip_dir);
std::vector<PairwiseFlow> read_pairs_from_first(const fs::path& clip_dir, int n);
std::vector<PairwiseFlow> consecutive_pairs(const std::vector<PairwiseFlow>& from_first);

}  // namespace vmatte::cli
