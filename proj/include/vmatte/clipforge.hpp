#pragma once

// Training-clip assembly: augmentation, layer compositing, branch selection,
// JPEG degradation and the on-disk clip layout.

#include "vmatte/fakemotion.hpp"
#include "vmatte/imgcore.hpp"
#include "vmatte/random.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vmatte {

struct CropRect {
  Index x = 0;
  Index y = 0;
  Index width = 0;
  Index height = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

// Rectangle covering `area_fraction` of a height x width frame with the same
// aspect ratio; u and v in [0, 1] place it along the free horizontal and
// vertical range.
CropRect crop_rect(Index height, Index width, double area_fraction, double u, double v);

struct ForegroundAugment {
  double angle_deg = 0.0;
  double crop_fraction = 1.0;
  double crop_u = 0.0;
  double crop_v = 0.0;
  bool flip = false;
  double brightness = 0.0;
  double contrast = 1.0;
};

struct BackgroundAugment {
  double crop_fraction = 1.0;
  double crop_u = 0.0;
  double crop_v = 0.0;
  bool flip = false;
  double brightness = 0.0;
  double contrast = 1.0;
};

// angle ~ U(-15, 15) deg, crop area ~ U(0.2, 1), flip with p = 1/2,
// brightness ~ U(-0.2, 0.2), contrast ~ U(0.8, 1.25).
ForegroundAugment sample_foreground_augment(RandomSource& rng);
// As above without rotation and with crop area ~ U(0.08, 1).
BackgroundAugment sample_background_augment(RandomSource& rng);

// clamp((v + brightness - 0.5) * contrast + 0.5) per channel.
ImageRGB adjust_brightness_contrast(const ImageRGB& img, double brightness, double contrast);

// Rotation (replicated borders), crop resized to out_height x out_width,
// optional flip, then brightness/contrast on the colour image only.
std::pair<ImageRGB, GrayMap> apply_foreground_augment(const ImageRGB& img, const GrayMap& alpha,
                                                      const ForegroundAugment& aug, Index out_height,
                                                      Index out_width);
std::pair<ImageRGB, GrayMap> augment_foreground(const ImageRGB& img, const GrayMap& alpha, RandomSource& rng);

// One transform shared by every frame.
std::vector<ImageRGB> apply_background_augment(const std::vector<ImageRGB>& clip, const BackgroundAugment& aug,
                                               Index out_height, Index out_width);
std::vector<ImageRGB> augment_background(const std::vector<ImageRGB>& clip, RandomSource& rng);

inline constexpr int kMinJpegQuality = 30;
inline constexpr int kMaxJpegQuality = 80;

ImageRGB jpeg_degrade(const ImageRGB& frame, int quality);

enum class Branch { composited, foreground_only, background_only };

std::string_view to_string(Branch b);
Branch branch_from_string(std::string_view s);

struct ClipManifest {
  std::uint64_t seed = 0;
  Branch branch = Branch::composited;
  std::vector<std::string> foreground_ids;
  std::string background_id;
  int background_start = 0;
  std::vector<ForegroundAugment> foreground_augments;
  std::vector<CropRect> foreground_crops;
  BackgroundAugment background_augment;
  CropRect background_crop;
  std::vector<std::optional<Side>> exit_sides;
  Vec2 second_initial_shift = Vec2::Zero();
  int jpeg_quality = kMinJpegQuality;
  int frames = 0;
  Index height = 0;
  Index width = 0;
  MotionSpec motion;
};

std::string manifest_to_json(const ClipManifest& m);
ClipManifest manifest_from_json(const std::string& text, const std::filesystem::path& source = "manifest.json");

struct TrainingClip {
  std::vector<ImageRGB> frames;
  std::vector<GrayMap> gt_alphas;
  std::vector<ImageRGB> gt_foregrounds;
  ForegroundClip fg1;
  ForegroundClip fg2;
  ClipManifest manifest;

  int length() const { return static_cast<int>(frames.size()); }
  // Ground-truth motion follows the front foreground.
  PairwiseFlow pairwise_flow(int l, int i) const { return vmatte::pairwise_flow(fg1, l, i); }
};

// Layers the inputs for a fixed branch and JPEG quality.
TrainingClip assemble_clip(const std::vector<ImageRGB>& bg, ForegroundClip fg1, ForegroundClip fg2, Branch branch,
                           int jpeg_quality);

// Draws u ~ U(0, 1): u < 0.05 keeps the background alone; otherwise a fair
// coin picks compositing or the first foreground clip as is. One JPEG quality
// in [30, 80] is drawn per clip.
TrainingClip assemble_clip(const std::vector<ImageRGB>& bg, ForegroundClip fg1, ForegroundClip fg2,
                           RandomSource& rng);

struct ForegroundAsset {
  std::string id;
  ImageRGB image;
  GrayMap alpha;
};

struct BackgroundAsset {
  std::string id;
  std::vector<ImageRGB> frames;
};

struct AssetLibrary {
  std::vector<ForegroundAsset> foregrounds;
  std::vector<BackgroundAsset> backgrounds;

  // Foreground dir: NAME.png with NAME.alpha.png. Background dir: one
  // subdirectory of PNG frames per clip.
  static AssetLibrary load(const std::filesystem::path& fg_dir, const std::filesystem::path& bg_dir);
};

struct ClipConfig {
  int frames = 6;
  Index height = 520;
  Index width = 520;
  MotionSpec motion;
};

TrainingClip generate_clip(const AssetLibrary& assets, const ClipConfig& config, std::uint64_t seed);

// Re-runs generation from a manifest and checks the regenerated record
// matches; throws std::runtime_error if the assets no longer reproduce it.
TrainingClip regenerate_clip(const AssetLibrary& assets, const ClipManifest& manifest);

// clip_<id>/ layout: frame_/alpha_/fg_%04d.png, flow_0001_to_%04d.flo,
// valid_0001_to_%04d.png and manifest.json.
void write_clip(const std::filesystem::path& dir, const TrainingClip& clip);

}  // namespace vmatte
