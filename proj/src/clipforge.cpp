#include "vmatte/clipforge.hpp"

#include "vmatte/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vmatte {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

CropRect crop_rect(Index height, Index width, double area_fraction, double u, double v) {
  if (!(area_fraction > 0.0 && area_fraction <= 1.0))
    throw std::invalid_argument("crop_rect: area fraction must be in (0, 1]");
  const double side = std::sqrt(area_fraction);
  CropRect r;
  r.width = std::clamp<Index>(std::lround(side * static_cast<double>(width)), 1, width);
  r.height = std::clamp<Index>(std::lround(side * static_cast<double>(height)), 1, height);
  r.x = std::lround(std::clamp(u, 0.0, 1.0) * static_cast<double>(width - r.width));
  r.y = std::lround(std::clamp(v, 0.0, 1.0) * static_cast<double>(height - r.height));
  return r;
}

ForegroundAugment sample_foreground_augment(RandomSource& rng) {
  ForegroundAugment a;
  a.angle_deg = rng.uniform(-15.0, 15.0);
  a.crop_fraction = rng.uniform(0.2, 1.0);
  a.crop_u = rng.uniform01();
  a.crop_v = rng.uniform01();
  a.flip = rng.bernoulli(0.5);
  a.brightness = rng.uniform(-0.2, 0.2);
  a.contrast = rng.uniform(0.8, 1.25);
  return a;
}

BackgroundAugment sample_background_augment(RandomSource& rng) {
  BackgroundAugment a;
  a.crop_fraction = rng.uniform(0.08, 1.0);
  a.crop_u = rng.uniform01();
  a.crop_v = rng.uniform01();
  a.flip = rng.bernoulli(0.5);
  a.brightness = rng.uniform(-0.2, 0.2);
  a.contrast = rng.uniform(0.8, 1.25);
  return a;
}

ImageRGB adjust_brightness_contrast(const ImageRGB& img, double brightness, double contrast) {
  if (brightness == 0.0 && contrast == 1.0) return img;
  const auto b = static_cast<Real>(brightness);
  const auto k = static_cast<Real>(contrast);
  ImageRGB out;
  for (int c = 0; c < 3; ++c) out[c] = ((img[c] + b - Real(0.5)) * k + Real(0.5)).max(Real(0)).min(Real(1));
  return out;
}

namespace {

template <typename Scalar, int C>
Raster<Scalar, C> crop_resize(const Raster<Scalar, C>& src, const CropRect& r, Index out_h, Index out_w) {
  return resample_region(src, static_cast<double>(r.x), static_cast<double>(r.y), static_cast<double>(r.width),
                         static_cast<double>(r.height), out_h, out_w);
}

}  // namespace

std::pair<ImageRGB, GrayMap> apply_foreground_augment(const ImageRGB& img, const GrayMap& alpha,
                                                      const ForegroundAugment& aug, Index out_height,
                                                      Index out_width) {
  require_same_shape(img, alpha, "apply_foreground_augment");
  const CropRect r = crop_rect(img.rows(), img.cols(), aug.crop_fraction, aug.crop_u, aug.crop_v);
  ImageRGB out_img = crop_resize(rotate_about_center(img, aug.angle_deg), r, out_height, out_width);
  GrayMap out_alpha = crop_resize(rotate_about_center(alpha, aug.angle_deg), r, out_height, out_width);
  if (aug.flip) {
    out_img = flip_horizontal(out_img);
    out_alpha = flip_horizontal(out_alpha);
  }
  return {adjust_brightness_contrast(out_img, aug.brightness, aug.contrast), std::move(out_alpha)};
}

std::pair<ImageRGB, GrayMap> augment_foreground(const ImageRGB& img, const GrayMap& alpha, RandomSource& rng) {
  return apply_foreground_augment(img, alpha, sample_foreground_augment(rng), img.rows(), img.cols());
}

std::vector<ImageRGB> apply_background_augment(const std::vector<ImageRGB>& clip, const BackgroundAugment& aug,
                                               Index out_height, Index out_width) {
  if (clip.empty()) throw std::invalid_argument("apply_background_augment: empty clip");
  const CropRect r = crop_rect(clip[0].rows(), clip[0].cols(), aug.crop_fraction, aug.crop_u, aug.crop_v);
  std::vector<ImageRGB> out;
  out.reserve(clip.size());
  for (const auto& frame : clip) {
    require_same_shape(clip[0], frame, "apply_background_augment");
    ImageRGB f = crop_resize(frame, r, out_height, out_width);
    if (aug.flip) f = flip_horizontal(f);
    out.push_back(adjust_brightness_contrast(f, aug.brightness, aug.contrast));
  }
  return out;
}

std::vector<ImageRGB> augment_background(const std::vector<ImageRGB>& clip, RandomSource& rng) {
  if (clip.empty()) throw std::invalid_argument("augment_background: empty clip");
  return apply_background_augment(clip, sample_background_augment(rng), clip[0].rows(), clip[0].cols());
}

ImageRGB jpeg_degrade(const ImageRGB& frame, int quality) {
  if (quality < kMinJpegQuality || quality > kMaxJpegQuality)
    throw std::invalid_argument("jpeg_degrade: quality " + std::to_string(quality) + " outside [30, 80]");
  return io::jpeg_roundtrip(frame, quality);
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::composited: return "composited";
    case Branch::foreground_only: return "foreground_only";
    case Branch::background_only: return "background_only";
  }
  return "?";
}

Branch branch_from_string(std::string_view s) {
  if (s == "composited") return Branch::composited;
  if (s == "foreground_only") return Branch::foreground_only;
  if (s == "background_only") return Branch::background_only;
  throw std::invalid_argument("unknown branch '" + std::string(s) + "'");
}

TrainingClip assemble_clip(const std::vector<ImageRGB>& bg, ForegroundClip fg1, ForegroundClip fg2, Branch branch,
                           int jpeg_quality) {
  const std::size_t n = bg.size();
  if (n == 0) throw std::invalid_argument("assemble_clip: empty background clip");
  if (fg1.frames.size() != n || fg2.frames.size() != n)
    throw std::invalid_argument("assemble_clip: clip lengths differ (bg " + std::to_string(n) + ", fg1 " +
                                std::to_string(fg1.frames.size()) + ", fg2 " + std::to_string(fg2.frames.size()) +
                                ")");
  for (std::size_t i = 0; i < n; ++i) {
    require_same_shape(bg[0], bg[i], "assemble_clip");
    require_same_shape(bg[0], fg1.frames[i], "assemble_clip");
    require_same_shape(bg[0], fg2.frames[i], "assemble_clip");
  }

  TrainingClip clip;
  const Index h = bg[0].rows();
  const Index w = bg[0].cols();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f1 = fg1.frames[i];
    const auto& a1 = fg1.alphas[i];
    const auto& f2 = fg2.frames[i];
    const auto& a2 = fg2.alphas[i];
    switch (branch) {
      case Branch::background_only:
        clip.frames.push_back(bg[i]);
        clip.gt_alphas.push_back(GrayMap::Zero(h, w));
        clip.gt_foregrounds.push_back(ImageRGB::Zero(h, w));
        break;
      case Branch::foreground_only:
        clip.frames.push_back(f1);
        clip.gt_alphas.push_back(a1);
        clip.gt_foregrounds.push_back(f1);
        break;
      case Branch::composited: {
        clip.frames.push_back(composite_over(f1, a1, composite_over(f2, a2, bg[i])));
        GrayMap a;
        a[0] = a1[0] + (Real(1) - a1[0]) * a2[0];
        clip.gt_alphas.push_back(clamp01(std::move(a)));
        clip.gt_foregrounds.push_back(composite_over(f1, a1, f2));
        break;
      }
    }
  }
  for (auto& f : clip.frames) f = jpeg_degrade(f, jpeg_quality);
  clip.fg1 = std::move(fg1);
  clip.fg2 = std::move(fg2);
  clip.manifest.branch = branch;
  clip.manifest.jpeg_quality = jpeg_quality;
  clip.manifest.frames = static_cast<int>(n);
  clip.manifest.height = h;
  clip.manifest.width = w;
  return clip;
}

TrainingClip assemble_clip(const std::vector<ImageRGB>& bg, ForegroundClip fg1, ForegroundClip fg2,
                           RandomSource& rng) {
  Branch branch;
  if (rng.uniform01() < 0.05) branch = Branch::background_only;
  else branch = rng.bernoulli(0.5) ? Branch::composited : Branch::foreground_only;
  const int quality = rng.uniform_int(kMinJpegQuality, kMaxJpegQuality);
  return assemble_clip(bg, std::move(fg1), std::move(fg2), branch, quality);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

json rect_json(const CropRect& r) { return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}; }

CropRect rect_from(const json& j) {
  return {j.at("x").get<Index>(), j.at("y").get<Index>(), j.at("width").get<Index>(), j.at("height").get<Index>()};
}

Side side_from_string(const std::string& s) {
  for (Side side : {Side::left, Side::right, Side::up, Side::down})
    if (to_string(side) == s) return side;
  throw std::invalid_argument("unknown exit side '" + s + "'");
}

}  // namespace

std::string manifest_to_json(const ClipManifest& m) {
  json j;
  j["seed"] = m.seed;
  j["branch"] = std::string(to_string(m.branch));
  j["frames"] = m.frames;
  j["height"] = m.height;
  j["width"] = m.width;
  j["foreground_ids"] = m.foreground_ids;
  j["background_id"] = m.background_id;
  j["background_start"] = m.background_start;

  json aug;
  json fgs = json::array();
  for (std::size_t k = 0; k < m.foreground_augments.size(); ++k) {
    const auto& a = m.foreground_augments[k];
    json f{{"angle_deg", a.angle_deg},   {"crop_fraction", a.crop_fraction}, {"crop_u", a.crop_u},
           {"crop_v", a.crop_v},         {"flip", a.flip},                   {"brightness", a.brightness},
           {"contrast", a.contrast}};
    if (k < m.foreground_crops.size()) f["crop"] = rect_json(m.foreground_crops[k]);
    fgs.push_back(std::move(f));
  }
  aug["foregrounds"] = std::move(fgs);
  const auto& b = m.background_augment;
  aug["background"] = {{"crop_fraction", b.crop_fraction}, {"crop_u", b.crop_u},         {"crop_v", b.crop_v},
                       {"flip", b.flip},                   {"brightness", b.brightness}, {"contrast", b.contrast},
                       {"crop", rect_json(m.background_crop)}};
  aug["jpeg_quality"] = m.jpeg_quality;
  j["augmentation"] = std::move(aug);

  json sides = json::array();
  for (const auto& s : m.exit_sides) sides.push_back(s ? json(std::string(to_string(*s))) : json(nullptr));
  json scales = json::array();
  for (const auto& s : m.motion.scales) scales.push_back({{"grid_divisor", s.grid_divisor}, {"sigma", s.sigma}});
  j["motion"] = {{"scales", std::move(scales)},
                 {"exit_shift_probability", m.motion.exit_shift_probability},
                 {"opacity_threshold", m.motion.opacity_threshold},
                 {"exit_sides", std::move(sides)},
                 {"second_initial_shift", {m.second_initial_shift.x(), m.second_initial_shift.y()}}};
  j["random"] = {{"engine", "mt19937_64"},
                 {"uniform", "top 53 bits of one draw"},
                 {"normal", "marsaglia polar"}};
  return j.dump(2) + "\n";
}

ClipManifest manifest_from_json(const std::string& text, const fs::path& source) {
  try {
    const json j = json::parse(text);
    ClipManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.branch = branch_from_string(j.at("branch").get<std::string>());
    m.frames = j.at("frames").get<int>();
    m.height = j.at("height").get<Index>();
    m.width = j.at("width").get<Index>();
    m.foreground_ids = j.at("foreground_ids").get<std::vector<std::string>>();
    m.background_id = j.at("background_id").get<std::string>();
    m.background_start = j.at("background_start").get<int>();
    const auto& aug = j.at("augmentation");
    for (const auto& f : aug.at("foregrounds")) {
      ForegroundAugment a;
      a.angle_deg = f.at("angle_deg").get<double>();
      a.crop_fraction = f.at("crop_fraction").get<double>();
      a.crop_u = f.at("crop_u").get<double>();
      a.crop_v = f.at("crop_v").get<double>();
      a.flip = f.at("flip").get<bool>();
      a.brightness = f.at("brightness").get<double>();
      a.contrast = f.at("contrast").get<double>();
      m.foreground_augments.push_back(a);
      if (f.contains("crop")) m.foreground_crops.push_back(rect_from(f.at("crop")));
    }
    const auto& b = aug.at("background");
    m.background_augment.crop_fraction = b.at("crop_fraction").get<double>();
    m.background_augment.crop_u = b.at("crop_u").get<double>();
    m.background_augment.crop_v = b.at("crop_v").get<double>();
    m.background_augment.flip = b.at("flip").get<bool>();
    m.background_augment.brightness = b.at("brightness").get<double>();
    m.background_augment.contrast = b.at("contrast").get<double>();
    m.background_crop = rect_from(b.at("crop"));
    m.jpeg_quality = aug.at("jpeg_quality").get<int>();
    const auto& mo = j.at("motion");
    m.motion.scales.clear();
    for (const auto& s : mo.at("scales"))
      m.motion.scales.push_back({s.at("grid_divisor").get<int>(), s.at("sigma").get<double>()});
    m.motion.exit_shift_probability = mo.at("exit_shift_probability").get<double>();
    m.motion.opacity_threshold = mo.at("opacity_threshold").get<double>();
    m.motion.clip_length = m.frames;
    for (const auto& s : mo.at("exit_sides"))
      m.exit_sides.push_back(s.is_null() ? std::nullopt : std::optional<Side>(side_from_string(s.get<std::string>())));
    const auto shift = mo.at("second_initial_shift").get<std::vector<double>>();
    if (shift.size() != 2) throw std::invalid_argument("second_initial_shift must have 2 entries");
    m.second_initial_shift = Vec2(shift[0], shift[1]);
    return m;
  } catch (const json::parse_error& e) {
    throw io::FormatError(source, std::string("invalid JSON: ") + e.what(), e.byte);
  } catch (const json::exception& e) {
    throw io::FormatError(source, std::string("manifest schema: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw io::FormatError(source, std::string("manifest value: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Assets and generation

AssetLibrary AssetLibrary::load(const fs::path& fg_dir, const fs::path& bg_dir) {
  AssetLibrary lib;
  for (const auto& file : io::list_files(fg_dir, ".png")) {
    const std::string name = file.filename().string();
    if (name.size() > 10 && name.ends_with(".alpha.png")) continue;
    const std::string id = file.stem().string();
    const fs::path alpha_file = fg_dir / (id + ".alpha.png");
    if (!fs::exists(alpha_file)) throw io::FormatError(alpha_file, "missing alpha for foreground '" + id + "'");
    ForegroundAsset a{id, io::read_rgb(file), io::read_gray(alpha_file)};
    if (!same_shape(a.image, a.alpha)) throw io::FormatError(alpha_file, "alpha size differs from its image");
    lib.foregrounds.push_back(std::move(a));
  }
  if (!fs::is_directory(bg_dir)) throw io::FormatError(bg_dir, "background directory not found");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(bg_dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    BackgroundAsset b{d.filename().string(), {}};
    for (const auto& f : io::list_files(d, ".png")) {
      b.frames.push_back(io::read_rgb(f));
      if (!same_shape(b.frames.front(), b.frames.back())) throw io::FormatError(f, "frame size differs within clip");
    }
    if (!b.frames.empty()) lib.backgrounds.push_back(std::move(b));
  }
  if (lib.foregrounds.empty()) throw io::FormatError(fg_dir, "no foreground assets");
  if (lib.backgrounds.empty()) throw io::FormatError(bg_dir, "no background clips");
  return lib;
}

TrainingClip generate_clip(const AssetLibrary& assets, const ClipConfig& config, std::uint64_t seed) {
  const int n = config.frames;
  MotionSpec motion = config.motion;
  motion.clip_length = n;
  motion.validate();
  if (assets.foregrounds.empty() || assets.backgrounds.empty())
    throw std::invalid_argument("generate_clip: asset library is empty");

  SeededRandom rng(seed);
  const auto& fga = assets.foregrounds[rng.index(assets.foregrounds.size())];
  const auto& fgb = assets.foregrounds[rng.index(assets.foregrounds.size())];
  const auto& bga = assets.backgrounds[rng.index(assets.backgrounds.size())];
  if (static_cast<int>(bga.frames.size()) < n)
    throw std::invalid_argument("generate_clip: background '" + bga.id + "' has " + std::to_string(bga.frames.size()) +
                                " frames, need " + std::to_string(n));
  const int start = static_cast<int>(rng.index(bga.frames.size() - static_cast<std::size_t>(n) + 1));

  const ForegroundAugment aug1 = sample_foreground_augment(rng);
  const ForegroundAugment aug2 = sample_foreground_augment(rng);
  const BackgroundAugment augb = sample_background_augment(rng);

  const auto [img1, alpha1] = apply_foreground_augment(fga.image, fga.alpha, aug1, config.height, config.width);
  const auto [img2, alpha2] = apply_foreground_augment(fgb.image, fgb.alpha, aug2, config.height, config.width);
  const std::vector<ImageRGB> bg_src(bga.frames.begin() + start, bga.frames.begin() + start + n);
  const auto bg = apply_background_augment(bg_src, augb, config.height, config.width);

  ExitShift exit1, exit2;
  ForegroundClip clip1 = render_foreground_clip(img1, alpha1, motion, rng, Vec2::Zero(), &exit1);
  const Vec2 initial = random_initial_shift(config.height, config.width, rng);
  ForegroundClip clip2 = render_foreground_clip(img2, alpha2, motion, rng, initial, &exit2);

  TrainingClip clip = assemble_clip(bg, std::move(clip1), std::move(clip2), rng);
  auto& m = clip.manifest;
  m.seed = seed;
  m.foreground_ids = {fga.id, fgb.id};
  m.background_id = bga.id;
  m.background_start = start;
  m.foreground_augments = {aug1, aug2};
  m.foreground_crops = {crop_rect(fga.image.rows(), fga.image.cols(), aug1.crop_fraction, aug1.crop_u, aug1.crop_v),
                        crop_rect(fgb.image.rows(), fgb.image.cols(), aug2.crop_fraction, aug2.crop_u, aug2.crop_v)};
  m.background_augment = augb;
  m.background_crop = crop_rect(bg_src[0].rows(), bg_src[0].cols(), augb.crop_fraction, augb.crop_u, augb.crop_v);
  m.exit_sides = {exit1.side, exit2.side};
  m.second_initial_shift = initial;
  m.motion = motion;
  return clip;
}

TrainingClip regenerate_clip(const AssetLibrary& assets, const ClipManifest& manifest) {
  ClipConfig config;
  config.frames = manifest.frames;
  config.height = manifest.height;
  config.width = manifest.width;
  config.motion = manifest.motion;
  TrainingClip clip = generate_clip(assets, config, manifest.seed);
  if (manifest_to_json(clip.manifest) != manifest_to_json(manifest))
    throw std::runtime_error("regenerate_clip: assets do not reproduce the manifest for seed " +
                             std::to_string(manifest.seed));
  return clip;
}

void write_clip(const fs::path& dir, const TrainingClip& clip) {
  fs::create_directories(dir);
  const int n = clip.length();
  for (int i = 1; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    io::write_rgb8(dir / io::indexed_name("frame", i, ".png"), clip.frames[k]);
    io::write_gray16(dir / io::indexed_name("alpha", i, ".png"), clip.gt_alphas[k]);
    io::write_rgb8(dir / io::indexed_name("fg", i, ".png"), clip.gt_foregrounds[k]);
  }
  for (int i = 2; i <= n; ++i) {
    const PairwiseFlow p = clip.pairwise_flow(1, i);
    io::write_flo(dir / io::indexed_name("flow_0001_to", i, ".flo"), p.flow);
    io::write_gray8(dir / io::indexed_name("valid_0001_to", i, ".png"), (p.valid * std::uint8_t(255)).eval());
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest_to_json(clip.manifest);
  if (!out) throw io::FormatError(dir / "manifest.json", "write failed");
}

}  // namespace vmatte
