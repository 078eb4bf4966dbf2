#include "support.hpp"

#include "vmatte/io.hpp"

#include <fstream>
#include <iterator>

namespace vmatte::test {

namespace fs = std::filesystem;

void write_assets(const fs::path& root, Index h, Index w, int n_fg, int n_bg, int bg_frames) {
  fs::create_directories(root / "fg");
  fs::create_directories(root / "bg");
  for (int k = 0; k < n_fg; ++k) {
    const std::string id = "person" + std::to_string(k);
    io::write_rgb8(root / "fg" / (id + ".png"), textured_image(h, w, 100 + static_cast<std::uint64_t>(k)));
    const double r = 0.25 * static_cast<double>(std::min(h, w)) + 2.0 * k;
    io::write_gray16(root / "fg" / (id + ".alpha.png"),
                     disk_alpha(h, w, 0.5 * static_cast<double>(w - 1), 0.5 * static_cast<double>(h - 1), r));
  }
  for (int k = 0; k < n_bg; ++k) {
    const fs::path dir = root / "bg" / ("scene" + std::to_string(k));
    fs::create_directories(dir);
    const ImageRGB base = textured_image(h + 2 * bg_frames, w + 2 * bg_frames, 900 + static_cast<std::uint64_t>(k));
    for (int i = 0; i < bg_frames; ++i) {
      ImageRGB f(h, w);
      for (int c = 0; c < 3; ++c) f[c] = base[c].block(i, 2 * i, h, w);
      io::write_rgb8(dir / io::indexed_name("frame", i + 1, ".png"), f);
    }
  }
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace vmatte::test
