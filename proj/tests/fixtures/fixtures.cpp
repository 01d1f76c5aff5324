// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <unistd.h>

#include "trackaug/error.hpp"
#include "trackaug/image.hpp"

namespace trackaug::testing {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kWidth = 320;
constexpr int kHeight = 240;

struct Painted {
  BBox box;
  std::uint8_t r, g, b;
};

Image background(int seed) {
  Image img(kWidth, kHeight);
  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>((x * 3 + y + seed * 40) % 256);
      img.at(x, y, 1) = static_cast<std::uint8_t>((y * 2 + seed * 17) % 256);
      img.at(x, y, 2) = static_cast<std::uint8_t>(((x / 8 + y / 8) % 2) * 60 + 90);
    }
  }
  return img;
}

void paint(Image& img, const Painted& p) {
  for (int y = std::max(0, static_cast<int>(p.box.y)); y < std::min(kHeight, static_cast<int>(p.box.bottom())); ++y) {
    for (int x = std::max(0, static_cast<int>(p.box.x)); x < std::min(kWidth, static_cast<int>(p.box.right())); ++x) {
      const int shade = ((x + y) % 4) * 12;
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::min(255, p.r + shade));
      img.at(x, y, 1) = static_cast<std::uint8_t>(std::min(255, p.g + shade));
      img.at(x, y, 2) = static_cast<std::uint8_t>(std::min(255, p.b + shade));
    }
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
}

void write_coco(const fs::path& dir) {
  fs::create_directories(dir / "images");
  // image, x, y, w, h, category
  struct Ann { int image; double x, y, w, h; int cat; };
  const Ann anns[] = {
      {0, 40, 50, 60, 40, 1}, {0, 200, 120, 50, 70, 2}, {1, 100, 80, 80, 50, 1},
      {1, 20, 150, 30, 60, 2}, {2, 150, 40, 45, 45, 3}, {2, 30, 30, 70, 35, 1},
      {3, 220, 60, 40, 90, 2}, {3, 60, 140, 90, 60, 1}, {3, 10, 10, 24, 20, 2},
  };
  const std::uint8_t colors[4][3] = {{0, 0, 0}, {200, 40, 40}, {40, 200, 60}, {60, 60, 220}};
  json images = json::array();
  json annotations = json::array();
  for (int i = 0; i < 4; ++i) {
    Image img = background(i);
    for (const auto& a : anns) {
      if (a.image == i) paint(img, {{a.x, a.y, a.w, a.h}, colors[a.cat][0], colors[a.cat][1], colors[a.cat][2]});
    }
    const std::string name = "img_" + std::to_string(i) + ".png";
    write_png(dir / "images" / name, img);
    images.push_back({{"id", 100 + i}, {"file_name", "images/" + name}, {"width", kWidth}, {"height", kHeight}});
  }
  int id = 1;
  for (const auto& a : anns) {
    annotations.push_back({{"id", id++}, {"image_id", 100 + a.image}, {"bbox", {a.x, a.y, a.w, a.h}}, {"category_id", a.cat}});
  }
  // Zero-width box: skipped on load.
  annotations.push_back({{"id", id}, {"image_id", 100}, {"bbox", {5, 5, 0, 10}}, {"category_id", 1}});
  const json doc = {{"images", images},
                    {"annotations", annotations},
                    {"categories", {{{"id", 1}, {"name", "car"}}, {{"id", 2}, {"name", "person"}}, {{"id", 3}, {"name", "dog"}}}}};
  write_file(dir / "annotations.json", doc.dump(1));
}

void write_sequence(const fs::path& dir, const std::string& category, double x0, double y0, double dx, double dy,
                    std::uint8_t r, std::uint8_t g, std::uint8_t b, int seed, std::initializer_list<int> absent) {
  fs::create_directories(dir / "img");
  std::string gt;
  for (int f = 0; f < 12; ++f) {
    Image img = background(seed + f);
    const BBox box{x0 + dx * f, y0 + dy * f, 44, 32};
    const bool hidden = std::find(absent.begin(), absent.end(), f) != absent.end();
    if (!hidden) paint(img, {box, r, g, b});
    char name[32];
    std::snprintf(name, sizeof name, "%08d.png", f + 1);
    write_png(dir / "img" / name, img);
    gt += hidden ? "0,0,0,0\n"
                 : std::to_string(box.x) + "," + std::to_string(box.y) + "," + std::to_string(box.w) + "," +
                       std::to_string(box.h) + "\n";
  }
  write_file(dir / "groundtruth.txt", gt);
  write_file(dir / "category.txt", category + "\n");
}

}  // namespace

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Fixtures write_fixtures(const fs::path& root) {
  Fixtures fx;
  fx.root = root;
  write_coco(root / "coco");
  fx.coco_annotations = root / "coco" / "annotations.json";
  fx.sequence_root = root / "seq";
  write_sequence(fx.sequence_root / "car_a", "car", 20, 40, 12, 6, 210, 50, 50, 3, {});
  write_sequence(fx.sequence_root / "car_b", "car", 250, 180, -14, -8, 190, 70, 30, 5, {});
  write_sequence(fx.sequence_root / "bird", "bird", 140, 100, 3, -5, 240, 220, 40, 7, {3, 7});
  return fx;
}

fs::path write_config(const Fixtures& fx, const fs::path& path, const json& overrides) {
  json doc = {{"seed", 7},
              {"samples_per_epoch", 8},
              {"epochs", 1},
              {"max_frame_gap", 5},
              {"datasets",
               {{{"id", "coco"}, {"type", "image"}, {"path", fx.coco_annotations.string()}},
                {{"id", "seq"}, {"type", "sequence"}, {"path", fx.sequence_root.string()}}}},
              {"policy", {{"search_out_size", 128}, {"template_out_size", 64}}}};
  doc.merge_patch(overrides);
  write_file(path, doc.dump(2));
  return path;
}

}  // namespace trackaug::testing
