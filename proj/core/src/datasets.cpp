// SPDX-License-Identifier: Apache-2.0

#include "trackaug/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "trackaug/error.hpp"

namespace trackaug {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(DatasetKind k) noexcept {
  return k == DatasetKind::kImage ? "image" : "sequence";
}

DatasetKind dataset_kind_from_string(std::string_view s) {
  if (s == "image") return DatasetKind::kImage;
  if (s == "sequence") return DatasetKind::kSequence;
  fail(ErrorCode::kParse, "unknown dataset type '" + std::string(s) + "' (expected image or sequence)");
}

std::size_t Sequence::visible_count() const noexcept {
  return static_cast<std::size_t>(std::count(visible.begin(), visible.end(), 1));
}

std::size_t Dataset::unit_count() const noexcept {
  return kind == DatasetKind::kSequence ? sequences.size() : images.size();
}

std::size_t Dataset::object_count() const noexcept {
  return kind == DatasetKind::kSequence ? sequences.size() : objects.size();
}

std::string Dataset::object_id(std::size_t i) const {
  if (kind == DatasetKind::kSequence) return id + "/" + sequences.at(i).id;
  return id + "/" + std::to_string(objects.at(i).id);
}

std::optional<std::string> Dataset::object_category(std::size_t i) const {
  if (kind == DatasetKind::kSequence) return sequences.at(i).category;
  return objects.at(i).category;
}

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

[[noreturn]] void field_error(const fs::path& file, const std::string& field, const std::string& what) {
  fail(ErrorCode::kParse, file.string() + ": field '" + field + "': " + what);
}

const json& member(const json& obj, const char* key, const fs::path& file, const std::string& ctx) {
  if (!obj.is_object()) field_error(file, ctx, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(file, ctx + "." + key, "missing");
  return *it;
}

std::int64_t as_int(const json& v, const fs::path& file, const std::string& field) {
  if (!v.is_number_integer()) field_error(file, field, "expected an integer");
  return v.get<std::int64_t>();
}

double as_number(const json& v, const fs::path& file, const std::string& field) {
  if (!v.is_number()) field_error(file, field, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const fs::path& file, const std::string& field) {
  if (!v.is_string()) field_error(file, field, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const fs::path& file, const std::string& field) {
  if (!v.is_array()) field_error(file, field, "expected an array");
  return v;
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_frame_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".ppm";
}

}  // namespace

Dataset load_image_dataset(const fs::path& annotation_path, std::string dataset_id,
                           std::optional<fs::path> image_root) {
  const std::string text = read_text(annotation_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, annotation_path.string() + ": line " + std::to_string(line_of(text, e.byte)) +
                                ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) field_error(annotation_path, "<root>", "expected an object");

  Dataset ds;
  ds.kind = DatasetKind::kImage;
  ds.id = dataset_id.empty() ? annotation_path.stem().string() : std::move(dataset_id);
  const fs::path root = image_root.value_or(annotation_path.parent_path());

  std::unordered_map<std::int64_t, std::string> categories;
  if (auto it = doc.find("categories"); it != doc.end()) {
    const json& cats = as_array(*it, annotation_path, "categories");
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const std::string ctx = "categories[" + std::to_string(i) + "]";
      const auto cid = as_int(member(cats[i], "id", annotation_path, ctx), annotation_path, ctx + ".id");
      std::string name = std::to_string(cid);
      if (cats[i].contains("name")) name = as_string(cats[i]["name"], annotation_path, ctx + ".name");
      categories[cid] = name;
    }
  }

  std::unordered_map<std::int64_t, std::size_t> image_pos;
  if (auto it = doc.find("images"); it != doc.end()) {
    const json& imgs = as_array(*it, annotation_path, "images");
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const std::string ctx = "images[" + std::to_string(i) + "]";
      ImageRecord rec;
      rec.id = as_int(member(imgs[i], "id", annotation_path, ctx), annotation_path, ctx + ".id");
      rec.file = root / as_string(member(imgs[i], "file_name", annotation_path, ctx), annotation_path,
                                  ctx + ".file_name");
      if (imgs[i].contains("width")) rec.width = static_cast<int>(as_int(imgs[i]["width"], annotation_path, ctx + ".width"));
      if (imgs[i].contains("height")) rec.height = static_cast<int>(as_int(imgs[i]["height"], annotation_path, ctx + ".height"));
      if (!image_pos.emplace(rec.id, ds.images.size()).second) {
        field_error(annotation_path, ctx + ".id", "duplicate image id " + std::to_string(rec.id));
      }
      ds.images.push_back(std::move(rec));
    }
  }

  if (auto it = doc.find("annotations"); it != doc.end()) {
    const json& anns = as_array(*it, annotation_path, "annotations");
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const std::string ctx = "annotations[" + std::to_string(i) + "]";
      ObjectRecord obj;
      obj.id = as_int(member(anns[i], "id", annotation_path, ctx), annotation_path, ctx + ".id");
      const auto image_id =
          as_int(member(anns[i], "image_id", annotation_path, ctx), annotation_path, ctx + ".image_id");
      const json& bbox = as_array(member(anns[i], "bbox", annotation_path, ctx), annotation_path, ctx + ".bbox");
      if (bbox.size() != 4) field_error(annotation_path, ctx + ".bbox", "expected 4 numbers [x, y, w, h]");
      obj.box = {as_number(bbox[0], annotation_path, ctx + ".bbox[0]"), as_number(bbox[1], annotation_path, ctx + ".bbox[1]"),
                 as_number(bbox[2], annotation_path, ctx + ".bbox[2]"), as_number(bbox[3], annotation_path, ctx + ".bbox[3]")};
      const auto pos = image_pos.find(image_id);
      if (pos == image_pos.end()) {
        field_error(annotation_path, ctx + ".image_id", "unknown image id " + std::to_string(image_id));
      }
      obj.image = pos->second;
      if (anns[i].contains("category_id")) {
        const auto cid = as_int(anns[i]["category_id"], annotation_path, ctx + ".category_id");
        const auto c = categories.find(cid);
        obj.category = c != categories.end() ? c->second : std::to_string(cid);
      }
      if (!is_valid(obj.box)) {
        ++ds.skipped_annotations;
        continue;
      }
      ds.objects.push_back(std::move(obj));
    }
  }
  return ds;
}

Dataset load_sequence_dataset(const fs::path& root, std::string dataset_id) {
  if (!fs::is_directory(root)) fail(ErrorCode::kIo, "sequence dataset root '" + root.string() + "' is not a directory");
  Dataset ds;
  ds.kind = DatasetKind::kSequence;
  ds.id = dataset_id.empty() ? root.filename().string() : std::move(dataset_id);

  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    Sequence seq;
    seq.id = dir.filename().string();
    const fs::path gt = dir / "groundtruth.txt";
    if (!fs::exists(gt)) fail(ErrorCode::kStructural, "sequence '" + seq.id + "': missing groundtruth.txt");

    const fs::path frame_dir = fs::is_directory(dir / "img") ? dir / "img" : dir;
    for (const auto& e : fs::directory_iterator(frame_dir)) {
      if (e.is_regular_file() && is_frame_file(e.path())) seq.frames.push_back(e.path());
    }
    std::sort(seq.frames.begin(), seq.frames.end());

    std::istringstream lines(read_text(gt));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty()) continue;
      double v[4];
      std::size_t start = 0;
      for (int k = 0; k < 4; ++k) {
        const std::size_t end = k < 3 ? t.find(',', start) : t.size();
        if (end == std::string::npos) {
          fail(ErrorCode::kParse, gt.string() + ": line " + std::to_string(lineno) + ": expected x,y,w,h");
        }
        const std::string tok = trim(std::string_view(t).substr(start, end - start));
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v[k]);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
          if (tok == "nan" || tok == "NaN") {
            v[k] = std::nan("");
          } else {
            fail(ErrorCode::kParse, gt.string() + ": line " + std::to_string(lineno) + ": bad number '" + tok + "'");
          }
        }
        start = end + 1;
      }
      const BBox b{v[0], v[1], v[2], v[3]};
      seq.boxes.push_back(b);
      seq.visible.push_back(is_valid(b) ? 1 : 0);
    }
    if (seq.boxes.size() != seq.frames.size()) {
      fail(ErrorCode::kStructural, "sequence '" + seq.id + "': " + std::to_string(seq.boxes.size()) +
                                       " groundtruth lines but " + std::to_string(seq.frames.size()) + " frames");
    }
    if (fs::exists(dir / "category.txt")) {
      const std::string cat = trim(read_text(dir / "category.txt"));
      if (!cat.empty()) seq.category = cat;
    }
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

Dataset subset_fraction(const Dataset& dataset, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, "subset_fraction: fraction must lie in (0, 1]");
  const std::size_t n = dataset.unit_count();
  if (fraction == 1.0 || n == 0) return dataset;
  auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);

  RngStream rng = rng_for(seed, dataset.id, 0, 0, "subset");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < keep; ++i) std::swap(order[i], order[i + rng.index(n - i)]);
  order.resize(keep);
  std::sort(order.begin(), order.end());

  Dataset out;
  out.id = dataset.id;
  out.kind = dataset.kind;
  out.skipped_annotations = dataset.skipped_annotations;
  if (dataset.kind == DatasetKind::kSequence) {
    for (std::size_t i : order) out.sequences.push_back(dataset.sequences[i]);
    return out;
  }
  std::vector<std::size_t> remap(n, n);
  for (std::size_t i : order) {
    remap[i] = out.images.size();
    out.images.push_back(dataset.images[i]);
  }
  for (const auto& obj : dataset.objects) {
    if (remap[obj.image] == n) continue;
    ObjectRecord o = obj;
    o.image = remap[obj.image];
    out.objects.push_back(std::move(o));
  }
  return out;
}

SamplePair draw_pair_for(const Dataset& ds, std::size_t object_index, RandomSource& rng, int max_frame_gap) {
  require(max_frame_gap >= 0, "draw_pair: max_frame_gap must be >= 0");
  SamplePair p;
  p.dataset_id = ds.id;
  p.object_index = object_index;
  p.object_id = ds.object_id(object_index);
  p.category = ds.object_category(object_index);
  if (ds.kind == DatasetKind::kImage) {
    const ObjectRecord& obj = ds.objects.at(object_index);
    p.template_frame = p.search_frame = ds.images[obj.image].file;
    p.template_box = p.search_box = obj.box;
    return p;
  }
  const Sequence& seq = ds.sequences.at(object_index);
  std::vector<int> visible;
  for (std::size_t i = 0; i < seq.visible.size(); ++i) {
    if (seq.visible[i] != 0) visible.push_back(static_cast<int>(i));
  }
  if (visible.empty()) fail(ErrorCode::kStructural, "sequence '" + seq.id + "' has no visible frames");
  const int search = visible[rng.index(visible.size())];
  std::vector<int> near;
  for (int f : visible) {
    if (std::abs(f - search) <= max_frame_gap) near.push_back(f);
  }
  const int templ = near[rng.index(near.size())];
  p.search_frame_index = search;
  p.template_frame_index = templ;
  p.search_frame = seq.frames[static_cast<std::size_t>(search)];
  p.template_frame = seq.frames[static_cast<std::size_t>(templ)];
  p.search_box = seq.boxes[static_cast<std::size_t>(search)];
  p.template_box = seq.boxes[static_cast<std::size_t>(templ)];
  return p;
}

SamplePair draw_pair(const Dataset& ds, RandomSource& rng, int max_frame_gap) {
  if (ds.kind == DatasetKind::kImage) {
    if (ds.objects.empty()) fail(ErrorCode::kStructural, "dataset '" + ds.id + "' has no objects to sample");
    return draw_pair_for(ds, rng.index(ds.objects.size()), rng, max_frame_gap);
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    if (ds.sequences[i].visible_count() > 0) usable.push_back(i);
  }
  if (usable.empty()) fail(ErrorCode::kStructural, "dataset '" + ds.id + "' has no sequences to sample");
  return draw_pair_for(ds, usable[rng.index(usable.size())], rng, max_frame_gap);
}

CategoryIndex::CategoryIndex(const std::vector<const Dataset*>& datasets) {
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const Dataset& ds = *datasets[d];
    for (std::size_t i = 0; i < ds.object_count(); ++i) {
      if (ds.kind == DatasetKind::kSequence && ds.sequences[i].visible_count() == 0) continue;
      ObjectRef ref{d, i, ds.object_id(i), ds.object_category(i)};
      const std::size_t pos = all_.size();
      if (ref.category) by_category_[*ref.category].push_back(pos);
      by_id_.emplace(ref.id, pos);
      all_.push_back(std::move(ref));
    }
  }
}

const std::vector<std::size_t>& CategoryIndex::members(const std::string& category) const {
  static const std::vector<std::size_t> kEmpty;
  const auto it = by_category_.find(category);
  return it == by_category_.end() ? kEmpty : it->second;
}

std::optional<std::size_t> CategoryIndex::position_of(const std::string& id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

namespace {

/// Uniform pick from `candidates` skipping `excluded` (a position that may or
/// may not be present).
std::optional<std::size_t> pick_excluding(const std::vector<std::size_t>& candidates,
                                          std::optional<std::size_t> excluded, RandomSource& rng) {
  std::size_t n = candidates.size();
  const bool present = excluded && std::binary_search(candidates.begin(), candidates.end(), *excluded);
  if (present) --n;
  if (n == 0) return std::nullopt;
  std::size_t k = rng.index(n);
  if (present) {
    const auto at = static_cast<std::size_t>(
        std::lower_bound(candidates.begin(), candidates.end(), *excluded) - candidates.begin());
    if (k >= at) ++k;
  }
  return candidates[k];
}

}  // namespace

ObjectRef select_distractor(const CategoryIndex& index, const std::optional<std::string>& category,
                            const std::string& exclude_id, RandomSource& rng, bool same_category_first) {
  const auto excluded = index.position_of(exclude_id);
  if (same_category_first && category) {
    if (auto pos = pick_excluding(index.members(*category), excluded, rng)) return index.objects()[*pos];
  }
  const std::size_t others = index.size() - (excluded ? 1 : 0);
  if (others > 0) {
    std::size_t k = rng.index(others);
    if (excluded && k >= *excluded) ++k;
    return index.objects()[k];
  }
  fail(ErrorCode::kNoDistractor, "no distractor available other than '" + exclude_id + "'");
}

EpochFlags epoch_schedule(std::uint64_t epoch, const TfmixConfig& cfg) {
  const auto period = static_cast<std::uint64_t>(cfg.epoch_period);
  const auto phase = (epoch + static_cast<std::uint64_t>(cfg.phase_offset)) % period;
  return {cfg.enabled && phase == period - 1};
}

}  // namespace trackaug
