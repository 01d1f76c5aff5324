// SPDX-License-Identifier: Apache-2.0

#include "trackaug/manifest.hpp"

#include <fstream>

#include "json.hpp"
#include "trackaug/error.hpp"

namespace trackaug {

using nlohmann::json;

namespace {

json box_json(const BBox& b) { return json::array({b.x, b.y, b.w, b.h}); }

BBox box_from(const json& j) {
  if (!j.is_array() || j.size() != 4) fail(ErrorCode::kParse, "manifest: box must be [x, y, w, h]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json map_json(const AffineMap& m) { return {{"scale", m.scale}, {"offset", json::array({m.offset.x, m.offset.y})}}; }

AffineMap map_from(const json& j) {
  return {j.at("scale").get<double>(), {j.at("offset").at(0).get<double>(), j.at("offset").at(1).get<double>()}};
}

json gda_json(const GdaRecord& g) {
  json j = {{"gray", g.gray}, {"flip", g.flip}};
  j["brightness"] = g.brightness ? json(*g.brightness) : json(nullptr);
  j["blur_sigma"] = g.blur_sigma ? json(*g.blur_sigma) : json(nullptr);
  j["rotate_deg"] = g.rotate_deg ? json(*g.rotate_deg) : json(nullptr);
  return j;
}

json stats_json(const std::optional<TokenStats>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"std", s->std}};
}

std::optional<TokenStats> stats_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return TokenStats{j.at("mean").get<double>(), j.at("std").get<double>()};
}

}  // namespace

std::string manifest_line(const TrainingPair& p, std::uint64_t seed, const std::string& template_png,
                          const std::string& search_png) {
  json search = {{"png", search_png},
                 {"frame", p.source.search_frame.string()},
                 {"frame_index", p.source.search_frame_index},
                 {"box", box_json(p.search_box)},
                 {"frame_box", box_json(p.source.search_box)},
                 {"to_image", map_json(p.search_patch.to_image)},
                 {"gamma", p.search_crop.gamma},
                 {"kind", std::string(to_string(p.search_crop.kind))},
                 {"retries", p.search_crop.retries_used}};
  search["direction"] = p.search_crop.direction ? json(std::string(to_string(*p.search_crop.direction))) : json(nullptr);
  const json templ = {{"png", template_png},
                      {"frame", p.source.template_frame.string()},
                      {"frame_index", p.source.template_frame_index},
                      {"box", box_json(p.template_box)},
                      {"frame_box", box_json(p.source.template_box)},
                      {"to_image", map_json(p.template_patch.to_image)},
                      {"gamma", p.template_crop.gamma}};
  const MixRecord& m = p.mix;
  const json mix = {{"active", m.active},
                    {"applied", m.applied},
                    {"mode", std::string(to_string(m.mode))},
                    {"distractor", m.distractor_id},
                    {"occluded_fraction", m.occluded_fraction},
                    {"fallback", m.fallback},
                    {"replaced", m.replaced},
                    {"stats_source", stats_json(m.stats_source)},
                    {"stats_target", stats_json(m.stats_target)},
                    {"skipped", m.skipped}};
  const json rec = {{"epoch", p.epoch},
                    {"index", p.index},
                    {"dataset", p.source.dataset_id},
                    {"object", p.source.object_id},
                    {"template", templ},
                    {"search", search},
                    {"gda", {{"template", gda_json(p.template_gda)}, {"search", gda_json(p.search_gda)}}},
                    {"mix", mix},
                    {"rng", {{"seed", seed}, {"dataset", p.source.dataset_id}, {"epoch", p.epoch}, {"index", p.index}}}};
  return rec.dump();
}

ManifestRecord parse_manifest_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
    ManifestRecord r;
    r.epoch = j.at("epoch").get<std::uint64_t>();
    r.index = j.at("index").get<std::uint64_t>();
    r.dataset_id = j.at("dataset").get<std::string>();
    r.object_id = j.at("object").get<std::string>();
    const json& t = j.at("template");
    const json& s = j.at("search");
    r.template_png = t.at("png").get<std::string>();
    r.search_png = s.at("png").get<std::string>();
    r.template_frame = t.at("frame").get<std::string>();
    r.search_frame = s.at("frame").get<std::string>();
    r.template_frame_index = t.at("frame_index").get<int>();
    r.search_frame_index = s.at("frame_index").get<int>();
    r.template_box = box_from(t.at("box"));
    r.search_box = box_from(s.at("box"));
    r.template_frame_box = box_from(t.at("frame_box"));
    r.search_frame_box = box_from(s.at("frame_box"));
    r.template_to_image = map_from(t.at("to_image"));
    r.search_to_image = map_from(s.at("to_image"));
    r.gamma = s.at("gamma").get<double>();
    r.kind = crop_kind_from_string(s.at("kind").get<std::string>());
    r.retries = s.at("retries").get<int>();
    if (!s.at("direction").is_null()) {
      const auto d = s.at("direction").get<std::string>();
      r.direction = d == "top" ? Direction::kTop : d == "bottom" ? Direction::kBottom
                  : d == "left" ? Direction::kLeft : Direction::kRight;
    }
    const json& gs = j.at("gda").at("search");
    r.flipped = gs.at("flip").get<bool>();
    if (!gs.at("rotate_deg").is_null()) r.rotate_deg = gs.at("rotate_deg").get<double>();
    const json& m = j.at("mix");
    r.mix.active = m.at("active").get<bool>();
    r.mix.applied = m.at("applied").get<bool>();
    r.mix.mode = mix_mode_from_string(m.at("mode").get<std::string>());
    r.mix.distractor_id = m.at("distractor").get<std::string>();
    r.mix.occluded_fraction = m.at("occluded_fraction").get<double>();
    r.mix.fallback = m.at("fallback").get<bool>();
    r.mix.replaced = m.at("replaced").get<std::size_t>();
    r.mix.stats_source = stats_from(m.at("stats_source"));
    r.mix.stats_target = stats_from(m.at("stats_target"));
    r.mix.skipped = m.at("skipped").get<std::string>();
    r.seed = j.at("rng").at("seed").get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("manifest record: ") + e.what());
  }
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open manifest '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || line != kManifestHeader) {
    fail(ErrorCode::kParse, path.string() + ": expected header '" + std::string(kManifestHeader) + "'");
  }
  std::vector<ManifestRecord> out;
  while (std::getline(f, line)) {
    if (!line.empty()) out.push_back(parse_manifest_line(line));
  }
  return out;
}

}  // namespace trackaug
