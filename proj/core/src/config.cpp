// SPDX-License-Identifier: Apache-2.0

#include "trackaug/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trackaug/error.hpp"

namespace trackaug {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Reads fields from one JSON object and remembers which keys were consumed
/// so the rest can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::string_view origin)
      : obj_(obj), path_(std::move(path)), origin_(origin) {
    if (!obj_.is_object()) error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) error(key_path(it.key()), "unknown key");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    convert(*it, key_path(key), out);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void error(const std::string& key, const std::string& what) const {
    fail(ErrorCode::kParse, std::string(origin_) + ": '" + key + "': " + what);
  }

 private:
  void convert(const json& v, const std::string& key, double& out) const {
    if (!v.is_number()) error(key, "expected a number");
    out = v.get<double>();
  }
  void convert(const json& v, const std::string& key, int& out) const {
    if (!v.is_number_integer()) error(key, "expected an integer");
    out = v.get<int>();
  }
  void convert(const json& v, const std::string& key, std::uint64_t& out) const {
    if (!v.is_number_unsigned()) error(key, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void convert(const json& v, const std::string& key, bool& out) const {
    if (!v.is_boolean()) error(key, "expected true or false");
    out = v.get<bool>();
  }
  void convert(const json& v, const std::string& key, std::string& out) const {
    if (!v.is_string()) error(key, "expected a string");
    out = v.get<std::string>();
  }

  const json& obj_;
  std::string path_;
  std::string_view origin_;
  std::set<std::string> seen_;
};

void read_jitter(const json& j, const std::string& path, std::string_view origin, JitterParams& out) {
  ObjectReader r(j, path, origin);
  r.read("shift", out.shift);
  r.read("scale", out.scale);
  r.finish();
}

void read_gda(const json& j, const std::string& path, std::string_view origin, GdaConfig& g) {
  ObjectReader r(j, path, origin);
  r.read("p_gray", g.p_gray);
  r.read("p_flip", g.p_flip);
  r.read("p_brightness", g.p_brightness);
  r.read("p_blur", g.p_blur);
  r.read("p_rotate", g.p_rotate);
  r.read("brightness_magnitude", g.brightness_magnitude);
  r.read("blur_sigma_min", g.blur_sigma_min);
  r.read("blur_sigma_max", g.blur_sigma_max);
  r.read("rotate_max_deg", g.rotate_max_deg);
  r.finish();
}

void read_tfmix(const json& j, const std::string& path, std::string_view origin, TfmixConfig& t) {
  ObjectReader r(j, path, origin);
  r.read("enabled", t.enabled);
  std::string mode(to_string(t.mode));
  r.read("mode", mode);
  try {
    t.mode = mix_mode_from_string(mode);
  } catch (const Error&) {
    r.error(r.key_path("mode"), "expected token_feature, image_bbox, image_mask or token_image");
  }
  r.read("occl_threshold", t.occl_threshold);
  r.read("patch_size", t.patch_size);
  r.read("token_overlap_threshold", t.token_overlap_threshold);
  r.read("same_category_first", t.same_category_first);
  r.read("epoch_period", t.epoch_period);
  r.read("phase_offset", t.phase_offset);
  r.read("max_placement_attempts", t.max_placement_attempts);
  r.read("fixed_position", t.fixed_position);
  r.read("token_image_min_ratio", t.token_image_min_ratio);
  r.read("token_image_max_ratio", t.token_image_max_ratio);
  r.finish();
}

void read_policy(const json& j, const std::string& path, std::string_view origin, AugPolicy& p) {
  ObjectReader r(j, path, origin);
  r.read("gamma_min", p.gamma_min);
  r.read("gamma_max", p.gamma_max);
  r.read("p_boundary", p.p_boundary);
  if (const json* c = r.child("jitter")) read_jitter(*c, r.key_path("jitter"), origin, p.jitter);
  r.read("search_out_size", p.search_out_size);
  r.read("template_out_size", p.template_out_size);
  r.read("template_gamma", p.template_gamma);
  r.read("v_min", p.v_min);
  r.read("max_retries", p.max_retries);
  if (const json* c = r.child("gda")) read_gda(*c, r.key_path("gda"), origin, p.gda);
  if (const json* c = r.child("tfmix")) read_tfmix(*c, r.key_path("tfmix"), origin, p.tfmix);
  r.finish();
}

DatasetSpec read_dataset(const json& j, const std::string& path, std::string_view origin, const fs::path& base) {
  ObjectReader r(j, path, origin);
  DatasetSpec d;
  r.read("id", d.id);
  std::string type(to_string(d.type));
  r.read("type", type);
  if (type != "image" && type != "sequence") r.error(r.key_path("type"), "expected image or sequence");
  d.type = dataset_kind_from_string(type);
  std::string p;
  r.read("path", p);
  if (p.empty()) r.error(r.key_path("path"), "missing");
  d.path = fs::path(p).is_absolute() ? fs::path(p) : base / p;
  if (const json* root = r.child("image_root"); root && !root->is_null()) {
    if (!root->is_string()) r.error(r.key_path("image_root"), "expected a string");
    const fs::path rp(root->get<std::string>());
    d.image_root = rp.is_absolute() ? rp : base / rp;
  }
  r.read("weight", d.weight);
  r.read("fraction", d.fraction);
  r.finish();
  if (d.id.empty()) d.id = d.path.filename().string();
  return d;
}

json policy_json(const AugPolicy& p) {
  const GdaConfig& g = p.gda;
  const TfmixConfig& t = p.tfmix;
  return {
      {"gamma_min", p.gamma_min},
      {"gamma_max", p.gamma_max},
      {"p_boundary", p.p_boundary},
      {"jitter", {{"shift", p.jitter.shift}, {"scale", p.jitter.scale}}},
      {"search_out_size", p.search_out_size},
      {"template_out_size", p.template_out_size},
      {"template_gamma", p.template_gamma},
      {"v_min", p.v_min},
      {"max_retries", p.max_retries},
      {"gda",
       {{"p_gray", g.p_gray},
        {"p_flip", g.p_flip},
        {"p_brightness", g.p_brightness},
        {"p_blur", g.p_blur},
        {"p_rotate", g.p_rotate},
        {"brightness_magnitude", g.brightness_magnitude},
        {"blur_sigma_min", g.blur_sigma_min},
        {"blur_sigma_max", g.blur_sigma_max},
        {"rotate_max_deg", g.rotate_max_deg}}},
      {"tfmix",
       {{"enabled", t.enabled},
        {"mode", std::string(to_string(t.mode))},
        {"occl_threshold", t.occl_threshold},
        {"patch_size", t.patch_size},
        {"token_overlap_threshold", t.token_overlap_threshold},
        {"same_category_first", t.same_category_first},
        {"epoch_period", t.epoch_period},
        {"phase_offset", t.phase_offset},
        {"max_placement_attempts", t.max_placement_attempts},
        {"fixed_position", t.fixed_position},
        {"token_image_min_ratio", t.token_image_min_ratio},
        {"token_image_max_ratio", t.token_image_max_ratio}}},
  };
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    fail(ErrorCode::kParse, std::string(origin) + ": line " + std::to_string(line) + ": malformed JSON");
  }
  PipelineConfig cfg;
  ObjectReader r(doc, "", origin);
  r.read("seed", cfg.seed);
  r.read("samples_per_epoch", cfg.samples_per_epoch);
  r.read("epochs", cfg.epochs);
  r.read("max_frame_gap", cfg.max_frame_gap);
  if (const json* ds = r.child("datasets")) {
    if (!ds->is_array()) r.error("datasets", "expected an array");
    for (std::size_t i = 0; i < ds->size(); ++i) {
      cfg.datasets.push_back(read_dataset((*ds)[i], "datasets[" + std::to_string(i) + "]", origin, base_dir));
    }
  }
  if (const json* p = r.child("policy")) read_policy(*p, "policy", origin, cfg.policy);
  if (const json* o = r.child("output")) {
    ObjectReader out(*o, "output", origin);
    out.read("manifest_name", cfg.output.manifest_name);
    out.finish();
  }
  r.finish();
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParse, std::string(origin) + ": " + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  const fs::path base = path.has_parent_path() ? fs::absolute(path).parent_path() : fs::current_path();
  return parse_config(ss.str(), base, path.string());
}

std::string dump_config(const PipelineConfig& c) {
  json datasets = json::array();
  for (const auto& d : c.datasets) {
    json j = {{"id", d.id},
              {"type", std::string(to_string(d.type))},
              {"path", d.path.string()},
              {"weight", d.weight},
              {"fraction", d.fraction}};
    if (d.image_root) j["image_root"] = d.image_root->string();
    datasets.push_back(std::move(j));
  }
  const json doc = {{"seed", c.seed},
                    {"samples_per_epoch", c.samples_per_epoch},
                    {"epochs", c.epochs},
                    {"max_frame_gap", c.max_frame_gap},
                    {"datasets", datasets},
                    {"policy", policy_json(c.policy)},
                    {"output", {{"manifest_name", c.output.manifest_name}}}};
  return doc.dump(2) + "\n";
}

}  // namespace trackaug
