// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "trackaug/pipeline.hpp"

namespace trackaug {

/// Parses a JSON pipeline config. Missing keys take defaults; unknown keys
/// and type mismatches throw kParse naming the dotted key path. Relative
/// dataset paths resolve against `base_dir`. The result is validated.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {},
                            std::string_view origin = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

/// Pretty JSON with every field materialized; parse_config(dump_config(c))
/// reproduces `c`.
std::string dump_config(const PipelineConfig& config);

}  // namespace trackaug
