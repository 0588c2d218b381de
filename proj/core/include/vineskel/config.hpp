// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vineskel/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace vineskel {

/// Parses a TOML pipeline configuration. Unknown tables or keys and values
/// outside their valid range throw ParseError / InvalidParameter. Relative
/// paths are resolved against `base_dir`.
PipelineConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = {},
                            const std::string& source = "<memory>");
PipelineConfig load_config(const std::filesystem::path& path);

/// TOML document listing every key with its default value.
std::string default_config_toml();

RootSelection parse_root_strategy(std::string_view text);
std::string root_strategy_name(const RootSelection& root);

}  // namespace vineskel
