#pragma once

#include <string_view>
#include <vector>

namespace relpush {

struct Preset {
  std::string_view name;
  std::string_view json;
};

// Config documents from presets/*.json, embedded at build time.
const std::vector<Preset>& bundled_presets();
const Preset* find_preset(std::string_view name);

}  // namespace relpush
