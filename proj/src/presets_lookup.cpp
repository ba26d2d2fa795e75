#include "relpush/presets.hpp"

namespace relpush {

const Preset* find_preset(std::string_view name) {
  for (const Preset& p : bundled_presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace relpush
