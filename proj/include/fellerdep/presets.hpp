#pragma once

#include "fellerdep/process.hpp"

#include <string>
#include <vector>

namespace fellerdep
{
struct PresetInfo
{
    std::string name;
    std::string family;  // jump_levy, ornstein_uhlenbeck, pseudo_poisson, subordinated
    std::string description;
    Vec default_start;
};

const std::vector<PresetInfo>& preset_catalog();
bool has_preset(const std::string& name);
/// Throws SpecError for unknown names.
ProcessSpec make_preset(const std::string& name);
const PresetInfo& preset_info(const std::string& name);

}  // namespace fellerdep
