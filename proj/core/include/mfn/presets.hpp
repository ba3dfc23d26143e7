#pragma once

#include "mfn/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mfn {

struct NamedPreset {
    std::string name;
    std::string description;
    BiasConfiguration cfg;
    double i_app = 0.0; // suggested constant input (A)
};

// Shipped operating points, immutable.
const std::vector<NamedPreset>& presets();
std::optional<NamedPreset> find_preset(const std::string& name);

} // namespace mfn
