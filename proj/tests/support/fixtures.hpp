#pragma once

#include <memory>
#include <string>

#include "vso/kb.hpp"
#include "vso/planner.hpp"

namespace vso::test {

std::string source_path(const std::string& relative);
std::string read_source(const std::string& relative);
VSOClass load_class(const std::string& relative);

VSOClass sea_class();
VSOClass ship_class();
std::shared_ptr<const CompositeVSO> sea_ship();

/// near_water_wind, level_obs, bathymetry provided; recommendation
/// requested; spectrum_parameterization disabled; ship_params = 150.
TaskRequest golden_request();

inline const std::string kTransitionId = "T:wave_spectrum:sea_grid->location";

}  // namespace vso::test
