#pragma once

// Deterministic demo packages for the Sea and Ship knowledge bases.
//
//   swan_stub    near_water_wind, bathymetry -> wave_spectrum = 0.3 * wind
//   level_stub   near_water_wind, level_obs, bathymetry
//                -> level_currents = level_obs + 0.05 * mean(wind)
//   param_stub   wave_spectrum -> wave_parameters = mean(spectrum)
//   shipx_stub   wave_spectrum -> rocking = 4 * wave * 100 / hull_length
//   expert_stub  rocking -> recommendation = max(rocking) / roll_limit
//
// swan_stub rejects negative wind speeds.

#include "vso/runtime.hpp"

namespace vso {

PackageRegistry demo_registry();

/// The demo registry without the named packages.
PackageRegistry demo_registry_without(const std::set<std::string>& omitted);

}  // namespace vso
