#include "vso/stubs.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace vso {

namespace {

double number_param(const ParamMap& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw std::runtime_error("missing parameter '" + name + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw std::runtime_error("parameter '" + name + "' is not a number");
}

double mean(const Payload& p) {
  if (p.empty()) throw std::runtime_error("empty payload");
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

Payload scaled(const Payload& p, double factor) {
  Payload out(p.size());
  std::transform(p.begin(), p.end(), out.begin(), [&](double x) { return x * factor; });
  return out;
}

std::vector<PackageStub> demo_stubs() {
  std::vector<PackageStub> stubs;
  stubs.push_back({"swan_stub", {"near_water_wind", "bathymetry"}, {"wave_spectrum"},
                   [](const PackageData& in, const ParamMap&) {
                     const Payload& wind = in.at("near_water_wind");
                     if (std::any_of(wind.begin(), wind.end(), [](double w) { return w < 0.0; })) {
                       throw std::runtime_error("negative wind speed");
                     }
                     return PackageData{{"wave_spectrum", scaled(wind, 0.3)}};
                   }});
  stubs.push_back({"level_stub", {"near_water_wind", "level_obs", "bathymetry"}, {"level_currents"},
                   [](const PackageData& in, const ParamMap&) {
                     Payload level = in.at("level_obs");
                     const double shift = 0.05 * mean(in.at("near_water_wind"));
                     for (double& x : level) x += shift;
                     return PackageData{{"level_currents", level}};
                   }});
  stubs.push_back({"param_stub", {"wave_spectrum"}, {"wave_parameters"},
                   [](const PackageData& in, const ParamMap&) {
                     return PackageData{{"wave_parameters", {mean(in.at("wave_spectrum"))}}};
                   }});
  stubs.push_back({"shipx_stub", {"wave_spectrum"}, {"rocking"},
                   [](const PackageData& in, const ParamMap& params) {
                     const double hull = number_param(params, "hull_length");
                     if (hull <= 0.0) throw std::runtime_error("hull_length must be positive");
                     return PackageData{{"rocking", scaled(in.at("wave_spectrum"), 4.0 * 100.0 / hull)}};
                   }});
  stubs.push_back({"expert_stub", {"rocking"}, {"recommendation"},
                   [](const PackageData& in, const ParamMap& params) {
                     const Payload& rocking = in.at("rocking");
                     if (rocking.empty()) throw std::runtime_error("empty payload");
                     const double peak = *std::max_element(rocking.begin(), rocking.end());
                     return PackageData{{"recommendation", {peak / number_param(params, "roll_limit")}}};
                   }});
  return stubs;
}

}  // namespace

PackageRegistry demo_registry() { return demo_registry_without({}); }

PackageRegistry demo_registry_without(const std::set<std::string>& omitted) {
  PackageRegistry r;
  for (auto& s : demo_stubs()) {
    if (!omitted.count(s.id)) r.add(std::move(s));
  }
  return r;
}

}  // namespace vso
