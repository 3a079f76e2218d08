#include "vso/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vso/error.hpp"

namespace vso::basis {

namespace {

constexpr const char* kSpaceAxes[] = {"x", "y", "z", "lat", "lon"};
constexpr double kEps = 1e-9;

std::optional<double> number(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  return std::nullopt;
}

std::size_t count_of(const ParamMap& params, const std::string& key) {
  auto n = number(params, key);
  if (!n || *n < 1.0) return 1;
  return static_cast<std::size_t>(std::llround(*n));
}

// Range (lo/hi keys) or single point (point key).
std::optional<Interval> read_interval(const ParamMap& params, const std::string& lo_key,
                                      const std::string& hi_key, const std::string& n_key,
                                      const std::string& point_key) {
  auto lo = number(params, lo_key);
  auto hi = number(params, hi_key);
  if (lo && hi) {
    return Interval{std::min(*lo, *hi), std::max(*lo, *hi), count_of(params, n_key)};
  }
  if (auto p = number(params, point_key)) return Interval{*p, *p, 1};
  return std::nullopt;
}

bool inside(const Interval& outer, const Interval& inner) {
  return inner.lo >= outer.lo - kEps && inner.hi <= outer.hi + kEps;
}

std::size_t nearest_index(const Interval& axis, double coord) {
  if (axis.count <= 1 || axis.hi == axis.lo) return 0;
  const double step = (axis.hi - axis.lo) / static_cast<double>(axis.count - 1);
  const double pos = std::round((coord - axis.lo) / step);
  return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(axis.count - 1)));
}

std::size_t index_at_or_before(const Interval& axis, double t) {
  if (axis.count <= 1 || axis.hi == axis.lo) return 0;
  const double step = (axis.hi - axis.lo) / static_cast<double>(axis.count - 1);
  const double pos = std::floor((t - axis.lo) / step + kEps);
  return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(axis.count - 1)));
}

}  // namespace

double Interval::at(std::size_t i) const {
  if (count <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::optional<SpaceExtent> space_extent(const ParamMap& params) {
  SpaceExtent extent;
  for (const char* axis : kSpaceAxes) {
    const std::string a = axis;
    if (auto iv = read_interval(params, a + "_min", a + "_max", a + "_n", a)) {
      extent.emplace_back(a, *iv);
    }
  }
  if (extent.empty()) return std::nullopt;
  return extent;
}

std::optional<Interval> time_extent(const ParamMap& params) {
  return read_interval(params, "t_start", "t_end", "t_n", "t");
}

std::vector<std::string> group_members(const ParamMap& params) {
  std::vector<std::string> out;
  auto it = params.find("members");
  if (it == params.end()) return out;
  const auto* text = std::get_if<std::string>(&it->second);
  if (!text) return out;
  std::stringstream ss(*text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t position_count(const Basis& b) {
  switch (b.kind) {
    case BasisKind::space: {
      auto extent = space_extent(b.params);
      if (!extent) return 1;
      std::size_t n = 1;
      for (const auto& [axis, iv] : *extent) n *= iv.count;
      return n;
    }
    case BasisKind::time: {
      auto iv = time_extent(b.params);
      return iv ? iv->count : 1;
    }
    case BasisKind::group:
      return std::max<std::size_t>(1, group_members(b.params).size());
  }
  return 1;
}

bool covers(const Basis& source, const Basis& target) {
  if (source.kind != target.kind || source.reference != target.reference) return false;
  switch (source.kind) {
    case BasisKind::space: {
      auto src = space_extent(source.params);
      auto dst = space_extent(target.params);
      if (!src || !dst || src->size() != dst->size()) return false;
      for (std::size_t i = 0; i < src->size(); ++i) {
        if ((*src)[i].first != (*dst)[i].first) return false;
        if (!inside((*src)[i].second, (*dst)[i].second)) return false;
      }
      return true;
    }
    case BasisKind::time: {
      auto src = time_extent(source.params);
      auto dst = time_extent(target.params);
      return src && dst && inside(*src, *dst);
    }
    case BasisKind::group: {
      auto src = group_members(source.params);
      auto dst = group_members(target.params);
      return std::includes(src.begin(), src.end(), dst.begin(), dst.end());
    }
  }
  return false;
}

Payload select(const Basis& from, const Basis& to, const Payload& samples) {
  if (samples.size() == 1) return samples;
  const std::size_t expected = position_count(from);
  if (samples.size() != expected) {
    throw Error(ErrorCode::TypeMismatch, from.id,
                "payload has " + std::to_string(samples.size()) + " samples, basis '" + from.id +
                    "' has " + std::to_string(expected) + " positions");
  }
  if (!covers(from, to)) {
    throw Error(ErrorCode::Invariant, to.id, "basis '" + to.id + "' is not a sub-domain of '" + from.id + "'");
  }
  Payload out;
  switch (from.kind) {
    case BasisKind::space: {
      const auto src = *space_extent(from.params);
      const auto dst = *space_extent(to.params);
      std::size_t total = 1;
      for (const auto& [a, iv] : dst) total *= iv.count;
      out.reserve(total);
      for (std::size_t flat = 0; flat < total; ++flat) {
        // Decompose the target position, then locate the nearest source node.
        std::size_t rem = flat;
        std::vector<std::size_t> idx(dst.size());
        for (std::size_t k = dst.size(); k-- > 0;) {
          idx[k] = rem % dst[k].second.count;
          rem /= dst[k].second.count;
        }
        std::size_t src_flat = 0;
        for (std::size_t k = 0; k < src.size(); ++k) {
          const double coord = dst[k].second.at(idx[k]);
          src_flat = src_flat * src[k].second.count + nearest_index(src[k].second, coord);
        }
        out.push_back(samples[src_flat]);
      }
      break;
    }
    case BasisKind::time: {
      const auto src = *time_extent(from.params);
      const auto dst = *time_extent(to.params);
      out.reserve(dst.count);
      for (std::size_t i = 0; i < dst.count; ++i) out.push_back(samples[index_at_or_before(src, dst.at(i))]);
      break;
    }
    case BasisKind::group: {
      const auto src = group_members(from.params);
      const auto dst = group_members(to.params);
      for (const auto& m : dst) {
        auto it = std::lower_bound(src.begin(), src.end(), m);
        out.push_back(samples[static_cast<std::size_t>(it - src.begin())]);
      }
      break;
    }
  }
  return out;
}

std::string selection_script(BasisKind kind, const std::string& from, const std::string& to) {
  return "select " + to_string(kind) + " " + from + " -> " + to;
}

SelectionScript parse_selection_script(const std::string& script) {
  std::istringstream in(script);
  std::string verb, kind, from, arrow, to, extra;
  in >> verb >> kind >> from >> arrow >> to;
  if (verb != "select" || arrow != "->" || to.empty() || (in >> extra)) {
    throw Error(ErrorCode::Syntax, "script", "unrecognized inline script '" + script + "'");
  }
  return {parse_basis_kind(kind), from, to};
}

}  // namespace vso::basis
