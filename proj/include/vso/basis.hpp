#pragma once

// Geometry of bases. Only `kind` and `reference` are interpreted by the
// engine proper; the per-kind readers below give meaning to the conventional
// parameter keys used by sub-domain checks and by the selection interpreter:
//
//   space  <axis>_min, <axis>_max, <axis>_n   regular grid along an axis
//          <axis>                             a single coordinate
//          axes: x, y, z, lat, lon (row-major, first present axis slowest)
//   time   t_start, t_end, t_n                regular time steps
//          t                                  a single instant
//   group  members                            comma separated member names
//
// Any other key is opaque.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vso/kb.hpp"

namespace vso::basis {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double at(std::size_t i) const;
};

/// Axis name -> interval, in row-major axis order.
using SpaceExtent = std::vector<std::pair<std::string, Interval>>;

std::optional<SpaceExtent> space_extent(const ParamMap& params);
std::optional<Interval> time_extent(const ParamMap& params);
std::vector<std::string> group_members(const ParamMap& params);

/// Number of positions a payload on this basis carries (at least 1).
std::size_t position_count(const Basis& b);

/// True when `target` describes a sub-domain of `source`: same kind and
/// reference, and box / interval / member-set containment per kind.
bool covers(const Basis& source, const Basis& target);

/// Selection interpreter: re-samples a payload defined on `from` onto the
/// positions of `to`. Nearest grid point for space, nearest step at or
/// before the instant for time, member lookup for groups. Uniform (single
/// sample) payloads pass through unchanged.
Payload select(const Basis& from, const Basis& to, const Payload& samples);

/// Inline script text for a selection transition.
std::string selection_script(BasisKind kind, const std::string& from, const std::string& to);

struct SelectionScript {
  BasisKind kind;
  std::string from;
  std::string to;
};
/// Parses "select <kind> <from> -> <to>"; raises SyntaxError otherwise.
SelectionScript parse_selection_script(const std::string& script);

}  // namespace vso::basis
