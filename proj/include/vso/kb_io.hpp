#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vso/error.hpp"
#include "vso/kb.hpp"

namespace vso {

/// One failed invariant. `code` is machine readable (IN_OUT_OVERLAP,
/// EDGE_CONDITION, ...); `path` points into the class document.
struct Violation {
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Checks every structural invariant of a class: cross references resolve,
/// quality points are complete and in-domain, model input/output sets are
/// disjoint, scenarios are well formed and every edge joins an output of its
/// source model to an input of its target. Empty result iff the class is
/// valid. Violations are ordered by path.
std::vector<Violation> validate_vso(const VSOClass& cls);

/// Parses a KB document and validates it. Throws SyntaxError for malformed
/// documents, ReferenceError for dangling ids and InvariantError for any other
/// violation; the error path names the offending element.
VSOClass parse_vso_class(std::string_view document);

/// Parses the structure without running validate_vso.
VSOClass parse_vso_class_unchecked(std::string_view document);

/// Canonical text: sorted keys, sets sorted by id, shortest round-trip
/// number formatting.
std::string serialize_vso_class(const VSOClass& cls);

/// Accepts both composite documents and plain class documents (the latter
/// become single-origin composites). Validated like parse_vso_class.
CompositeVSO parse_composite(std::string_view document);
std::string serialize_composite(const CompositeVSO& composite);

/// Reads a whole file; raises Io on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Binds const parameter values to a class. Keys must name const values on a
/// declared basis (or none); payload sizes must be 1 or the basis position
/// count. Const datasets left without a value are listed in `needed`.
VSOInstance instantiate(std::shared_ptr<const VSOClass> cls, const std::map<DataKey, Payload>& params);

/// Maps a violation code to the parse error category it raises.
ErrorCode violation_error_code(const std::string& violation_code);

}  // namespace vso
