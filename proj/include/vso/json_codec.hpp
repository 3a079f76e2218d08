#pragma once

// JSON encoding shared by every document format. Object keys come out sorted
// (nlohmann::json uses std::map) and set-like arrays are emitted in key order,
// so equal structures always serialize to identical bytes.

#include <string>
#include <string_view>

#include "json.hpp"
#include "vso/kb.hpp"

namespace vso::codec {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Parses text, raising SyntaxError on malformed input.
json parse_text(std::string_view text);
/// Pretty-printed, newline-terminated.
std::string dump(const json& doc);

// Field access that raises SyntaxError naming `path`.
const json& require(const json& obj, const char* key, const std::string& path);
std::string require_string(const json& obj, const char* key, const std::string& path);
double require_number(const json& obj, const char* key, const std::string& path);
const json& require_array(const json& obj, const char* key, const std::string& path);
std::string as_string(const json& v, const std::string& path);
double as_number(const json& v, const std::string& path);
/// Null or absent fields read as missing.
const json* optional_field(const json& obj, const char* key);

json encode(const DataKey& key);
DataKey decode_key(const json& v, const std::string& path);

json encode(const QualityPoint& q);
QualityPoint decode_quality(const json& v, const std::string& path);

/// {value, basis, quality}
json encode(const DataRef& ref);
/// Missing quality axes are filled from `space` with 0.
DataRef decode_ref(const json& v, const QualitySpace& space, const std::string& path);

/// Array of DataRefs in key order; duplicates raise DUPLICATE_ID.
json encode_refs(const DataRefSet& refs);
DataRefSet decode_refs(const json& arr, const QualitySpace& space, const std::string& path);

json encode_payload(const Payload& p);
Payload decode_payload(const json& v, const std::string& path);

json encode(const ParamValue& v);
ParamValue decode_param(const json& v, const std::string& path);

json encode(const ParamMap& m);
ParamMap decode_params(const json& v, const std::string& path);

json encode(const QualitySpace& q);
QualitySpace decode_quality_space(const json& v, const std::string& path);

json encode(const VSOClass& cls);
/// Structure only; no cross-reference validation.
VSOClass decode_class(const json& doc);

json encode(const CompositeVSO& c);
CompositeVSO decode_composite(const json& doc);

}  // namespace vso::codec
