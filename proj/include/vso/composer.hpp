#pragma once

#include <map>
#include <string>
#include <vector>

#include "vso/kb.hpp"

namespace vso {

/// Merges two quality spaces by axis id. Axes present on both sides must
/// share a domain (AxisConflict otherwise); the merged space lists the left
/// axes followed by right-only axes. Both maps are injective and total on
/// their source axes.
QualityMergeResult merge_quality(const QualitySpace& left, const QualitySpace& right);

/// Id of the transition moving `value` from `from` to `to` ("_" for none).
std::string transition_model_id(const std::string& value, const std::optional<std::string>& from,
                                const std::optional<std::string>& to);

/// One transition model per distinct (value, from basis, to basis) where a
/// non-transition model of one class outputs the value on `from` and a
/// non-transition model of the other consumes it on `to` (both directions).
/// Pairs on the same dataset need no transition and are skipped. A
/// transition gets an inline selection script when `to` is a sub-domain of
/// `from`; otherwise its scenario is "needs_package".
std::vector<Model> infer_transition_models(const VSOClass& left, const VSOClass& right);

/// Producers of the transition's input into it, and it into consumers of its
/// output.
std::vector<Edge> make_transition_edges(const Model& transition, const std::map<std::string, Model>& models);

/// Composition operator: unions of bases, values, models and edges, merged
/// quality space, inferred transition models and their edges. Datasets that
/// are identical on both sides are connected directly by pass-through edges.
/// Throws AxisConflict, UnitConflict, BasisIdCollision or ModelIdCollision.
CompositeVSO compose(const CompositeVSO& left, const CompositeVSO& right);
CompositeVSO compose(const VSOClass& left, const VSOClass& right);

/// Left fold over two or more classes.
CompositeVSO compose_all(const std::vector<VSOClass>& classes);

/// Orientation-free form for comparing composites built in different
/// orders: clears the name, sorts quality axes and folds both quality maps
/// into one.
CompositeVSO canonical_form(CompositeVSO c);

}  // namespace vso
