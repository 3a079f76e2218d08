#pragma once

// Independent reference computations used to check the engine.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vso/awf.hpp"
#include "vso/kb.hpp"
#include "vso/planner.hpp"

namespace vso::test {

using ModelSet = std::vector<std::string>;  // sorted ids

/// True when every model of `chosen` fires (inputs available up front or
/// carried by an edge from a model of `chosen` that fired earlier) and the
/// requested data is available or written by `chosen`.
bool oracle_valid(const CompositeVSO& c, const TaskRequest& r, const std::set<std::string>& chosen);

/// Every valid model set from which no single model can be dropped, by
/// enumerating all subsets of the runnable models. Sorted.
std::vector<ModelSet> oracle_plans(const CompositeVSO& c, const TaskRequest& r);

/// Quality each block writes, recomputed by walking links backwards from
/// the block to the workflow inputs.
std::map<std::string, std::map<DataKey, QualityPoint>> oracle_block_quality(const AWF& awf, const TaskRequest& r);

}  // namespace vso::test

namespace vso::test {

/// Composition properties checked on one class pair: identity with the
/// empty class, symmetry after canonicalization, element unions, one
/// transition per crossing (value, basis, basis) triple, edge membership,
/// transition wiring, validity and provenance totality. Returns one line
/// per failed property.
std::vector<std::string> composition_failures(const VSOClass& a, const VSOClass& b);

}  // namespace vso::test
