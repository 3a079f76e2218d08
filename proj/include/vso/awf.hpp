#pragma once

// Abstract workflows: the package-level form of a plan.

#include <optional>
#include <string>
#include <vector>

#include "vso/kb.hpp"
#include "vso/planner.hpp"

namespace vso {

enum class BlockKind { package_call, inline_script };
std::string to_string(BlockKind k);
BlockKind parse_block_kind(const std::string& s);

struct AWFBlock {
  std::string id;
  BlockKind kind = BlockKind::package_call;
  std::string model;
  std::string scenario;
  std::optional<std::string> package;  // none for inline scripts
  ParamMap params;                     // literals only
  DataRefSet consumes;
  DataRefSet produces;

  bool operator==(const AWFBlock&) const = default;
};

struct AWFLink {
  std::string from_block;
  std::string to_block;
  DataRef data;

  bool operator==(const AWFLink&) const = default;
};

struct AWF {
  std::vector<AWFBlock> blocks;  // plan order
  std::vector<AWFLink> links;    // sorted by (from, to, data)
  DataRefSet external_inputs;

  const AWFBlock* find_block(const std::string& id) const;
  bool operator==(const AWF&) const = default;
};

/// Block params: resolved extra params under their names, scenario options
/// as "option.<key>", and the parameters of every basis a block touches as
/// "basis.<id>.<key>" (request basis overrides applied). Inline selection
/// blocks carry their script under "script".
inline constexpr const char* kScriptParam = "script";
std::string option_param(const std::string& key);
std::string basis_param(const std::string& basis, const std::string& key);

/// Compiles a plan against its composite. One block per model; a package
/// sequence of length k > 1 becomes blocks "<model>.1" .. "<model>.k"
/// chained by stage tokens, each consuming the model inputs. Value bindings
/// resolve from the request parameters or provided payloads (UnresolvedParam
/// otherwise).
AWF compile_awf(const Plan& plan, const CompositeVSO& composite, const TaskRequest& request);

/// Producers before consumers, smallest ready id first. CycleDetected lists
/// the blocks of one cycle (comma separated path, arrowed message).
std::vector<std::string> topo_order(const AWF& awf);

/// Key of the token passed from stage `stage` of `model` to the next stage.
DataKey stage_token(const std::string& model, std::size_t stage);

}  // namespace vso
