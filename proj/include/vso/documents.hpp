#pragma once

// Task request, plan list, AWF, run result and dataset-state documents. All
// carry "format_version" and serialize canonically (sorted keys, sets in key
// order), so equal values give identical bytes.

#include <string>
#include <string_view>
#include <vector>

#include "vso/awf.hpp"
#include "vso/json_codec.hpp"
#include "vso/planner.hpp"
#include "vso/runtime.hpp"

namespace vso {

codec::json encode(const TaskRequest& request);
TaskRequest decode_task_request(const codec::json& doc);
std::string serialize_task_request(const TaskRequest& request);
TaskRequest parse_task_request(std::string_view text);

codec::json encode(const Plan& plan);
Plan decode_plan(const codec::json& doc, const std::string& path);
codec::json encode(const PlanList& plans);
PlanList decode_plan_list(const codec::json& doc);
std::string serialize_plan_list(const PlanList& plans);
PlanList parse_plan_list(std::string_view text);

codec::json encode(const AWF& awf);
AWF decode_awf(const codec::json& doc);
std::string serialize_awf(const AWF& awf);
AWF parse_awf(std::string_view text);

codec::json encode(const RunResult& run);
RunResult decode_run_result(const codec::json& doc);
std::string serialize_run_result(const RunResult& run);
RunResult parse_run_result(std::string_view text);

codec::json encode(const std::vector<DatasetState>& states);
std::vector<DatasetState> decode_dataset_states(const codec::json& arr, const std::string& path);

/// SyntaxError unless the document declares the supported format version.
void check_format_version(const codec::json& doc);

}  // namespace vso
